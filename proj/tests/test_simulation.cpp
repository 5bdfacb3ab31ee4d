#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "shapekit/simulation.hpp"

using namespace shapekit;

TEST_CASE("identity design is exactly the identity") {
  CovarianceParams params;
  Eigen::MatrixXd cov = make_covariance(Design::identity, 3, params, 5);
  CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decay design carries the harmonic spectrum") {
  CovarianceParams params;
  params.decay_gamma = 1.0;
  Eigen::MatrixXd cov = make_covariance(Design::decay, 3, params, 17);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov,
                                                    Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  CHECK(std::abs(ev[0] - 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(ev[1] - 0.5) <= 1e-10);
  CHECK(std::abs(ev[2] - 1.0) <= 1e-10);
  // conjugation keeps it symmetric but moves it off the diagonal basis
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spike design: two spikes of 10 over a linear bulk at n=10") {
  CovarianceParams params;
  Eigen::MatrixXd cov = make_covariance(Design::spike, 10, params, 23);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov,
                                                    Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  std::vector<double> expected;
  for (int i = 0; i < 8; ++i) expected.push_back(0.5 + i * (1.5 - 0.5) / 7.0);
  expected.push_back(10.0);
  expected.push_back(10.0);
  std::sort(expected.begin(), expected.end());
  REQUIRE(ev.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(ev[i] - expected[i]) <= 1e-8);
}

TEST_CASE("covariances stay SPD and depend on the seed") {
  CovarianceParams params;
  for (long n : {2L, 5L, 50L, 200L}) {
    for (Design d : {Design::identity, Design::decay, Design::spike}) {
      Eigen::MatrixXd cov = make_covariance(d, n, params, 31);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov,
                                                        Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      Eigen::MatrixXd again = make_covariance(d, n, params, 31);
      CHECK((cov - again).cwiseAbs().maxCoeff() == 0.0);
    }
    Eigen::MatrixXd a = make_covariance(Design::decay, n, params, 1);
    Eigen::MatrixXd b = make_covariance(Design::decay, n, params, 2);
    if (n > 1) CHECK((a - b).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("violation draws: support size and shift magnitude") {
  ViolationConstants constants;

  SUBCASE("null is empty") {
    ViolationDraw d = make_violation(Violation::null, 50, constants, 3);
    CHECK(d.support.empty());
    CHECK(d.delta == 0.0);
  }

  SUBCASE("mild at n=100: five coordinates") {
    ViolationDraw d = make_violation(Violation::mild, 100, constants, 3);
    REQUIRE(d.support.size() == 5);
    const double expected = std::sqrt(std::log(100.0)) / std::sqrt(5.0);
    CHECK(std::abs(d.delta - expected) <= 1e-12);
    std::set<long> uniq(d.support.begin(), d.support.end());
    CHECK(uniq.size() == d.support.size());
    for (long i : d.support) {
      CHECK(i >= 0);
      CHECK(i < 100);
    }
  }

  SUBCASE("the l2 norm of the shift is level-independent") {
    const long n = 64;
    for (Violation v :
         {Violation::mild, Violation::moderate, Violation::strong}) {
      ViolationDraw d = make_violation(v, n, constants, 9);
      const double norm = d.delta * std::sqrt(double(d.support.size()));
      CHECK(std::abs(norm - std::sqrt(std::log(double(n)))) <= 1e-10);
    }
  }

  SUBCASE("small n clamps to at least one coordinate") {
    ViolationDraw d = make_violation(Violation::mild, 3, constants, 4);
    CHECK(d.support.size() == 1);
  }

  SUBCASE("strong at n=20 hits a quarter of the coordinates") {
    ViolationDraw d = make_violation(Violation::strong, 20, constants, 5);
    CHECK(d.support.size() == 5);
  }
}

TEST_CASE("experiment configuration is validated") {
  SimulationConfig cfg;
  cfg.n_list = {3};
  cfg.N_list = {50};
  cfg.designs = {Design::identity};
  cfg.violations = {Violation::null};
  cfg.reps = 0;
  CHECK_THROWS_AS(run_experiment(cfg), input_error);
  cfg.reps = 5;
  cfg.mc_reps = 50;
  CHECK_THROWS_AS(run_experiment(cfg), input_error);
  cfg.mc_reps = 200;
  cfg.level = 0.0;
  CHECK_THROWS_AS(run_experiment(cfg), input_error);
  cfg.level = 1.5;
  CHECK_THROWS_AS(run_experiment(cfg), input_error);
}

TEST_CASE("experiment rows: determinism across thread counts") {
  SimulationConfig cfg;
  cfg.n_list = {4};
  cfg.N_list = {100};
  cfg.designs = {Design::identity};
  cfg.violations = {Violation::null, Violation::strong};
  cfg.reps = 10;
  cfg.mc_reps = 200;
  cfg.seed = 777;

  cfg.threads = 1;
  SimulationResult r1 = run_experiment(cfg);
  cfg.threads = 4;
  SimulationResult r4 = run_experiment(cfg);

  REQUIRE(r1.rows.size() == 2);
  REQUIRE(r4.rows.size() == 2);
  for (size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].rejection_rate == r4.rows[i].rejection_rate);
    CHECK(r1.rows[i].mc_stderr == r4.rows[i].mc_stderr);
    CHECK(r1.rows[i].reps == r4.rows[i].reps);
    CHECK(r1.rows[i].failures == r4.rows[i].failures);
  }

  for (const SimulationRow& row : r1.rows) {
    CHECK(row.failures == 0);
    CHECK(row.rejection_rate >= 0.0);
    CHECK(row.rejection_rate <= 1.0);
    const double se = std::sqrt(row.rejection_rate *
                                (1.0 - row.rejection_rate) /
                                double(row.reps));
    CHECK(std::abs(row.mc_stderr - se) <= 1e-12);
  }
}

TEST_CASE("strong violations reject at least as often as the null") {
  SimulationConfig cfg;
  cfg.n_list = {4};
  cfg.N_list = {400};
  cfg.designs = {Design::identity};
  cfg.violations = {Violation::null, Violation::strong};
  cfg.reps = 40;
  cfg.mc_reps = 300;
  cfg.seed = 991;
  cfg.threads = 4;
  SimulationResult r = run_experiment(cfg);
  REQUIRE(r.rows.size() == 2);
  const double null_rate = r.rows[0].rejection_rate;
  const double strong_rate = r.rows[1].rejection_rate;
  CHECK(strong_rate >= null_rate - 0.1);
}

TEST_CASE("name round trips") {
  for (Design d : {Design::identity, Design::decay, Design::spike})
    CHECK(parse_design(to_string(d)) == d);
  for (Violation v : {Violation::null, Violation::mild, Violation::moderate,
                      Violation::strong})
    CHECK(parse_violation(to_string(v)) == v);
  CHECK_THROWS_AS(parse_design("nope"), input_error);
  CHECK_THROWS_AS(parse_violation("nope"), input_error);
}
