#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "shapekit/common.hpp"
#include "shapekit/linalg.hpp"
#include "shapekit/rng.hpp"

using namespace shapekit;

namespace {

Eigen::MatrixXd random_psd(long n, long rank, RngStream& stream) {
  Eigen::MatrixXd F(n, rank);
  for (long j = 0; j < rank; ++j)
    for (long i = 0; i < n; ++i) F(i, j) = stream.normal();
  return F * F.transpose();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Plain conjugate gradient, used as an independent solve oracle.
Eigen::VectorXd cg_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b, p = b;
  double rs = r.squaredNorm();
  for (long it = 0; it < 20 * b.size(); ++it) {
    Eigen::VectorXd Ap = A * p;
    const double alpha = rs / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    const double rs_next = r.squaredNorm();
    if (std::sqrt(rs_next) < 1e-13 * (1.0 + b.norm())) break;
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return x;
}

}  // namespace

TEST_CASE("pivoted cholesky on pinned matrices") {
  Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
  PivotedCholesky pc = pivoted_cholesky(I2);
  CHECK(pc.L.cols() == 2);
  CHECK(pc.trace_residual == doctest::Approx(0.0));
  CHECK(max_abs(pc.L * pc.L.transpose() - I2) <= 1e-14);

  Eigen::MatrixXd ones(2, 2);
  ones << 1, 1, 1, 1;
  pc = pivoted_cholesky(ones);
  CHECK(pc.L.cols() == 1);
  CHECK(pc.trace_residual <= 1e-14);
  CHECK(max_abs(pc.L * pc.L.transpose() - ones) <= 1e-14);

  Eigen::MatrixXd K(2, 2);
  K << 4, 2, 2, 2;
  pc = pivoted_cholesky(K);
  REQUIRE(pc.pivots.size() == 2);
  CHECK(pc.pivots[0] == 0);
  CHECK(pc.L(0, 0) == doctest::Approx(2.0));
  CHECK(pc.L(1, 0) == doctest::Approx(1.0));
  CHECK(pc.L(1, 1) == doctest::Approx(1.0));
  CHECK(max_abs(pc.L * pc.L.transpose() - K) <= 1e-14);
}

TEST_CASE("pivoted cholesky reconstruction and biorthogonality") {
  RngStream stream(3, {0x10u});
  for (long n : {5L, 40L, 200L}) {
    Eigen::MatrixXd K = random_psd(n, n + 3, stream);
    PivotedCholesky pc = pivoted_cholesky(K);
    CHECK(pc.L.cols() == n);  // full rank
    CHECK(!pc.truncated);
    CHECK(max_abs(pc.L * pc.L.transpose() - K) <= 1e-8 * K.trace());
    Eigen::MatrixXd BtL = pc.B.transpose() * pc.L;
    CHECK(max_abs(BtL - Eigen::MatrixXd::Identity(n, n)) <= 1e-8);
  }
}

TEST_CASE("pivoted cholesky on rank-deficient input") {
  RngStream stream(5, {0x11u});
  const long n = 30, r = 7;
  Eigen::MatrixXd K = random_psd(n, r, stream);
  PivotedCholesky pc = pivoted_cholesky(K);
  CHECK(pc.L.cols() == r);
  CHECK(pc.trace_residual <= defaults::rank_tol * K.trace());
  CHECK(!pc.truncated);
  // K B = L when the numerical rank is at least m.
  CHECK(max_abs(K * pc.B - pc.L) <= 1e-6 * std::max(1.0, max_abs(pc.L)));
  Eigen::MatrixXd BtL = pc.B.transpose() * pc.L;
  CHECK(max_abs(BtL - Eigen::MatrixXd::Identity(r, r)) <= 1e-8);
}

TEST_CASE("residual decreases with rank and truncation is flagged") {
  RngStream stream(7, {0x12u});
  const long n = 12;
  Eigen::MatrixXd K = random_psd(n, n, stream);
  double prev = K.trace();
  for (long cap = 1; cap <= n; ++cap) {
    PivotedCholesky pc = pivoted_cholesky(K, defaults::rank_tol, cap);
    CHECK(pc.trace_residual <= prev + 1e-12);
    prev = pc.trace_residual;
  }
  PivotedCholesky trunc = pivoted_cholesky(K, defaults::rank_tol, 3);
  CHECK(trunc.truncated);
  CHECK(trunc.L.cols() == 3);
}

TEST_CASE("pivoted cholesky rejects indefinite matrices") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(pivoted_cholesky(bad), solver_error);
  // positive diagonal but indefinite: caught once a residual goes negative
  Eigen::MatrixXd hidden(2, 2);
  hidden << 1, 2, 2, 1;
  CHECK_THROWS_AS(pivoted_cholesky(hidden), solver_error);
}

TEST_CASE("spd solve") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd rhs(3);
  rhs << 1, 2, 3;
  CHECK(max_abs(solve_spd(I, rhs) - rhs) <= 1e-14);

  Eigen::MatrixXd D = Eigen::Vector2d(2, 4).asDiagonal();
  Eigen::VectorXd b(2);
  b << 2, 4;
  Eigen::VectorXd x = solve_spd(D, b);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  RngStream stream(9, {0x13u});
  for (int c = 0; c < 10; ++c) {
    Eigen::MatrixXd A = random_psd(8, 12, stream);
    A.diagonal().array() += 0.5;
    Eigen::VectorXd r = stream.normal_vector(8);
    CHECK((solve_spd(A, r) - cg_solve(A, r)).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("inverse square root") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  CHECK(max_abs(inv_sqrt_psd(I, 0.0) - I) <= 1e-12);

  Eigen::MatrixXd D = Eigen::Vector2d(4, 1).asDiagonal();
  Eigen::MatrixXd R = inv_sqrt_psd(D, 0.0);
  CHECK(R(0, 0) == doctest::Approx(0.5));
  CHECK(R(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(R(0, 1)) <= 1e-14);

  RngStream stream(11, {0x14u});
  for (int c = 0; c < 10; ++c) {
    Eigen::MatrixXd M = random_psd(6, 9, stream);
    M.diagonal().array() += 0.3;
    Eigen::MatrixXd Ri = inv_sqrt_psd(M, 1e-12);
    CHECK(max_abs(Ri * M * Ri.transpose() - Eigen::MatrixXd::Identity(6, 6)) <=
          1e-8);
  }

  Eigen::MatrixXd neg = -I;
  CHECK_THROWS_AS(inv_sqrt_psd(neg, 1e-10), degenerate_error);
}

TEST_CASE("nnls pinned cases") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b(2);
  b << 2, 3;
  NnlsSolution s = nnls(I, b);
  CHECK(max_abs(s.c_star - b) <= 1e-12);
  CHECK(s.sq_norm <= 1e-14);

  b << 1, -1;
  s = nnls(I, b);
  CHECK(s.c_star[0] == doctest::Approx(1.0));
  CHECK(s.c_star[1] == doctest::Approx(0.0));
  CHECK(s.sq_norm == doctest::Approx(1.0));
}

TEST_CASE("nnls matches brute-force enumeration") {
  RngStream stream(13, {0x15u});
  for (int inst = 0; inst < 100; ++inst) {
    const long n = 3;
    Eigen::MatrixXd D(n, n);
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) D(i, j) = stream.normal();
    D += 2.0 * Eigen::MatrixXd::Identity(n, n);  // keep D well-conditioned
    Eigen::VectorXd b = 2.0 * stream.normal_vector(n);

    NnlsSolution s = nnls(D, b);
    // exhaustive search over all active sets
    double best = b.squaredNorm();  // all coordinates clamped to zero
    for (long mask = 1; mask < (1L << n); ++mask) {
      std::vector<long> idx;
      for (long i = 0; i < n; ++i)
        if (mask & (1L << i)) idx.push_back(i);
      Eigen::MatrixXd Dsub(n, idx.size());
      for (size_t q = 0; q < idx.size(); ++q) Dsub.col(q) = D.col(idx[q]);
      Eigen::VectorXd csub =
          (Dsub.transpose() * Dsub).ldlt().solve(Dsub.transpose() * b);
      if ((csub.array() < 0.0).any()) continue;
      best = std::min(best, (Dsub * csub - b).squaredNorm());
    }
    CHECK(std::abs(s.sq_norm - best) <= 1e-9);

    // KKT conditions at the reported solution
    Eigen::VectorXd grad = D.transpose() * (D * s.c_star - b);
    for (long i = 0; i < n; ++i) {
      if (s.c_star[i] > 0.0) {
        CHECK(std::abs(grad[i]) <= 1e-8);
      } else {
        CHECK(grad[i] >= -1e-8);
      }
    }
  }
}

TEST_CASE("nnls objective dominance") {
  RngStream stream(17, {0x16u});
  for (int inst = 0; inst < 20; ++inst) {
    const long n = 4;
    Eigen::MatrixXd D(n, n);
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) D(i, j) = stream.normal();
    D += 2.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = stream.normal_vector(n);
    NnlsSolution s = nnls(D, b);
    CHECK((s.c_star.array() >= 0.0).all());
    CHECK(s.sq_norm <= b.squaredNorm() + 1e-12);
    Eigen::VectorXd clip = b.cwiseMax(0.0);
    CHECK(s.sq_norm <= (D * clip - b).squaredNorm() + 1e-12);
  }
}
