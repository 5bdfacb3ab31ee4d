#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include <Eigen/Dense>

#include "shapekit/assembly.hpp"
#include "shapekit/estimator.hpp"

namespace shapekit {

enum class Direction { nonneg, nonpos };

struct TestReport {
  Eigen::MatrixXd grid;
  MultiIndex alpha_test;
  Direction direction = Direction::nonneg;
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd omega_hat;
  double W_N = 0.0;
  Eigen::VectorXd c_star;
  double p_value = 1.0;
  long mc_reps = 0;
  std::uint64_t seed = 0;
  std::map<double, bool> decision_at;  // level -> reject?
};

// Intermediate matrices of the covariance pipeline, kept for inspection:
// Smat = (1/lambda) (Bmat - Vmat^T Lambda) and omega = (1/N) S^T S.
// Vmat is stored so that Vmat(m, i) is the pairing of the i-th influence
// function with the m-th data functional.
struct OmegaWorkspace {
  Eigen::MatrixXd Lambda;  // N x n
  Eigen::MatrixXd Bmat;    // N x n
  Eigen::MatrixXd Vmat;    // N x N
  Eigen::MatrixXd Smat;    // N x n
};

Eigen::VectorXd theta_hat(const FitResult& fit, const GridSystem& gridsys);

std::pair<Eigen::MatrixXd, OmegaWorkspace> omega_hat(const GramSystem& sys,
                                                     const GridSystem& gridsys,
                                                     const FitResult& fit,
                                                     double lambda);

struct WaldResult {
  double W_N = 0.0;
  Eigen::VectorXd c_star;
  Eigen::VectorXd residual;
};

// W_N = N * min_{c >= 0} (c - theta)' omega^{-1} (c - theta), with the
// direction handled by flipping the sign of theta.  Snaps to exactly zero
// when the (signed) theta already lies in the cone.  c_star is reported in
// the tested cone, so it is nonpositive for Direction::nonpos.
WaldResult wald_statistic(const Eigen::VectorXd& theta,
                          const Eigen::MatrixXd& omega, long N,
                          Direction direction,
                          double omega_jitter = defaults::omega_jitter);

struct PvalueResult {
  double p_value = 1.0;
  long reps = 0;
  double frac_zero = 0.0;  // share of null draws with W_r exactly 0
  double q50 = 0.0, q90 = 0.0, q95 = 0.0, q99 = 0.0;
};

// Monte Carlo p-value at the least favorable null: Z_r ~ N(0, omega),
// W_r = min_{u >= 0} (Z_r - u)' omega^{-1} (Z_r - u) (no N factor), and
// p = (1 + #{W_r >= W_obs}) / (reps + 1).
PvalueResult pvalue_mc(const Eigen::MatrixXd& omega, double W_obs, long reps,
                       std::uint64_t seed, int threads = 1);

// Both sides of the conic Pythagoras identity in the omega^{-1} metric:
// Z' omega^{-1} Z  vs  ||proj(Z)||^2 + ||Z - proj(Z)||^2.
std::pair<double, double> moreau_check(const Eigen::VectorXd& Z,
                                       const Eigen::MatrixXd& omega);

// End-to-end test driver shared by the CLI and the bindings.
TestReport run_shape_test(const GramSystem& sys, const GridSystem& gridsys,
                          const FitResult& fit, Direction direction,
                          long mc_reps, std::uint64_t seed,
                          const std::vector<double>& levels, int threads = 1);

}  // namespace shapekit
