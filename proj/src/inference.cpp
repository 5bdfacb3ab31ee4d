#include "shapekit/inference.hpp"

#include <algorithm>
#include <cmath>

#include "shapekit/linalg.hpp"
#include "shapekit/rng.hpp"

namespace shapekit {

Eigen::VectorXd theta_hat(const FitResult& fit, const GridSystem& gridsys) {
  if (gridsys.K_G.rows() != fit.c_hat.size())
    throw input_error("theta_hat: fit and grid system do not match");
  return gridsys.K_G.transpose() * fit.c_hat;
}

std::pair<Eigen::MatrixXd, OmegaWorkspace> omega_hat(const GramSystem& sys,
                                                     const GridSystem& gridsys,
                                                     const FitResult& fit,
                                                     double lambda) {
  if (!gridsys.has_h_tilde)
    throw input_error("omega_hat: grid system was built without a fit");
  if (fit.c_hat.size() != sys.K.rows())
    throw input_error("omega_hat: fit and gram system do not match");
  if (!(lambda > 0.0)) throw input_error("lambda must be positive");
  const long N = sys.N;
  const long n = gridsys.K_G.cols();
  const Eigen::VectorXd& h = gridsys.h_tilde;
  const Eigen::MatrixXd& Gt = gridsys.G_tilde;
  const Eigen::MatrixXd& GtG = gridsys.G_tilde_G;

  // Lambda = (1/N) H (lambda I + (1/N) H G H)^{-1} G~_G.
  Eigen::MatrixXd HGH = center_columns(gridsys.G);
  HGH = center_columns(HGH.transpose().eval()).transpose();
  Eigen::MatrixXd reg = HGH / double(N);
  reg.diagonal().array() += lambda;
  reg = 0.5 * (reg + reg.transpose().eval());
  Eigen::MatrixXd solved = solve_spd(reg, GtG);
  OmegaWorkspace ws;
  ws.Lambda = center_columns(solved) / double(N);

  // Row i of B pairs the i-th influence direction with each grid
  // functional; same structure against the data functionals gives V.
  const Eigen::VectorXd one_minus_h = (1.0 - h.array()).matrix();
  Eigen::RowVectorXd hGtG = h.transpose() * GtG;
  ws.Bmat = one_minus_h.asDiagonal() * GtG;
  ws.Bmat.rowwise() += hGtG / double(N);

  Eigen::MatrixXd Vrows = one_minus_h.asDiagonal() * Gt;
  Eigen::RowVectorXd hGt = h.transpose() * Gt;
  Vrows.rowwise() += hGt / double(N);
  ws.Vmat = Vrows.transpose();

  ws.Smat = (ws.Bmat - ws.Vmat.transpose() * ws.Lambda) / lambda;
  Eigen::MatrixXd omega = ws.Smat.transpose() * ws.Smat / double(N);
  omega = 0.5 * (omega + omega.transpose().eval());
  if (omega.rows() != n) throw solver_error("omega_hat: shape error");
  return {omega, ws};
}

namespace {

// Cone membership with a tolerance wide enough to absorb roundoff: the
// statistic is exactly zero there, which keeps the point mass at 0 of the
// null distribution countable.
bool in_cone(const Eigen::VectorXd& t) {
  return (t.array() >= -1e-12).all();
}

}  // namespace

WaldResult wald_statistic(const Eigen::VectorXd& theta,
                          const Eigen::MatrixXd& omega, long N,
                          Direction direction, double omega_jitter) {
  if (N < 1) throw input_error("wald_statistic: N must be >= 1");
  if (omega.rows() != theta.size() || omega.cols() != theta.size())
    throw input_error("wald_statistic: shape mismatch");
  const Eigen::VectorXd t =
      direction == Direction::nonneg ? theta : Eigen::VectorXd(-theta);

  WaldResult out;
  if (in_cone(t)) {
    out.W_N = 0.0;
    out.c_star = t.cwiseMax(0.0);
    out.residual = Eigen::VectorXd::Zero(t.size());
  } else {
    Eigen::MatrixXd R = inv_sqrt_psd(omega, omega_jitter);
    NnlsSolution sol = nnls(R, R * t);
    out.W_N = double(N) * sol.sq_norm;
    out.c_star = sol.c_star;
    out.residual = sol.residual;
  }
  if (direction == Direction::nonpos) {
    // report the projection in the cone actually tested
    out.c_star = -out.c_star;
    out.residual = -out.residual;
  }
  return out;
}

PvalueResult pvalue_mc(const Eigen::MatrixXd& omega, double W_obs, long reps,
                       std::uint64_t seed, int threads) {
  if (reps < 100) throw input_error("pvalue_mc: reps must be >= 100");
  const long n = omega.rows();
  const Eigen::MatrixXd F = sqrt_psd(omega);
  const Eigen::MatrixXd R = inv_sqrt_psd(omega);

  std::vector<double> W(reps);
  parallel_for(reps, threads, [&](long r) {
    RngStream stream(seed, {0x57A7u, static_cast<std::uint64_t>(r)});
    Eigen::VectorXd z = F * stream.normal_vector(n);
    if (in_cone(z)) {
      W[r] = 0.0;
    } else {
      W[r] = nnls(R, R * z).sq_norm;
    }
  });

  PvalueResult out;
  out.reps = reps;
  long count = 0, zeros = 0;
  for (double w : W) {
    if (w >= W_obs) ++count;
    if (w == 0.0) ++zeros;
  }
  out.p_value = double(1 + count) / double(reps + 1);
  out.frac_zero = double(zeros) / double(reps);
  std::sort(W.begin(), W.end());
  auto quantile = [&](double q) {
    long idx = std::min<long>(reps - 1, static_cast<long>(q * double(reps)));
    return W[idx];
  };
  out.q50 = quantile(0.50);
  out.q90 = quantile(0.90);
  out.q95 = quantile(0.95);
  out.q99 = quantile(0.99);
  return out;
}

std::pair<double, double> moreau_check(const Eigen::VectorXd& Z,
                                       const Eigen::MatrixXd& omega) {
  Eigen::MatrixXd R = inv_sqrt_psd(omega, 0.0);
  Eigen::VectorXd RZ = R * Z;
  Eigen::VectorXd proj = in_cone(Z) ? Z : nnls(R, RZ).c_star;
  const double lhs = RZ.squaredNorm();
  const double rhs = (R * proj).squaredNorm() + (R * (Z - proj)).squaredNorm();
  return {lhs, rhs};
}

TestReport run_shape_test(const GramSystem& sys, const GridSystem& gridsys,
                          const FitResult& fit, Direction direction,
                          long mc_reps, std::uint64_t seed,
                          const std::vector<double>& levels, int threads) {
  TestReport report;
  report.grid = gridsys.grid;
  report.alpha_test = gridsys.alpha_test;
  report.direction = direction;
  report.theta_hat = theta_hat(fit, gridsys);
  auto [omega, ws] = omega_hat(sys, gridsys, fit, fit.lambda);
  report.omega_hat = omega;
  WaldResult wald = wald_statistic(report.theta_hat, omega, sys.N, direction);
  report.W_N = wald.W_N;
  report.c_star = wald.c_star;
  report.mc_reps = mc_reps;
  report.seed = seed;
  report.p_value = pvalue_mc(omega, wald.W_N, mc_reps, seed, threads).p_value;
  for (double level : levels)
    report.decision_at[level] = (report.p_value <= level);
  return report;
}

}  // namespace shapekit
