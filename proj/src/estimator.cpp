#include "shapekit/estimator.hpp"

#include <cmath>

namespace shapekit {

namespace {

double fo_residual_inf(const GramSystem& sys, double lambda,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& Kabar) {
  Eigen::VectorXd Kc = sys.K * c;
  Eigen::VectorXd lhs = sys.K * (sys.Sigma * Kc) + lambda * Kc;
  return (lhs - Kabar).cwiseAbs().maxCoeff();
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw input_error("lambda must be positive");
}

}  // namespace

FitResult fit_dense(const GramSystem& sys, double lambda) {
  check_lambda(lambda);
  const long M = sys.K.rows();
  const Eigen::VectorXd Kabar = sys.K * sys.a_bar;
  const double target = defaults::fo_tol * (1.0 + Kabar.cwiseAbs().maxCoeff());

  // Substituting u = K c turns the first-order condition into the symmetric
  // system (Sigma + lambda K^{-1}) u = a_bar.
  const double jit =
      defaults::gram_jitter * std::max(sys.K.trace(), 1.0) / double(M);
  Eigen::MatrixXd Kj = sys.K;
  Kj.diagonal().array() += jit;
  Eigen::LDLT<Eigen::MatrixXd> kfac(Kj);
  if (kfac.info() != Eigen::Success)
    throw solver_error("fit_dense: gram factorization failed");

  Eigen::MatrixXd Kinv = kfac.solve(Eigen::MatrixXd::Identity(M, M));
  Eigen::MatrixXd C2 = sys.Sigma + lambda * Kinv;
  C2 = 0.5 * (C2 + C2.transpose().eval());
  Eigen::LDLT<Eigen::MatrixXd> cfac(C2);
  if (cfac.info() != Eigen::Success)
    throw solver_error("fit_dense: reduced system factorization failed");

  Eigen::VectorXd u = cfac.solve(sys.a_bar);
  Eigen::VectorXd c = kfac.solve(u);

  // Refine against the original equation; the factored pair acts as the
  // preconditioner (K Sigma K + lambda K)^{-1} ~ K^{-1} C2^{-1} K^{-1}.
  double res = fo_residual_inf(sys, lambda, c, Kabar);
  for (int pass = 0; pass < 30 && res > target; ++pass) {
    Eigen::VectorXd Kc = sys.K * c;
    Eigen::VectorXd e = Kabar - (sys.K * (sys.Sigma * Kc) + lambda * Kc);
    Eigen::VectorXd dc = kfac.solve(cfac.solve(kfac.solve(e)));
    double prev = res;
    Eigen::VectorXd c_next = c + dc;
    double res_next = fo_residual_inf(sys, lambda, c_next, Kabar);
    if (res_next >= prev) break;  // stalled
    c = c_next;
    res = res_next;
  }
  if (res > target)
    throw solver_error("fit_dense: first-order residual did not reach tolerance"
                       " (degenerate gram matrix with tiny lambda?)");

  FitResult fit;
  fit.c_hat = c;
  fit.lambda = lambda;
  fit.path = SolvePath::dense;
  fit.rank_used = M;
  fit.active = sys.active;
  fit.fo_residual = res;
  fit.objective = objective(fit, sys);
  return fit;
}

FitResult fit_lowrank(const GramSystem& sys, const PivotedCholesky& pc,
                      double lambda) {
  check_lambda(lambda);
  const long m = pc.L.cols();
  Eigen::MatrixXd red = pc.L.transpose() * sys.Sigma * pc.L;
  red.diagonal().array() += lambda;
  red = 0.5 * (red + red.transpose().eval());
  Eigen::VectorXd rhs = pc.L.transpose() * sys.a_bar;
  Eigen::VectorXd z = solve_spd(red, rhs);

  FitResult fit;
  fit.c_hat = pc.B * z;
  fit.lambda = lambda;
  fit.path = SolvePath::lowrank;
  fit.rank_used = m;
  fit.active = sys.active;
  fit.truncated = pc.truncated;
  fit.fo_residual = fo_residual_inf(sys, lambda, fit.c_hat, sys.K * sys.a_bar);
  fit.objective = objective(fit, sys);
  return fit;
}

Eigen::VectorXd evaluate(const FitResult& fit, const Dataset& data,
                         const KernelModel& k, const MultiIndexSet& set,
                         const Eigen::MatrixXd& points, const MultiIndex& alpha) {
  if (points.cols() != set.d) throw input_error("evaluate: point dimension mismatch");
  if (total_order(alpha) > set.s)
    throw input_error("evaluate: derivative order exceeds s");
  const long N = data.X.rows();
  const int r = static_cast<int>(fit.active.size());
  if (fit.c_hat.size() != N * r)
    throw input_error("evaluate: coefficient vector does not match the dataset");

  std::vector<Eigen::VectorXd> pts(N);
  for (long i = 0; i < N; ++i) pts[i] = data.X.row(i).transpose();

  Eigen::VectorXd out = Eigen::VectorXd::Zero(points.rows());
  for (long p = 0; p < points.rows(); ++p) {
    const Eigen::VectorXd xi = points.row(p).transpose();
    double acc = 0.0;
    for (int b = 0; b < r; ++b) {
      const MultiIndex& ib = set.indices[fit.active[b]];
      for (long i = 0; i < N; ++i)
        acc += fit.c_hat[b * N + i] * eval_deriv(k, ib, alpha, pts[i], xi);
    }
    out[p] = acc;
  }
  return out;
}

double objective(const FitResult& fit, const GramSystem& sys) {
  const Eigen::VectorXd u = sys.K * fit.c_hat;
  return -u.dot(sys.a_bar) + 0.5 * u.dot(sys.Sigma * u) +
         0.5 * fit.lambda * fit.c_hat.dot(u);
}

}  // namespace shapekit
