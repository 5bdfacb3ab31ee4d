#include "shapekit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace shapekit {

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& K, double rank_tol,
                                 long max_rank) {
  const long M = K.rows();
  if (K.cols() != M) throw input_error("pivoted_cholesky: matrix not square");
  Eigen::VectorXd diag = K.diagonal();
  const double trace = diag.sum();
  const double tol = rank_tol * trace;
  const double neg_floor = -defaults::tol_psd * std::max(trace, 1.0);
  const long cap = std::min<long>(M, std::max<long>(1, max_rank));
  if (diag.minCoeff() < neg_floor)
    throw solver_error("pivoted_cholesky: negative diagonal, matrix not PSD");

  PivotedCholesky pc;
  pc.L.resize(M, cap);
  pc.trace_residual = trace;

  long m = 0;
  while (m < cap && pc.trace_residual > tol) {
    long piv = 0;
    diag.maxCoeff(&piv);
    const double dmax = diag[piv];
    if (dmax <= 0.0) {
      if (dmax < neg_floor)
        throw solver_error("pivoted_cholesky: negative pivot, matrix not PSD");
      break;  // residual is numerically zero
    }
    // New column: (K e_piv - L_prev L_prev(piv,:)^T) / sqrt(dmax).
    Eigen::VectorXd col = K.col(piv);
    if (m > 0)
      col.noalias() -= pc.L.leftCols(m) * pc.L.row(piv).head(m).transpose();
    col /= std::sqrt(dmax);
    pc.L.col(m) = col;
    pc.pivots.push_back(piv);
    diag -= col.cwiseProduct(col);
    diag[piv] = 0.0;  // exact by construction
    if (diag.minCoeff() < neg_floor)
      throw solver_error("pivoted_cholesky: negative pivot, matrix not PSD");
    pc.trace_residual = std::max(0.0, diag.sum());
    ++m;
  }
  pc.L.conservativeResize(M, m);
  pc.truncated = (pc.trace_residual > tol);

  // Biorthogonal factor from the pivot block: T = L(pivots, :) is lower
  // triangular in pivot order, and scattering the rows of T^{-T} back to
  // the pivot positions gives B with B^T L = I_m exactly.
  Eigen::MatrixXd T(m, m);
  for (long r = 0; r < m; ++r) T.row(r) = pc.L.row(pc.pivots[r]).head(m);
  Eigen::MatrixXd Tinv_t = T.triangularView<Eigen::Lower>()
                               .transpose()
                               .solve(Eigen::MatrixXd::Identity(m, m));
  pc.B = Eigen::MatrixXd::Zero(M, m);
  for (long r = 0; r < m; ++r) pc.B.row(pc.pivots[r]) = Tinv_t.row(r);
  return pc;
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& M, const Eigen::MatrixXd& rhs) {
  if (M.rows() != M.cols() || M.rows() != rhs.rows())
    throw input_error("solve_spd: shape mismatch");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success)
    throw solver_error("solve_spd: factorization failed");
  Eigen::MatrixXd x = ldlt.solve(rhs);
  const double target = 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff());
  for (int pass = 0; pass < 5; ++pass) {
    Eigen::MatrixXd res = rhs - M * x;
    if (res.cwiseAbs().maxCoeff() <= target) return x;
    x += ldlt.solve(res);
  }
  Eigen::MatrixXd res = rhs - M * x;
  if (res.cwiseAbs().maxCoeff() > target)
    throw solver_error("solve_spd: residual did not converge (matrix near-singular?)");
  return x;
}

Eigen::MatrixXd inv_sqrt_psd(const Eigen::MatrixXd& M, double jitter) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw solver_error("inv_sqrt_psd: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double max_eig = ev.maxCoeff();
  if (max_eig <= 0.0)
    throw degenerate_error("inv_sqrt_psd: no positive eigenvalues");
  const double floor = jitter * max_eig;
  Eigen::VectorXd inv_root(ev.size());
  for (long i = 0; i < ev.size(); ++i)
    inv_root[i] = 1.0 / std::sqrt(std::max(ev[i], floor));
  return es.eigenvectors() * inv_root.asDiagonal() *
         es.eigenvectors().transpose();
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw solver_error("sqrt_psd: eigendecomposition failed");
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

NnlsSolution nnls(const Eigen::MatrixXd& D, const Eigen::VectorXd& b,
                  double kkt_tol) {
  const long n = D.cols();
  if (D.rows() != b.size()) throw input_error("nnls: shape mismatch");
  const long max_iter = 10 * std::max<long>(n, 1);

  NnlsSolution sol;
  sol.c_star = Eigen::VectorXd::Zero(n);
  std::vector<long> passive;  // indices allowed to be positive
  std::vector<bool> in_passive(n, false);

  Eigen::VectorXd resid = -b;  // D c - b at c = 0
  long iter = 0;
  while (true) {
    // Most negative gradient coordinate among the clamped ones.
    Eigen::VectorXd grad = D.transpose() * resid;
    long best = -1;
    double best_g = -kkt_tol;
    for (long i = 0; i < n; ++i) {
      if (!in_passive[i] && grad[i] < best_g) {
        best_g = grad[i];
        best = i;
      }
    }
    if (best < 0) break;  // KKT satisfied
    if (++iter > max_iter)
      throw solver_error("nnls: iteration cap exceeded (degenerate system)");
    passive.push_back(best);
    in_passive[best] = true;

    // Inner loop: unconstrained solve on the passive set, stepping back
    // whenever a passive coordinate would go negative.
    while (true) {
      const long p = static_cast<long>(passive.size());
      if (p == 0) break;  // everything stepped back to the boundary
      Eigen::MatrixXd Dp(D.rows(), p);
      for (long j = 0; j < p; ++j) Dp.col(j) = D.col(passive[j]);
      Eigen::VectorXd z = Dp.colPivHouseholderQr().solve(b);
      if (p > 0 && z.minCoeff() > 0.0) {
        sol.c_star.setZero();
        for (long j = 0; j < p; ++j) sol.c_star[passive[j]] = z[j];
        break;
      }
      double alpha = 1.0;
      for (long j = 0; j < p; ++j) {
        if (z[j] <= 0.0) {
          const double xj = sol.c_star[passive[j]];
          alpha = std::min(alpha, xj / (xj - z[j]));
        }
      }
      for (long j = 0; j < p; ++j) {
        const long idx = passive[j];
        sol.c_star[idx] += alpha * (z[j] - sol.c_star[idx]);
      }
      // Remove coordinates driven (numerically) to the boundary.
      std::vector<long> keep;
      for (long j = 0; j < p; ++j) {
        const long idx = passive[j];
        if (sol.c_star[idx] > 1e-14) {
          keep.push_back(idx);
        } else {
          sol.c_star[idx] = 0.0;
          in_passive[idx] = false;
        }
      }
      passive = std::move(keep);
      if (++iter > max_iter)
        throw solver_error("nnls: iteration cap exceeded (degenerate system)");
    }
    resid = D * sol.c_star - b;
  }
  sol.residual = resid;
  sol.sq_norm = resid.squaredNorm();
  sol.iterations = iter;
  return sol;
}

}  // namespace shapekit
