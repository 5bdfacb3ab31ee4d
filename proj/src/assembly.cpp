#include "shapekit/assembly.hpp"

#include <cmath>

#include "shapekit/estimator.hpp"

namespace shapekit {

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& X) {
  return X.rowwise() - X.colwise().mean();
}

Eigen::VectorXd center(const Eigen::VectorXd& v) {
  return v.array() - v.mean();
}

namespace {

void check_dataset(const Dataset& data, const MultiIndexSet& set) {
  const long N = data.X.rows();
  if (N < 1) throw input_error("dataset is empty");
  if (data.X.cols() != set.d)
    throw input_error("dataset dimension does not match the multi-index set");
  if (data.W.rows() != N || data.W.cols() != set.m())
    throw input_error("weight matrix must be N x m_s");
  if (!data.X.allFinite() || !data.W.allFinite())
    throw input_error("dataset contains non-finite values");
  if (data.Y && (data.Y->size() != N || !data.Y->allFinite()))
    throw input_error("response must be a finite length-N vector");
}

}  // namespace

GramSystem build_gram(const Dataset& data, const KernelModel& k,
                      const MultiIndexSet& set, const ActiveSet& active) {
  check_dataset(data, set);
  if (active.count() < 1) throw input_error("active set is empty");
  for (int p : active.positions)
    if (p < 0 || p >= set.m())
      throw input_error("active set position out of range");

  const long N = data.X.rows();
  const int r = active.count();
  const long M = N * r;

  std::vector<Eigen::VectorXd> pts(N);
  for (long i = 0; i < N; ++i) pts[i] = data.X.row(i).transpose();

  GramSystem sys;
  sys.N = N;
  sys.active = active.positions;
  sys.K.resize(M, M);
  for (int a = 0; a < r; ++a) {
    const MultiIndex& ia = set.indices[active.positions[a]];
    for (int b = a; b < r; ++b) {
      const MultiIndex& ib = set.indices[active.positions[b]];
      for (long i = 0; i < N; ++i) {
        for (long j = 0; j < N; ++j) {
          const double v = eval_deriv(k, ia, ib, pts[i], pts[j]);
          sys.K(a * N + i, b * N + j) = v;
          sys.K(b * N + j, a * N + i) = v;
        }
      }
    }
  }

  // PSD validation; jitter the diagonal only if roundoff pushed an
  // eigenvalue below the tolerance band, and never silently.
  const double trace = sys.K.trace();
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.K,
                                                      Eigen::EigenvaluesOnly);
    const double floor = -defaults::tol_psd * std::max(trace, 1.0) / double(M);
    if (es.eigenvalues().minCoeff() < floor) {
      const double jit = defaults::gram_jitter * std::max(trace, 1.0) / double(M);
      sys.K.diagonal().array() += jit;
      sys.jitter_applied = jit;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sys.K,
                                                         Eigen::EigenvaluesOnly);
      if (es2.eigenvalues().minCoeff() < floor)
        throw solver_error(
            "gram matrix failed the PSD check beyond jitter repair "
            "(duplicated points or bad lengthscale?)");
    }
  }

  sys.A = Eigen::MatrixXd::Zero(M, N);
  for (int a = 0; a < r; ++a)
    for (long i = 0; i < N; ++i)
      sys.A(a * N + i, i) = data.W(i, active.positions[a]);

  sys.a_bar = sys.A.rowwise().mean();
  const Eigen::MatrixXd Ac = sys.A.colwise() - sys.a_bar;
  sys.Sigma = (Ac * Ac.transpose()) / double(N);
  return sys;
}

GridSystem build_grid(const Dataset& data, const KernelModel& k,
                      const MultiIndexSet& set, const GramSystem& sys,
                      const std::optional<FitResult>& fit,
                      const Eigen::MatrixXd& grid, const MultiIndex& alpha_test) {
  check_dataset(data, set);
  if (grid.rows() < 1) throw input_error("grid is empty");
  if (grid.cols() != set.d) throw input_error("grid dimension mismatch");
  if (static_cast<int>(alpha_test.size()) != set.d)
    throw input_error("alpha_test dimension mismatch");
  if (total_order(alpha_test) > set.s)
    throw input_error("alpha_test order exceeds s");

  const long N = sys.N;
  const long n = grid.rows();
  const int r = static_cast<int>(sys.active.size());
  const long M = N * r;

  std::vector<Eigen::VectorXd> pts(N), gpts(n);
  for (long i = 0; i < N; ++i) pts[i] = data.X.row(i).transpose();
  for (long j = 0; j < n; ++j) gpts[j] = grid.row(j).transpose();

  GridSystem gs;
  gs.grid = grid;
  gs.alpha_test = alpha_test;
  gs.K_G.resize(M, n);
  for (int b = 0; b < r; ++b) {
    const MultiIndex& ib = set.indices[sys.active[b]];
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < n; ++j)
        gs.K_G(b * N + i, j) = eval_deriv(k, ib, alpha_test, pts[i], gpts[j]);
  }

  gs.G = sys.A.transpose() * sys.K * sys.A;
  gs.G = 0.5 * (gs.G + gs.G.transpose().eval());
  gs.G_tilde = center_columns(gs.G);
  gs.G_tilde_G = center_columns(sys.A.transpose() * gs.K_G);
  if (fit) {
    gs.h_tilde = center(sys.A.transpose() * (sys.K * fit->c_hat));
    gs.has_h_tilde = true;
  }
  return gs;
}

}  // namespace shapekit
