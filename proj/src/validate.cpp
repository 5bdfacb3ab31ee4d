#include "shapekit/validate.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "shapekit/assembly.hpp"
#include "shapekit/estimator.hpp"
#include "shapekit/inference.hpp"
#include "shapekit/linalg.hpp"
#include "shapekit/rng.hpp"

namespace shapekit {

namespace {

std::string pass_detail(double worst, double tol) {
  std::ostringstream os;
  os << "worst " << worst << " vs tol " << tol;
  return os.str();
}

Eigen::MatrixXd random_orthogonal(long n, RngStream& stream) {
  Eigen::MatrixXd Z(n, n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) Z(i, j) = stream.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd rdiag = qr.matrixQR().diagonal();
  for (long j = 0; j < n; ++j)
    if (rdiag[j] < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

Eigen::MatrixXd random_pd(long n, double eig_lo, double eig_hi,
                          RngStream& stream) {
  Eigen::MatrixXd Q = random_orthogonal(n, stream);
  Eigen::VectorXd eigs(n);
  for (long i = 0; i < n; ++i)
    eigs[i] = eig_lo + (eig_hi - eig_lo) * stream.uniform();
  return Q * eigs.asDiagonal() * Q.transpose();
}

MultiIndex random_index(const MultiIndexSet& set, int min_order,
                        RngStream& stream) {
  std::vector<int> candidates;
  for (int p = 0; p < set.m(); ++p)
    if (total_order(set.indices[p]) >= min_order) candidates.push_back(p);
  const int pick = static_cast<int>(stream.below(candidates.size()));
  return set.indices[candidates[pick]];
}

// Central finite difference of a multivariate function, one derivative
// order peeled per recursion step.
double central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& x, MultiIndex alpha, double step) {
  for (size_t t = 0; t < alpha.size(); ++t) {
    if (alpha[t] > 0) {
      alpha[t] -= 1;
      Eigen::VectorXd xp = x, xm = x;
      xp[t] += step;
      xm[t] -= step;
      return (central_diff(f, xp, alpha, step) -
              central_diff(f, xm, alpha, step)) /
             (2.0 * step);
    }
  }
  return f(x);
}

struct RandomInstance {
  Dataset data;
  KernelModel kernel;
  MultiIndexSet set;
  GramSystem sys;
};

RandomInstance make_instance(int d, int s, long N, RngStream& stream) {
  RandomInstance inst;
  inst.set = enumerate(d, s);
  inst.data.X.resize(N, d);
  for (long i = 0; i < N; ++i)
    for (int t = 0; t < d; ++t) inst.data.X(i, t) = 2.0 * stream.uniform();
  inst.data.W.resize(N, inst.set.m());
  for (long i = 0; i < N; ++i)
    for (int a = 0; a < inst.set.m(); ++a) inst.data.W(i, a) = stream.normal();
  inst.kernel = gaussian_kernel(0.7 + stream.uniform(), d);
  inst.sys = build_gram(inst.data, inst.kernel, inst.set,
                        ActiveSet::all(inst.set));
  return inst;
}

}  // namespace

OracleResult validate_kernel_fd(std::uint64_t seed, int checks) {
  OracleResult res{"kernel_fd", false, ""};
  const double tol = 1e-4;
  double worst = 0.0;
  RngStream stream(seed, {0xFD01u});
  for (int c = 0; c < checks; ++c) {
    const int d = 1 + static_cast<int>(stream.below(3));
    MultiIndexSet set = enumerate(d, 2);
    const MultiIndex a = set.indices[stream.below(set.m())];
    const MultiIndex b = set.indices[stream.below(set.m())];
    Eigen::VectorXd x(d), y(d);
    for (int t = 0; t < d; ++t) {
      x[t] = 2.0 * stream.uniform() - 1.0;
      y[t] = 2.0 * stream.uniform() - 1.0;
    }
    KernelModel k = gaussian_kernel(0.6 + 1.2 * stream.uniform(), d);
    worst = std::max(worst, fd_check(k, a, b, x, y, 1e-3).rel_err);
  }
  // The convexity workhorse deserves a pinned case.
  {
    KernelModel k = gaussian_kernel(1.0, 1);
    Eigen::VectorXd x(1), y(1);
    x << 0.37;
    y << -0.41;
    worst = std::max(worst, fd_check(k, {2}, {2}, x, y, 1e-3).rel_err);
  }
  res.pass = worst <= tol;
  res.detail = pass_detail(worst, tol);
  return res;
}

OracleResult validate_derivative_reproducing(std::uint64_t seed, int fits) {
  OracleResult res{"derivative_reproducing", false, ""};
  const double tol = 1e-4;
  double worst = 0.0;
  RngStream stream(seed, {0xDE01u});
  for (int f = 0; f < fits; ++f) {
    const int d = 1 + static_cast<int>(stream.below(2));
    const long N = 4 + static_cast<long>(stream.below(6));
    RandomInstance inst = make_instance(d, 2, N, stream);
    const double lambda = 0.05 + 0.5 * stream.uniform();
    FitResult fit = fit_dense(inst.sys, lambda);

    auto h0 = [&](const Eigen::VectorXd& p) {
      Eigen::MatrixXd pts = p.transpose();
      return evaluate(fit, inst.data, inst.kernel, inst.set, pts,
                      MultiIndex(d, 0))[0];
    };
    const MultiIndex alpha = random_index(inst.set, 1, stream);
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::VectorXd p(d);
      for (int t = 0; t < d; ++t) p[t] = 2.0 * stream.uniform();
      Eigen::MatrixXd pts = p.transpose();
      const double analytic =
          evaluate(fit, inst.data, inst.kernel, inst.set, pts, alpha)[0];
      const double numeric = central_diff(h0, p, alpha, 1e-3);
      const double rel =
          std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
      worst = std::max(worst, rel);
    }
  }
  res.pass = worst <= tol;
  res.detail = pass_detail(worst, tol);
  return res;
}

OracleResult validate_dense_vs_lowrank(std::uint64_t seed, int instances) {
  OracleResult res{"dense_vs_lowrank", false, ""};
  const double tol = 1e-6;
  double worst = 0.0;
  RngStream stream(seed, {0xD103u});
  for (int c = 0; c < instances; ++c) {
    const int s = static_cast<int>(stream.below(3));
    const long N = 3 + static_cast<long>(stream.below(28));
    RandomInstance inst = make_instance(1, s, N, stream);
    const double lambda = 0.02 + stream.uniform();

    const long n = 3 + static_cast<long>(stream.below(3));
    Eigen::MatrixXd grid(n, 1);
    for (long j = 0; j < n; ++j) grid(j, 0) = 2.0 * stream.uniform();
    const MultiIndex alpha = inst.set.indices[stream.below(inst.set.m())];

    FitResult dense = fit_dense(inst.sys, lambda);
    PivotedCholesky pc = pivoted_cholesky(inst.sys.K);
    FitResult lowrank = fit_lowrank(inst.sys, pc, lambda);

    GridSystem gd = build_grid(inst.data, inst.kernel, inst.set, inst.sys,
                               dense, grid, alpha);
    const Eigen::VectorXd th_dense = theta_hat(dense, gd);
    const Eigen::VectorXd th_lowrank = theta_hat(lowrank, gd);
    worst = std::max(worst, (th_dense - th_lowrank).cwiseAbs().maxCoeff());
  }

  // Compression on smooth data: equispaced points, generous lengthscale.
  bool compressed = false;
  long m_seen = 0, M_seen = 0;
  {
    const long N = 25;
    MultiIndexSet set = enumerate(1, 2);
    Dataset data;
    data.X.resize(N, 1);
    for (long i = 0; i < N; ++i) data.X(i, 0) = double(i) / double(N - 1);
    data.W = Eigen::MatrixXd::Ones(N, set.m());
    KernelModel k = gaussian_kernel(1.0, 1);
    GramSystem sys = build_gram(data, k, set, ActiveSet::all(set));
    PivotedCholesky pc = pivoted_cholesky(sys.K, 1e-6);
    m_seen = pc.L.cols();
    M_seen = sys.K.rows();
    compressed = m_seen < M_seen;
  }

  res.pass = worst <= tol && compressed;
  std::ostringstream os;
  os << pass_detail(worst, tol) << "; compression m=" << m_seen << " < M="
     << M_seen << (compressed ? "" : " FAILED");
  res.detail = os.str();
  return res;
}

OracleResult validate_nnls_bruteforce(std::uint64_t seed, int instances) {
  OracleResult res{"nnls_bruteforce", false, ""};
  const double tol = 1e-9;
  double worst = 0.0;
  RngStream stream(seed, {0xB45Eu});
  for (int c = 0; c < instances; ++c) {
    const long n = 2 + static_cast<long>(stream.below(2));
    const long N = 1 + static_cast<long>(stream.below(50));
    Eigen::MatrixXd omega = random_pd(n, 0.3, 3.0, stream);
    Eigen::VectorXd theta = 2.0 * stream.normal_vector(n);

    WaldResult wald = wald_statistic(theta, omega, N, Direction::nonneg);

    // Exhaustive KKT enumeration: clamp each subset to zero, solve the
    // unconstrained remainder, keep the best feasible candidate.
    const Eigen::MatrixXd P = omega.inverse();
    double best = double(N) * theta.dot(P * theta);  // every coordinate clamped
    for (long mask = 1; mask < (1L << n); ++mask) {
      std::vector<long> freeset;
      for (long i = 0; i < n; ++i)
        if (mask & (1L << i)) freeset.push_back(i);
      const long f = static_cast<long>(freeset.size());
      Eigen::MatrixXd Pff(f, f);
      Eigen::VectorXd rhs(f);
      for (long r = 0; r < f; ++r) {
        rhs[r] = (P * theta)[freeset[r]];
        for (long q = 0; q < f; ++q) Pff(r, q) = P(freeset[r], freeset[q]);
      }
      Eigen::VectorXd cf = Pff.ldlt().solve(rhs);
      if ((cf.array() < 0.0).any()) continue;
      Eigen::VectorXd cfull = Eigen::VectorXd::Zero(n);
      for (long r = 0; r < f; ++r) cfull[freeset[r]] = cf[r];
      const Eigen::VectorXd diff = cfull - theta;
      best = std::min(best, double(N) * diff.dot(P * diff));
    }
    worst = std::max(worst, std::abs(best - wald.W_N));
  }
  res.pass = worst <= tol;
  res.detail = pass_detail(worst, tol);
  return res;
}

namespace {

// Explicit feature map of the quadratic polynomial kernel (1 + x'y)^2:
// monomial components with multinomial scaling, so phi(x)'phi(y)
// reproduces the kernel exactly and derivatives act per component.
struct PolyFeatures {
  int d = 0;
  std::vector<double> coeff;
  std::vector<MultiIndex> expo;

  explicit PolyFeatures(int dim) : d(dim) {
    coeff.push_back(1.0);
    expo.push_back(MultiIndex(d, 0));
    const double r2 = std::sqrt(2.0);
    for (int t = 0; t < d; ++t) {
      MultiIndex e(d, 0);
      e[t] = 1;
      coeff.push_back(r2);
      expo.push_back(e);
    }
    for (int t = 0; t < d; ++t) {
      MultiIndex e(d, 0);
      e[t] = 2;
      coeff.push_back(1.0);
      expo.push_back(e);
    }
    for (int t = 0; t < d; ++t) {
      for (int u = t + 1; u < d; ++u) {
        MultiIndex e(d, 0);
        e[t] = 1;
        e[u] = 1;
        coeff.push_back(r2);
        expo.push_back(e);
      }
    }
  }

  long p() const { return static_cast<long>(coeff.size()); }

  Eigen::VectorXd deriv(const Eigen::VectorXd& x, const MultiIndex& alpha) const {
    Eigen::VectorXd out(p());
    for (long c = 0; c < p(); ++c) {
      double v = coeff[c];
      for (int t = 0; t < d && v != 0.0; ++t) {
        const int pe = expo[c][t], al = alpha[t];
        if (al > pe) {
          v = 0.0;
          break;
        }
        for (int j = 0; j < al; ++j) v *= double(pe - j);
        v *= std::pow(x[t], pe - al);
      }
      out[c] = v;
    }
    return out;
  }
};

double omega_explicit_case(int d, long N, long n, double lambda,
                           RngStream& stream) {
  const PolyFeatures feat(d);
  const MultiIndexSet set = enumerate(d, 2);
  const int r = set.m();
  const long M = N * r;

  Eigen::MatrixXd X(N, d), grid(n, d), W(N, r);
  for (long i = 0; i < N; ++i)
    for (int t = 0; t < d; ++t) X(i, t) = 2.0 * stream.uniform() - 1.0;
  for (long j = 0; j < n; ++j)
    for (int t = 0; t < d; ++t) grid(j, t) = 2.0 * stream.uniform() - 1.0;
  for (long i = 0; i < N; ++i)
    for (int a = 0; a < r; ++a) W(i, a) = stream.normal();

  MultiIndex alpha(d, 0);
  alpha[0] = 1 + static_cast<int>(stream.below(2));  // order 1 or 2 test

  // Stacked feature matrix: column (a*N + i) holds phi^(a)(x_i).
  Eigen::MatrixXd Phi(feat.p(), M);
  for (int a = 0; a < r; ++a)
    for (long i = 0; i < N; ++i)
      Phi.col(a * N + i) = feat.deriv(X.row(i).transpose(), set.indices[a]);
  Eigen::MatrixXd PhiG(feat.p(), n);
  for (long j = 0; j < n; ++j)
    PhiG.col(j) = feat.deriv(grid.row(j).transpose(), alpha);

  // Assemble the gram system directly from the features.
  GramSystem sys;
  sys.N = N;
  for (int a = 0; a < r; ++a) sys.active.push_back(a);
  sys.K = Phi.transpose() * Phi;
  sys.K = 0.5 * (sys.K + sys.K.transpose().eval());
  sys.A = Eigen::MatrixXd::Zero(M, N);
  for (int a = 0; a < r; ++a)
    for (long i = 0; i < N; ++i) sys.A(a * N + i, i) = W(i, a);
  sys.a_bar = sys.A.rowwise().mean();
  Eigen::MatrixXd Ac = sys.A.colwise() - sys.a_bar;
  sys.Sigma = Ac * Ac.transpose() / double(N);

  PivotedCholesky pc = pivoted_cholesky(sys.K, 1e-13);
  FitResult fit = fit_lowrank(sys, pc, lambda);

  GridSystem gs;
  gs.grid = grid;
  gs.alpha_test = alpha;
  gs.K_G = Phi.transpose() * PhiG;
  gs.G = sys.A.transpose() * sys.K * sys.A;
  gs.G = 0.5 * (gs.G + gs.G.transpose().eval());
  gs.G_tilde = center_columns(gs.G);
  gs.G_tilde_G = center_columns(sys.A.transpose() * gs.K_G);
  gs.h_tilde = center(sys.A.transpose() * (sys.K * fit.c_hat));
  gs.has_h_tilde = true;

  auto [omega, ws] = omega_hat(sys, gs, fit, lambda);

  // ---- direct computation in feature coordinates ----
  Eigen::MatrixXd Psi = Phi * sys.A;  // column i = psi_i
  Eigen::VectorXd mu = Psi.rowwise().mean();
  Eigen::MatrixXd Psic = Psi.colwise() - mu;
  Eigen::MatrixXd SigmaF = Psic * Psic.transpose() / double(N);

  Eigen::MatrixXd reg = SigmaF;
  reg.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ridge(reg);
  Eigen::VectorXd h_hat = ridge.solve(mu);
  Eigen::MatrixXd U(feat.p(), n);  // u_j columns
  for (long j = 0; j < n; ++j) U.col(j) = ridge.solve(PhiG.col(j));

  Eigen::VectorXd h_t = Psic.transpose() * h_hat;
  Eigen::MatrixXd F(feat.p(), N);  // F_i columns
  Eigen::VectorXd mean_term = Psic * h_t / double(N);
  for (long i = 0; i < N; ++i)
    F.col(i) = (1.0 - h_t[i]) * Psic.col(i) + mean_term;

  Eigen::MatrixXd S_direct = F.transpose() * U;
  Eigen::MatrixXd omega_direct = S_direct.transpose() * S_direct / double(N);
  Eigen::MatrixXd B_direct = F.transpose() * PhiG;
  Eigen::MatrixXd V_direct = Psi.transpose() * F;  // (m,i) = <F_i, psi_m>
  Eigen::MatrixXd Lambda_direct = Psic.transpose() * U / double(N);

  double worst = 0.0;
  worst = std::max(worst, (omega - omega_direct).cwiseAbs().maxCoeff());
  worst = std::max(worst, (ws.Smat - S_direct).cwiseAbs().maxCoeff());
  worst = std::max(worst, (ws.Bmat - B_direct).cwiseAbs().maxCoeff());
  worst = std::max(worst, (ws.Vmat - V_direct).cwiseAbs().maxCoeff());
  worst = std::max(worst, (ws.Lambda - Lambda_direct).cwiseAbs().maxCoeff());
  worst = std::max(
      worst, (gs.h_tilde - h_t).cwiseAbs().maxCoeff());

  // Self-check of the oracle: the feature map must reproduce the kernel.
  for (int c = 0; c < 5; ++c) {
    Eigen::VectorXd x(d), y(d);
    for (int t = 0; t < d; ++t) {
      x[t] = 2.0 * stream.uniform() - 1.0;
      y[t] = 2.0 * stream.uniform() - 1.0;
    }
    const double direct = std::pow(1.0 + x.dot(y), 2);
    const double viafeat =
        feat.deriv(x, MultiIndex(d, 0)).dot(feat.deriv(y, MultiIndex(d, 0)));
    worst = std::max(worst, std::abs(direct - viafeat));
  }
  return worst;
}

}  // namespace

OracleResult validate_omega_explicit(std::uint64_t seed) {
  OracleResult res{"omega_explicit", false, ""};
  const double tol = 1e-8;
  RngStream stream(seed, {0x03E6u});
  double worst = 0.0;
  worst = std::max(worst, omega_explicit_case(1, 10, 3, 0.3, stream));
  worst = std::max(worst, omega_explicit_case(2, 15, 3, 0.4, stream));
  worst = std::max(worst, omega_explicit_case(2, 12, 2, 0.15, stream));
  res.pass = worst <= tol;
  res.detail = pass_detail(worst, tol);
  return res;
}

OracleResult validate_moreau(std::uint64_t seed, int draws, int n) {
  OracleResult res{"moreau", false, ""};
  const double tol = 1e-9;
  double worst = 0.0;
  RngStream stream(seed, {0x30EAu});
  for (int c = 0; c < draws; ++c) {
    Eigen::MatrixXd omega = random_pd(n, 0.4, 2.5, stream);
    Eigen::VectorXd Z = 2.0 * stream.normal_vector(n);
    auto [lhs, rhs] = moreau_check(Z, omega);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  res.pass = worst <= tol;
  res.detail = pass_detail(worst, tol);
  return res;
}

OracleResult validate_chibar(std::uint64_t seed) {
  OracleResult res{"chibar_n1", false, ""};
  Eigen::MatrixXd omega(1, 1);
  omega << 1.0;
  PvalueResult pv = pvalue_mc(omega, 6.635, 10000, seed);
  // Null law is the even mixture of a point mass at zero and chi-square(1):
  // half the draws land exactly at zero, and P(W > 6.635) = 0.005.
  const double zero_err = std::abs(pv.frac_zero - 0.5);
  const double p_err = std::abs(pv.p_value - 0.00505);
  res.pass = zero_err <= 0.02 && p_err <= 0.003;
  std::ostringstream os;
  os << "P(W=0) err " << zero_err << " vs 0.02; p(6.635) err " << p_err
     << " vs 0.003";
  res.detail = os.str();
  return res;
}

std::vector<OracleResult> validate_all(std::uint64_t seed) {
  return {
      validate_kernel_fd(seed),
      validate_derivative_reproducing(seed),
      validate_dense_vs_lowrank(seed),
      validate_nnls_bruteforce(seed),
      validate_omega_explicit(seed),
      validate_moreau(seed),
      validate_chibar(seed),
  };
}

}  // namespace shapekit
