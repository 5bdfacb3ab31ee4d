#include "shapekit/simulation.hpp"

#include <cmath>
#include <numeric>

#include "shapekit/inference.hpp"
#include "shapekit/linalg.hpp"
#include "shapekit/rng.hpp"

namespace shapekit {

std::string to_string(Design d) {
  switch (d) {
    case Design::identity: return "identity";
    case Design::decay: return "decay";
    case Design::spike: return "spike";
  }
  return "?";
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::null: return "null";
    case Violation::mild: return "mild";
    case Violation::moderate: return "moderate";
    case Violation::strong: return "strong";
  }
  return "?";
}

Design parse_design(const std::string& s) {
  if (s == "identity") return Design::identity;
  if (s == "decay") return Design::decay;
  if (s == "spike") return Design::spike;
  throw input_error("unknown design '" + s + "'");
}

Violation parse_violation(const std::string& s) {
  if (s == "null") return Violation::null;
  if (s == "mild") return Violation::mild;
  if (s == "moderate") return Violation::moderate;
  if (s == "strong") return Violation::strong;
  throw input_error("unknown violation '" + s + "'");
}

namespace {

// Seeded random orthogonal matrix: QR of a gaussian matrix with the R
// diagonal signs fixed, which makes the draw unique and Haar-distributed.
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

long auto_spike_count(long n) {
  const long rule = static_cast<long>(std::ceil(0.1 * double(n)));
  return std::min<long>(n, std::max<long>(2, rule));
}

}  // namespace

Eigen::MatrixXd make_covariance(Design design, long n,
                                const CovarianceParams& params,
                                std::uint64_t seed) {
  if (n < 1) throw input_error("make_covariance: n must be >= 1");
  if (design == Design::identity) return Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd eigs(n);
  if (design == Design::decay) {
    for (long j = 0; j < n; ++j)
      eigs[j] = std::pow(double(j + 1), -params.decay_gamma);
  } else {
    const long k = params.spike_count > 0 ? std::min(params.spike_count, n)
                                          : auto_spike_count(n);
    const long bulk = n - k;
    for (long j = 0; j < k; ++j) eigs[j] = params.spike_magnitude;
    for (long j = 0; j < bulk; ++j) {
      const double t = bulk == 1 ? 0.5 : double(j) / double(bulk - 1);
      eigs[k + j] = params.bulk_min + t * (params.bulk_max - params.bulk_min);
    }
  }
  RngStream stream(seed, {0x0123u});
  Eigen::MatrixXd U = random_orthogonal(n, stream);
  Eigen::MatrixXd omega = U * eigs.asDiagonal() * U.transpose();
  return 0.5 * (omega + omega.transpose().eval());
}

ViolationDraw make_violation(Violation level, long n,
                             const ViolationConstants& constants,
                             std::uint64_t seed) {
  ViolationDraw draw;
  if (level == Violation::null) return draw;
  if (n < 2) throw input_error("make_violation: n must be >= 2");

  double frac = 0.0, c = 1.0;
  switch (level) {
    case Violation::mild: frac = 0.05; c = constants.c_mild; break;
    case Violation::moderate: frac = 0.10; c = constants.c_mod; break;
    case Violation::strong: frac = 0.25; c = constants.c_strong; break;
    case Violation::null: break;
  }
  const long k = std::max<long>(1, std::lround(frac * double(n)));
  const double S = c * std::sqrt(std::log(double(n)));
  draw.delta = S / std::sqrt(double(k));

  // Partial Fisher-Yates for a uniform size-k subset.
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  RngStream stream(seed, {0x5E1Eu});
  for (long j = 0; j < k; ++j) {
    const long pick = j + static_cast<long>(stream.below(n - j));
    std::swap(idx[j], idx[pick]);
  }
  draw.support.assign(idx.begin(), idx.begin() + k);
  return draw;
}

SimulationResult run_experiment(const SimulationConfig& cfg) {
  if (cfg.reps < 1) throw input_error("simulation reps must be >= 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0))
    throw input_error("simulation level must be in (0,1)");
  if (cfg.mc_reps < 100) throw input_error("simulation mc_reps must be >= 100");
  for (long n : cfg.n_list)
    if (n < 1) throw input_error("simulation n must be >= 1");
  for (long N : cfg.N_list)
    if (N < 2) throw input_error("simulation N must be >= 2");

  SimulationResult result;
  for (Design design : cfg.designs) {
    const auto design_id = static_cast<std::uint64_t>(design);
    for (long n : cfg.n_list) {
      RngStream cov_seed_stream(cfg.seed, {1u, design_id, static_cast<std::uint64_t>(n)});
      const std::uint64_t cov_seed = cov_seed_stream.next_u64();
      const Eigen::MatrixXd omega_true = make_covariance(design, n, cfg.cov, cov_seed);
      const Eigen::MatrixXd omega_root = sqrt_psd(omega_true);

      for (long N : cfg.N_list) {
        for (Violation violation : cfg.violations) {
          std::vector<std::uint8_t> rejected(cfg.reps, 0);
          std::vector<std::uint8_t> failed(cfg.reps, 0);

          parallel_for(cfg.reps, cfg.threads, [&](long rep) {
            RngStream stream(cfg.seed,
                             {2u, design_id, static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(N),
                              static_cast<std::uint64_t>(violation),
                              static_cast<std::uint64_t>(rep)});
            try {
              Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
              if (violation != Violation::null) {
                const std::uint64_t vseed = stream.next_u64();
                ViolationDraw draw =
                    make_violation(violation, n, cfg.constants, vseed);
                for (long i : draw.support) theta[i] -= draw.delta;
              }
              Eigen::VectorXd theta_hat =
                  theta + omega_root * stream.normal_vector(n) /
                              std::sqrt(double(N));

              Eigen::MatrixXd omega_plugin;
              if (cfg.plugin == Plugin::exact) {
                omega_plugin = omega_true;
              } else {
                // Sample covariance of N fresh draws from N(0, omega).
                Eigen::MatrixXd draws(n, N);
                for (long t = 0; t < N; ++t)
                  draws.col(t) = omega_root * stream.normal_vector(n);
                Eigen::MatrixXd centered = draws.colwise() - draws.rowwise().mean();
                omega_plugin =
                    centered * centered.transpose() / double(N - 1);
                omega_plugin.diagonal().array() +=
                    defaults::omega_jitter * omega_plugin.trace() / double(n);
              }

              WaldResult wald =
                  wald_statistic(theta_hat, omega_plugin, N, Direction::nonneg);
              const std::uint64_t pseed = stream.next_u64();
              PvalueResult pv =
                  pvalue_mc(omega_plugin, wald.W_N, cfg.mc_reps, pseed, 1);
              rejected[rep] = pv.p_value <= cfg.level ? 1 : 0;
            } catch (const std::exception&) {
              failed[rep] = 1;
            }
          });

          SimulationRow row;
          row.design = design;
          row.n = n;
          row.N = N;
          row.violation = violation;
          long rejects = 0, failures = 0;
          for (long rep = 0; rep < cfg.reps; ++rep) {
            rejects += rejected[rep];
            failures += failed[rep];
          }
          row.failures = failures;
          row.reps = cfg.reps - failures;
          row.rejection_rate =
              row.reps > 0 ? double(rejects) / double(row.reps) : 0.0;
          row.mc_stderr =
              row.reps > 0
                  ? std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) /
                              double(row.reps))
                  : 0.0;
          result.rows.push_back(row);
        }
      }
    }
  }
  return result;
}

}  // namespace shapekit
