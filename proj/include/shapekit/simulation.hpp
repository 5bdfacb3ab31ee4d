#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shapekit/common.hpp"

namespace shapekit {

enum class Design { identity, decay, spike };
enum class Violation { null, mild, moderate, strong };

std::string to_string(Design d);
std::string to_string(Violation v);
Design parse_design(const std::string& s);
Violation parse_violation(const std::string& s);

struct CovarianceParams {
  double decay_gamma = 1.0;
  long spike_count = 0;  // 0 = automatic: min(n, max(2, ceil(0.1 n)))
  double spike_magnitude = 10.0;
  double bulk_min = 0.5;
  double bulk_max = 1.5;
};

struct ViolationConstants {
  double c_mild = 1.0;
  double c_mod = 1.0;
  double c_strong = 1.0;
};

enum class Plugin { exact, sample };

struct SimulationConfig {
  std::vector<long> n_list{10};
  std::vector<long> N_list{500, 1000, 1500, 2000};
  std::vector<Design> designs{Design::identity, Design::decay, Design::spike};
  std::vector<Violation> violations{Violation::null, Violation::mild,
                                    Violation::moderate, Violation::strong};
  long reps = 500;
  double level = 0.05;
  long mc_reps = 2000;
  std::uint64_t seed = 20240814;
  ViolationConstants constants;
  Plugin plugin = Plugin::sample;
  CovarianceParams cov;
  int threads = 1;
};

struct SimulationRow {
  Design design;
  long n = 0;
  long N = 0;
  Violation violation;
  long reps = 0;  // effective replications behind the rate
  double rejection_rate = 0.0;
  double mc_stderr = 0.0;
  long failures = 0;
};

struct SimulationResult {
  std::vector<SimulationRow> rows;
};

// The base-truth covariance of a cell.  Identity is exact; decay and spike
// spectra are conjugated by a seeded random orthogonal matrix.
Eigen::MatrixXd make_covariance(Design design, long n,
                                const CovarianceParams& params,
                                std::uint64_t seed);

struct ViolationDraw {
  std::vector<long> support;  // coordinates shifted by -delta
  double delta = 0.0;
};

// k = max(1, round(frac*n)) coordinates drawn uniformly without
// replacement; per-coordinate shift delta = c*sqrt(log n)/sqrt(k), so the
// l2 norm of the shift equals c*sqrt(log n) at every level.
ViolationDraw make_violation(Violation level, long n,
                             const ViolationConstants& constants,
                             std::uint64_t seed);

SimulationResult run_experiment(const SimulationConfig& cfg);

}  // namespace shapekit
