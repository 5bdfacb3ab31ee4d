#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapekit/simulation.hpp"

namespace shapekit {

enum class WeightPreset { level, signal_grad, custom };

WeightPreset parse_weight_preset(const std::string& s);
std::string to_string(WeightPreset p);

// Fully-resolved flat configuration; unknown keys are rejected and the
// resolved state is echoed into every output.
struct RunConfig {
  std::string kernel_family = "gaussian";
  std::vector<double> lengthscale{1.0};  // scalar broadcasts over dimensions
  std::optional<double> lambda;          // required by fit/test
  int s = 2;
  std::vector<std::string> active;  // multi-index strings; empty = all
  WeightPreset weights = WeightPreset::level;
  std::string solver_path = "auto";  // dense | lowrank | auto
  double rank_tol = defaults::rank_tol;
  long max_rank = defaults::max_rank;
  double nnls_kkt_tol = defaults::nnls_kkt_tol;
  double omega_jitter = defaults::omega_jitter;
  std::string test_alpha;  // multi-index string; empty = function value
  std::string test_direction = "nonneg";
  long test_mc_reps = 10000;
  std::uint64_t test_seed = 12345;
  std::vector<double> test_levels{0.01, 0.05, 0.10};
  SimulationConfig sim;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_map(const std::map<std::string, std::string>& kv);

  // Canonical key=value echo of every resolved setting.
  std::map<std::string, std::string> echo() const;
};

struct CliOptions {
  std::optional<std::uint64_t> seed;  // overrides test.seed / simulation.seed
  int threads = 1;
};

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& out_path, const CliOptions& opts = {});
int cmd_test(const std::string& config_path, const std::string& data_path,
             const std::string& grid_path, const std::string& out_path,
             const CliOptions& opts = {});
int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const CliOptions& opts = {});
int cmd_validate(std::uint64_t seed);

}  // namespace shapekit
