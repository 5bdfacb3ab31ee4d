#pragma once

#include <stdexcept>
#include <string>
#include <thread>
#include <vector>
#include <functional>

#include <Eigen/Dense>

namespace shapekit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Exit-code contract: 0 ok / 1 validation fail / 2 input error / 3 solver
// error / 4 degenerate inference.  The typed exceptions below map onto it.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace defaults {
// PSD validation slack for assembled Gram matrices, relative to trace.
constexpr double tol_psd = 1e-8;
// Diagonal jitter applied only when the PSD check fails, relative trace/M.
constexpr double gram_jitter = 1e-10;
// Pivoted Cholesky stopping rule, relative to trace(K).
constexpr double rank_tol = 1e-10;
constexpr int max_rank = 2000;
// First-order residual tolerance of the dense fit.
constexpr double fo_tol = 1e-7;
constexpr double nnls_kkt_tol = 1e-10;
// Relative eigenvalue clip used when inverting / rooting omega.
constexpr double omega_jitter = 1e-10;
}  // namespace defaults

// Runs fn(i) for i in [0, count) over at most n_threads workers.  Each index
// is processed exactly once and writes only to its own slot, so results do
// not depend on the schedule.
inline void parallel_for(long count, int n_threads,
                         const std::function<void(long)>& fn) {
  if (count <= 0) return;
  int workers = std::max(1, n_threads);
  workers = static_cast<int>(std::min<long>(workers, count));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &fn]() {
      for (long i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace shapekit
