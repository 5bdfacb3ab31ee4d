#pragma once

#include <Eigen/Dense>

#include "shapekit/assembly.hpp"
#include "shapekit/linalg.hpp"

namespace shapekit {

enum class SolvePath { dense, lowrank };

struct FitResult {
  Eigen::VectorXd c_hat;  // length M, block layout of the GramSystem
  double lambda = 0.0;
  SolvePath path = SolvePath::dense;
  long rank_used = 0;
  double objective = 0.0;
  std::vector<int> active;  // copied from the GramSystem for evaluation
  bool truncated = false;   // low-rank factor hit max_rank above tolerance
  double fo_residual = 0.0; // ||(K Sigma K + lambda K) c - K a_bar||_inf
};

// Solve (K Sigma K + lambda K) c = K a_bar through the symmetric reduced
// system; K is factored once with a small diagonal jitter.
FitResult fit_dense(const GramSystem& sys, double lambda);

// Reduced solve on the pivoted-Cholesky factor: (L^T Sigma L + lambda I)
// z = L^T a_bar, then c = B z.
FitResult fit_lowrank(const GramSystem& sys, const PivotedCholesky& pc,
                      double lambda);

// D^alpha of the fitted function at each row of `points`.
Eigen::VectorXd evaluate(const FitResult& fit, const Dataset& data,
                         const KernelModel& k, const MultiIndexSet& set,
                         const Eigen::MatrixXd& points,
                         const MultiIndex& alpha);

// -c^T K a_bar + 1/2 c^T K Sigma K c + lambda/2 c^T K c.
double objective(const FitResult& fit, const GramSystem& sys);

}  // namespace shapekit
