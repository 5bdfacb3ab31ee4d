#pragma once

#include <optional>

#include <Eigen/Dense>

#include "shapekit/common.hpp"
#include "shapekit/kernel.hpp"
#include "shapekit/multiindex.hpp"

namespace shapekit {

struct Dataset {
  Eigen::MatrixXd X;                 // N x d covariates
  std::optional<Eigen::VectorXd> Y;  // optional response, length N
  Eigen::MatrixXd W;                 // N x m_s weights, column a = w_alpha(z_i)
};

// The stacked Gram system over the active derivative blocks.  With r active
// multi-indices, M = N*r and block a of any stacked object covers rows
// [a*N, (a+1)*N).
struct GramSystem {
  Eigen::MatrixXd K;      // M x M, K[(i,a),(j,b)] = D_x^a D_y^b K(x_i, x_j)
  Eigen::MatrixXd A;      // M x N, block a = diag(W[:, active[a]])
  Eigen::VectorXd a_bar;  // column mean of A
  Eigen::MatrixXd Sigma;  // (1/N) sum_i (a_i - a_bar)(a_i - a_bar)^T
  long N = 0;
  std::vector<int> active;      // multi-index positions backing the blocks
  double jitter_applied = 0.0;  // diagonal jitter added to pass the PSD check
};

// Everything the grid-functional test needs: the cross-Gram against the
// grid functionals and the centered data-side Gram products.
struct GridSystem {
  Eigen::MatrixXd grid;  // n x d test points
  MultiIndex alpha_test;
  Eigen::MatrixXd K_G;        // M x n, (i,b),j = D_x^b D_y^alpha K(x_i, xi_j)
  Eigen::MatrixXd G;          // N x N, A^T K A
  Eigen::MatrixXd G_tilde;    // H G
  Eigen::MatrixXd G_tilde_G;  // H A^T K_G
  Eigen::VectorXd h_tilde;    // H A^T K c_hat, filled when a fit is supplied
  bool has_h_tilde = false;
};

struct FitResult;  // estimator module

GramSystem build_gram(const Dataset& data, const KernelModel& k,
                      const MultiIndexSet& set, const ActiveSet& active);

GridSystem build_grid(const Dataset& data, const KernelModel& k,
                      const MultiIndexSet& set, const GramSystem& sys,
                      const std::optional<FitResult>& fit,
                      const Eigen::MatrixXd& grid, const MultiIndex& alpha_test);

// Subtract each column's mean: X -> H X with H = I - (1/N) 1 1^T.
Eigen::MatrixXd center_columns(const Eigen::MatrixXd& X);
Eigen::VectorXd center(const Eigen::VectorXd& v);

}  // namespace shapekit
