#pragma once

#include <vector>

#include <Eigen/Dense>

#include "shapekit/common.hpp"

namespace shapekit {

// Greedy low-rank factorization K ~ L L^T (largest remaining diagonal
// pivots) plus the biorthogonal factor B with B^T L = I_m and K B = L.
struct PivotedCholesky {
  Eigen::MatrixXd L;          // M x m
  std::vector<long> pivots;   // m row indices, in pivot order
  Eigen::MatrixXd B;          // M x m, nonzero only on pivot rows
  double trace_residual = 0.0;
  bool truncated = false;     // max_rank hit before the tolerance
};

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& K,
                                 double rank_tol = defaults::rank_tol,
                                 long max_rank = defaults::max_rank);

// Solve M x = rhs for symmetric positive definite M; iteratively refined
// until the max-norm residual is <= 1e-8 * (1 + ||rhs||_inf).
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& M, const Eigen::MatrixXd& rhs);

// Symmetric inverse square root via eigendecomposition; eigenvalues below
// jitter * max_eig are clipped up to that floor before inversion.
Eigen::MatrixXd inv_sqrt_psd(const Eigen::MatrixXd& M,
                             double jitter = defaults::omega_jitter);

// Symmetric PSD square root (negative eigenvalues clipped to zero).
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& M);

struct NnlsSolution {
  Eigen::VectorXd c_star;    // >= 0 componentwise
  Eigen::VectorXd residual;  // D c_star - b
  double sq_norm = 0.0;      // ||residual||_2^2
  long iterations = 0;
};

// min_{c >= 0} ||D c - b||_2^2 by the Lawson-Hanson active-set method.
NnlsSolution nnls(const Eigen::MatrixXd& D, const Eigen::VectorXd& b,
                  double kkt_tol = defaults::nnls_kkt_tol);

}  // namespace shapekit
