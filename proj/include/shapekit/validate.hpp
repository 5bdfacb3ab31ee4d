#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shapekit {

struct OracleResult {
  std::string name;
  bool pass = false;
  std::string detail;  // worst error vs tolerance, counts, timings
};

// Each suite checks one implementation against an independent oracle and is
// deterministic in the seed.  Default counts/tolerances are the documented
// contract of `shapekit validate`.

// eval_deriv vs nested central finite differences, random points/orders.
OracleResult validate_kernel_fd(std::uint64_t seed, int checks = 200);

// D^alpha of the fitted function vs central differences of its evaluation.
OracleResult validate_derivative_reproducing(std::uint64_t seed, int fits = 20);

// theta_hat from the dense solve vs the pivoted-Cholesky solve at full rank,
// plus a compression check (m < M) on smooth data at rank_tol 1e-6.
OracleResult validate_dense_vs_lowrank(std::uint64_t seed, int instances = 50);

// W_N from the active-set solver vs exhaustive enumeration of all sign
// patterns, n in {2,3}.
OracleResult validate_nnls_bruteforce(std::uint64_t seed, int instances = 200);

// Covariance pipeline vs direct inner products in an explicit finite
// feature space (quadratic polynomial kernel).
OracleResult validate_omega_explicit(std::uint64_t seed);

// Conic Pythagoras identity on random draws.
OracleResult validate_moreau(std::uint64_t seed, int draws = 1000, int n = 5);

// n=1 null distribution: point mass at zero and a scalar chi-square tail.
OracleResult validate_chibar(std::uint64_t seed);

std::vector<OracleResult> validate_all(std::uint64_t seed);

}  // namespace shapekit
