#pragma once

#include <Eigen/Dense>

#include "shapekit/multiindex.hpp"

namespace shapekit {

// Hard ceiling on the one-sided derivative order: positivity (0),
// monotonicity (1) and convexity (2) tests are covered.
inline constexpr int kmax_derivative_order = 2;

enum class KernelFamily { gaussian };

// C^{2s} kernel with exact mixed partials D_x^a D_y^b K(x,y).  Gaussian
// only; one lengthscale per dimension (an isotropic scalar broadcasts).
struct KernelModel {
  KernelFamily family = KernelFamily::gaussian;
  Eigen::VectorXd lengthscale;  // size d, all > 0
  int s_max = kmax_derivative_order;
};

KernelModel gaussian_kernel(double lengthscale, int d);
KernelModel gaussian_kernel(const Eigen::VectorXd& lengthscale);

double eval_deriv(const KernelModel& k, const MultiIndex& a,
                  const MultiIndex& b, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& y);

struct FdCheck {
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

// Central finite-difference cross-check of eval_deriv at step `step`;
// rel_err = |analytic - numeric| / max(1, |analytic|).
FdCheck fd_check(const KernelModel& k, const MultiIndex& a,
                 const MultiIndex& b, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y, double step);

}  // namespace shapekit
