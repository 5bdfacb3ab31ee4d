#include "shapekit/kernel.hpp"

#include <cmath>

#include "shapekit/common.hpp"

namespace shapekit {

namespace {

void check_lengthscale(const Eigen::VectorXd& ell) {
  if (ell.size() < 1) throw input_error("kernel lengthscale is empty");
  for (long t = 0; t < ell.size(); ++t)
    if (!(ell[t] > 0.0)) throw input_error("kernel lengthscale must be > 0");
}

// Probabilists' Hermite polynomial He_n(u).
double hermite(int n, double u) {
  double prev = 1.0;  // He_0
  if (n == 0) return prev;
  double cur = u;  // He_1
  for (int j = 1; j < n; ++j) {
    double next = u * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// One coordinate of the gaussian product kernel:
//   d^a/dx^a d^b/dy^b exp(-(x-y)^2 / (2 l^2))
//     = (-1)^a l^{-(a+b)} He_{a+b}(u) exp(-u^2/2),  u = (x-y)/l.
double factor_deriv(int a, int b, double x, double y, double ell) {
  const double u = (x - y) / ell;
  double v = hermite(a + b, u) * std::exp(-0.5 * u * u) *
             std::pow(ell, -(a + b));
  return (a % 2 == 0) ? v : -v;
}

void check_order(const KernelModel& k, const MultiIndex& a, const char* which) {
  if (static_cast<long>(a.size()) != k.lengthscale.size())
    throw input_error(std::string("eval_deriv: multi-index ") + which +
                      " has wrong dimension");
  if (total_order(a) > k.s_max)
    throw input_error(std::string("eval_deriv: derivative order of ") + which +
                      " exceeds s_max");
}

}  // namespace

KernelModel gaussian_kernel(double lengthscale, int d) {
  return gaussian_kernel(Eigen::VectorXd::Constant(d, lengthscale));
}

KernelModel gaussian_kernel(const Eigen::VectorXd& lengthscale) {
  check_lengthscale(lengthscale);
  KernelModel k;
  k.lengthscale = lengthscale;
  return k;
}

double eval_deriv(const KernelModel& k, const MultiIndex& a,
                  const MultiIndex& b, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& y) {
  check_order(k, a, "a");
  check_order(k, b, "b");
  if (x.size() != k.lengthscale.size() || y.size() != k.lengthscale.size())
    throw input_error("eval_deriv: point dimension mismatch");
  double prod = 1.0;
  for (long t = 0; t < x.size(); ++t)
    prod *= factor_deriv(a[t], b[t], x[t], y[t], k.lengthscale[t]);
  if (!std::isfinite(prod)) throw solver_error("eval_deriv: non-finite value");
  return prod;
}

namespace {

// Nested central differences: peel one derivative order at a time, first
// from a (moving x), then from b (moving y).
double fd_recurse(const KernelModel& k, MultiIndex a, MultiIndex b,
                  Eigen::VectorXd x, Eigen::VectorXd y, double step) {
  for (size_t t = 0; t < a.size(); ++t) {
    if (a[t] > 0) {
      a[t] -= 1;
      Eigen::VectorXd xp = x, xm = x;
      xp[t] += step;
      xm[t] -= step;
      return (fd_recurse(k, a, b, xp, y, step) -
              fd_recurse(k, a, b, xm, y, step)) /
             (2.0 * step);
    }
  }
  for (size_t t = 0; t < b.size(); ++t) {
    if (b[t] > 0) {
      b[t] -= 1;
      Eigen::VectorXd yp = y, ym = y;
      yp[t] += step;
      ym[t] -= step;
      return (fd_recurse(k, a, b, x, yp, step) -
              fd_recurse(k, a, b, x, ym, step)) /
             (2.0 * step);
    }
  }
  MultiIndex zero(a.size(), 0);
  return eval_deriv(k, zero, zero, x, y);
}

}  // namespace

FdCheck fd_check(const KernelModel& k, const MultiIndex& a,
                 const MultiIndex& b, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y, double step) {
  if (!(step > 0.0)) throw input_error("fd_check: step must be > 0");
  FdCheck out;
  out.analytic = eval_deriv(k, a, b, x, y);
  if (total_order(a) == 0 && total_order(b) == 0) {
    out.numeric = out.analytic;
  } else {
    out.numeric = fd_recurse(k, a, b, x, y, step);
  }
  out.rel_err =
      std::abs(out.analytic - out.numeric) / std::max(1.0, std::abs(out.analytic));
  return out;
}

}  // namespace shapekit
