#pragma once

#include <functional>

#include "vvlab/distributions.hpp"

namespace vvlab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Adaptive Gauss-Kronrod (15/31) integration of f over the finite interval
/// [lo, hi]. Throws NumericalError if the error estimate stays above
/// max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol, double abs_tol = 0.0);

/// Integral of dist.tail() over [x, inf) by quadrature.
///
/// The interval is split at the support infimum and then into panels of
/// doubling width; integration stops once the family's analytic remainder
/// bound beyond the last panel falls below 1e-12 of the accumulated value.
QuadratureResult integrate_tail(const JumpDistribution& dist, double x, double rel_tol);

}  // namespace vvlab
