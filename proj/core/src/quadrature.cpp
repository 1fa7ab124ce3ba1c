#include "vvlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <sstream>

#include "vvlab/errors.hpp"

namespace vvlab {

namespace {

constexpr unsigned kMaxDepth = 30;
constexpr int kMaxPanels = 400;

[[noreturn]] void fail(const char* what, double lo, double hi, double err, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << ": no convergence on [" << lo << ", " << hi << "] (error " << err << ", value "
     << value << ")";
  throw NumericalError(os.str());
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol, double abs_tol) {
  QuadratureResult out;
  if (!(hi > lo)) return out;
  double err = 0.0;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, kMaxDepth,
                                                                           rel_tol, &err, &l1);
  out.error_estimate = err;
  out.panels = 1;
  if (!std::isfinite(out.value) || err > std::max(abs_tol, 4.0 * rel_tol * l1)) {
    fail("quadrature", lo, hi, err, out.value);
  }
  return out;
}

QuadratureResult integrate_tail(const JumpDistribution& dist, double x, double rel_tol) {
  QuadratureResult out;
  const double support = dist.support_min();
  double start = x;
  if (x < support) {
    out.value = support - x;
    start = support;
  }
  if (dist.tail(start) == 0.0) return out;

  auto f = [&dist](double t) { return dist.tail(t); };
  const double stop_ratio = std::min(1e-12, rel_tol);

  // The first panel touches the support edge, where Weibull/lognormal tails
  // have unbounded derivatives; tanh-sinh copes with endpoint singularities.
  const double width0 = std::max(1.0, std::abs(start));
  {
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    double l1 = 0.0;
    const double v = ts.integrate(f, start, start + width0, rel_tol, &err, &l1);
    if (!std::isfinite(v) || err > 4.0 * rel_tol * l1) fail("integrate_tail", start, start + width0, err, v);
    out.value += v;
    out.error_estimate += err;
    out.panels = 1;
  }

  double lo = start + width0;
  double width = width0;
  while (true) {
    const double bound = dist.integrated_tail_bound(lo);
    if (bound <= stop_ratio * out.value) break;
    if (dist.tail(lo) == 0.0) break;
    if (out.panels >= kMaxPanels) fail("integrate_tail", start, lo, bound, out.value);
    const double hi = lo + width;
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, lo, hi, kMaxDepth, rel_tol, &err, &l1);
    if (!std::isfinite(v) || err > std::max(4.0 * rel_tol * l1, 1e-300)) {
      fail("integrate_tail", lo, hi, err, v);
    }
    out.value += v;
    out.error_estimate += err;
    ++out.panels;
    lo = hi;
    width *= 2.0;
  }
  return out;
}

}  // namespace vvlab
