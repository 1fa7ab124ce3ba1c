#include "vvlab/class_checks.hpp"

#include <algorithm>
#include <cmath>

#include "vvlab/errors.hpp"
#include "vvlab/grid.hpp"

namespace vvlab {

std::string_view to_string(ClassSubject s) noexcept {
  return s == ClassSubject::increment_positive_part ? "increment-positive-part" : "second-tail";
}

std::string_view to_string(ClassVerdict v) noexcept {
  switch (v) {
    case ClassVerdict::consistent_with_subexponential:
      return "consistent-with-subexponential";
    case ClassVerdict::consistent_with_long_tailed_only:
      return "consistent-with-long-tailed-only";
    case ClassVerdict::light_tailed_signal:
      return "light-tailed-signal";
  }
  return "unknown";
}

void ClassCheckOptions::validate() const {
  if (!(depth > 0.0 && depth < 1.0)) throw ConfigError("class_check: depth must lie in (0, 1)");
  if (!(step > 0.0)) throw ConfigError("class_check: step must be > 0");
  if (trajectory_points < 1) throw ConfigError("class_check: trajectory_points must be >= 1");
  if (!(r2_low < r2_high)) throw ConfigError("class_check: r2_low must be < r2_high");
  for (double h : shifts) {
    if (!(h > 0.0)) throw ConfigError("class_check: shifts must be > 0");
  }
}

double subject_tail(const IncrementModel& model, ClassSubject subject, double x) {
  if (x < 0.0) return 1.0;
  return subject == ClassSubject::increment_positive_part ? model.tail(x) : model.second_tail(x);
}

namespace {

// Smallest x >= 0 (to bisection accuracy) with tail(x) <= level.
template <class Tail>
double solve_level(const Tail& tail, double level) {
  if (tail(0.0) <= level) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > level) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("class_check: tail never reaches the requested depth");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > level ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

ClassCheckResult class_check(const IncrementModel& model, ClassSubject subject,
                             const ClassCheckOptions& options) {
  options.validate();
  auto tail = [&](double x) { return subject_tail(model, subject, x); };

  ClassCheckResult result;
  result.subject = subject;
  result.x_depth = solve_level(tail, options.depth);

  const double top = 1.05 * result.x_depth + 2.0 * options.step;
  const double needed = std::ceil(top / options.step) + 1.0;
  if (needed > static_cast<double>(options.max_points)) {
    throw NumericalError("class_check: grid too shallow to reach tail depth " +
                         std::to_string(options.depth) + " (needs " +
                         std::to_string(static_cast<long long>(needed)) + " points, max_points = " +
                         std::to_string(options.max_points) + ")");
  }
  const auto n = static_cast<std::size_t>(needed);
  result.grid_points = n;
  const auto up = GridDistribution::from_tail(tail, 0.0, options.step, n, GridDistribution::Rounding::up);
  const auto down = GridDistribution::from_tail(tail, 0.0, options.step, n, GridDistribution::Rounding::down);
  const GridDistribution up2 = convolve(up, up);
  const GridDistribution down2 = convolve(down, down);

  const int k = options.trajectory_points;
  for (int i = 1; i <= k; ++i) {
    const double level = std::pow(options.depth, static_cast<double>(i) / k);
    const double x = i == k ? result.x_depth : solve_level(tail, level);
    ClassCheckRow row;
    row.x = x;
    row.tail = tail(x);
    if (row.tail > 0.0) {
      row.r2_lower = down2.tail(x) / row.tail;
      row.r2_upper = up2.tail(x) / row.tail;
      row.r2 = 0.5 * (row.r2_lower + row.r2_upper);
      for (double h : options.shifts) row.ell.push_back(tail(x - h) / row.tail);
    }
    result.rows.push_back(std::move(row));
  }

  const ClassCheckRow& last = result.rows.back();
  const double ell1 = last.ell.empty() ? 1.0 : last.ell.front();
  if (ell1 >= options.light_tail_min) {
    result.verdict = ClassVerdict::light_tailed_signal;
  } else if (last.r2 >= options.r2_low && last.r2 <= options.r2_high) {
    result.verdict = ClassVerdict::consistent_with_subexponential;
  } else if (ell1 <= options.long_tail_max) {
    result.verdict = ClassVerdict::consistent_with_long_tailed_only;
  } else {
    result.verdict = ClassVerdict::light_tailed_signal;
  }
  return result;
}

}  // namespace vvlab
