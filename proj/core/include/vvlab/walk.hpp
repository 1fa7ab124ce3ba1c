#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "vvlab/distributions.hpp"
#include "vvlab/random.hpp"
#include "vvlab/stats.hpp"

namespace vvlab {

/// Increment law xi = J - d of the negative-drift random walk.
///
/// The constructor enforces a = d - E[J] > 0. Tails of the increment are
/// the jump's tails shifted by d, so F(x) = J(x + d) and the integrated tail
/// of xi at x is the jump's integrated tail at x + d.
class IncrementModel {
 public:
  IncrementModel(JumpDistribution jump, double drift,
                 SecondTailMode mode = SecondTailMode::closed_form, double rel_tol = 1e-12);

  const JumpDistribution& jump() const noexcept { return jump_; }
  double drift() const noexcept { return drift_; }
  /// a = d - E[J], the magnitude of the mean increment.
  double drift_magnitude() const noexcept { return a_; }
  /// Var(xi); kInfiniteVariance when the jump has no second moment.
  double variance() const noexcept { return jump_.variance(); }

  double tail(double x) const noexcept { return jump_.tail(x + drift_); }
  double second_tail(double x) const { return second_tail_(x); }
  const SecondTail& second_tail_function() const noexcept { return second_tail_; }

  double sample(RandomStream& stream) const { return jump_.sample(stream) - drift_; }

  friend bool operator==(const IncrementModel& a, const IncrementModel& b) {
    return a.jump_ == b.jump_ && a.drift_ == b.drift_ &&
           a.second_tail_.mode() == b.second_tail_.mode() &&
           a.second_tail_.rel_tol() == b.second_tail_.rel_tol();
  }

 private:
  JumpDistribution jump_;
  double drift_;
  double a_;
  SecondTail second_tail_;
};

/// Monte Carlo settings shared by every simulating operation.
struct SimConfig {
  std::uint64_t seed = 1;
  std::uint64_t n_paths = 10000;
  /// A path stops once S_n < -barrier.
  double barrier = 1000.0;
  std::uint64_t step_cap = 10'000'000;
  /// Number of independent substreams; part of the experiment definition.
  std::uint64_t substreams = 64;
  /// Worker threads (0 = hardware concurrency); never affects results.
  unsigned threads = 0;

  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  /// One-sided additive bound on the mass lost to barrier/step-cap stops.
  double bias_bound = 0.0;

  Interval confidence_interval(double confidence = 0.95) const {
    return normal_interval(value, std_error, confidence);
  }
};

enum class StopReason { predicate, barrier, step_cap };

std::string_view to_string(StopReason reason) noexcept;

struct WalkPath {
  std::vector<double> sums;    // S_0 .. S_T
  std::vector<double> maxima;  // M_0 .. M_T
  StopReason reason = StopReason::step_cap;

  std::uint64_t length() const noexcept { return sums.empty() ? 0 : sums.size() - 1; }
};

using StopPredicate = std::function<bool(std::uint64_t n, double s)>;

/// Simulates S_0 = 0, S_n = S_{n-1} + xi_n until stop(n, S_n) holds for some
/// n >= 1, S_n < -barrier, or n reaches step_cap (checked in that order).
WalkPath simulate_path(const IncrementModel& model, RandomStream& stream, const StopPredicate& stop,
                       double barrier = std::numeric_limits<double>::infinity(),
                       std::uint64_t step_cap = 10'000'000);

struct SimDiagnostics {
  std::uint64_t paths = 0;
  std::uint64_t barrier_stops = 0;
  std::uint64_t cap_stops = 0;
  /// Paths stopped because every requested level was exceeded.
  std::uint64_t exceeded_all = 0;
  std::uint64_t steps = 0;
};

struct TailPoint {
  double x = 0.0;
  Estimate crude;
  Estimate conditional;
  std::uint64_t exceedances = 0;
};

struct TailEstimates {
  std::vector<TailPoint> points;  // in the order of the requested xs
  SimDiagnostics diagnostics;
};

/// Estimates P(M > x) for every x in one pass over cfg.n_paths paths.
///
/// Each path runs until S_n < -B, the step cap, or until it has exceeded
/// the largest x. The crude estimator is the exceedance indicator; the
/// conditional estimator replaces it by sum over n < T with M_n <= x of
/// F(x - S_n), which has the same mean.
TailEstimates estimate_tail(const IncrementModel& model, std::span<const double> xs,
                            const SimConfig& cfg);

Estimate crude_mc(const IncrementModel& model, double x, const SimConfig& cfg);
Estimate conditional_mc(const IncrementModel& model, double x, const SimConfig& cfg);

/// Conditional-estimator accumulator for one given path: the sum of
/// F(x - S_n) over n < T with M_n <= x.
double conditional_accumulator(const IncrementModel& model, std::span<const double> sums, double x);

/// Bias allowance for a path stopped below -B: twice the asymptote applied
/// from depth -B.
double barrier_bias(const IncrementModel& model, double x, double barrier);

namespace detail {

/// Core walk loop. visit(n, S_n, terminal) is called for n = 0, 1, ...;
/// `terminal` is true when the walk stops after this step regardless of the
/// visitor. Returning true stops the walk with StopReason::predicate.
template <class Family, class Visitor>
StopReason run_walk(const Family& jump, double drift, RandomStream& stream, double barrier,
                    std::uint64_t step_cap, std::uint64_t& steps, Visitor&& visit) {
  double s = 0.0;
  steps = 0;
  if (visit(std::uint64_t{0}, s, step_cap == 0)) return StopReason::predicate;
  if (step_cap == 0) return StopReason::step_cap;
  for (std::uint64_t n = 1;; ++n) {
    s += jump.quantile(stream.uniform()) - drift;
    steps = n;
    const bool below = s < -barrier;
    const bool capped = n >= step_cap;
    if (visit(n, s, below || capped)) return StopReason::predicate;
    if (below) return StopReason::barrier;
    if (capped) return StopReason::step_cap;
  }
}

}  // namespace detail

}  // namespace vvlab
