#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vvlab/grid.hpp"
#include "vvlab/walk.hpp"

namespace vvlab {

/// Large-x approximation of P(M > x): the increment's second tail over a.
double asymptote(const IncrementModel& model, double x);

// ---------------------------------------------------------------------------
// Lower bound

enum class LStrategy { chebyshev, empirical };

std::string_view to_string(LStrategy s) noexcept;

struct LowerBoundParams {
  double epsilon = 0.1;
  double delta = 0.1;
  double L = 0.0;
  LStrategy strategy = LStrategy::chebyshev;
  /// Empirical strategy only: observed frequency of the uniform event
  /// {S_n > -L - n(a + eps) for all n <= horizon}.
  double validated_frequency = 1.0;

  void validate() const;
};

/// L = sigma^2 / (4 eps delta). For every n >= 1 the one-sided Chebyshev
/// bound gives P(S_n <= -L - n(a+eps)) <= n sigma^2 / (L + n eps)^2, and the
/// right side is maximised at n = L/eps where it equals delta.
///
/// Throws NumericalError for infinite-variance jumps.
double choose_L_chebyshev(const IncrementModel& model, double epsilon, double delta);

struct EmpiricalLOptions {
  double L_step = 0.1;
  double L_max = 1e6;
  std::uint64_t horizon = 10'000;  // N_max: steps per path
};

struct EmpiricalL {
  double L = 0.0;
  double frequency = 0.0;
  std::uint64_t paths = 0;
};

/// Per-path deficits D = -min_{0 <= n <= horizon}(S_n + n(a + eps)), sorted.
std::vector<double> simulate_deficits(const IncrementModel& model, double epsilon,
                                      const SimConfig& cfg, std::uint64_t horizon);

/// Smallest multiple of L_step such that D < L on at least a (1 - delta/2)
/// fraction of the simulated paths. Throws NumericalError when that L would
/// exceed L_max.
EmpiricalL choose_L_from_deficits(std::span<const double> sorted_deficits, double delta,
                                  const EmpiricalLOptions& options);

EmpiricalL choose_L_empirical(const IncrementModel& model, double epsilon, double delta,
                              const SimConfig& cfg, const EmpiricalLOptions& options = {});

/// (1 - delta) Fs(x + L) / (a + eps + Fs(x + L)).
double lower_bound(const IncrementModel& model, double x, const LowerBoundParams& params);

/// Supplies L for a given (eps, delta).
class LProvider {
 public:
  static LProvider chebyshev(const IncrementModel& model);
  /// Simulates deficits once per eps and reuses them across delta values.
  /// The cache is not synchronized; use one provider per thread.
  static LProvider empirical(const IncrementModel& model, const SimConfig& cfg,
                             const EmpiricalLOptions& options = {});

  LowerBoundParams operator()(double epsilon, double delta) const;
  LStrategy strategy() const noexcept { return strategy_; }

 private:
  LProvider() = default;

  std::optional<IncrementModel> model_;
  LStrategy strategy_ = LStrategy::chebyshev;
  SimConfig cfg_;
  EmpiricalLOptions options_;
  std::shared_ptr<std::map<double, std::vector<double>>> deficits_;
};

struct LowerBoundOptimum {
  double value = 0.0;
  LowerBoundParams params;
};

/// Maximises the lower bound over the (eps, delta) grid. Ties keep the
/// first grid point in (eps-major) order.
LowerBoundOptimum optimize_lower_bound(const IncrementModel& model, double x,
                                       std::span<const double> epsilons,
                                       std::span<const double> deltas, const LProvider& provider);

// ---------------------------------------------------------------------------
// Upper bound

struct GridSpec {
  /// Lattice step; 0 means 0.01 * a.
  double step = 0.0;
  /// Largest grid point; 0 means 4 * (largest requested x).
  double top = 0.0;
  /// Refuse to build grids larger than this.
  std::size_t max_points = 1u << 23;
};

/// The dominating law for S_{tau_1} given tau_1 < inf:
///   G(y) = min(1, I(y - R - a + eps) / (gamma (a - eps))),
/// where I is the increment's integrated tail. Where I < 1 this is the
/// clamped second tail; below that point G is identically 1. Discretized
/// with upward rounding starting at the point where G reaches 1.
///
/// Requires 0 < eps < a and 0 < gamma <= 1 (gamma == 0 throws
/// NumericalError: no renewal was observed).
GridDistribution build_G(const IncrementModel& model, double R, double epsilon, double gamma,
                         const GridSpec& grid);

/// Smallest depth m >= 1 with gamma^(m+1)/(1-gamma) <= tol.
int series_depth(double gamma, double tol);

struct UpperBoundSeries {
  std::vector<double> values;  // one per requested evaluation point
  int depth = 1;
  double remainder = 0.0;
};

/// Evaluates sum_{m=1}^{M*} gamma^m G^{*m}(y) + gamma^{M*+1}/(1-gamma) at
/// each y. Throws NumericalError for gamma >= 1.
UpperBoundSeries upper_bound_series(const GridDistribution& G, double gamma_upper, double tol,
                                    std::span<const double> ys);

/// Upper bound on P(M > x), valid for x > R - a + eps. gamma_lower enters G,
/// gamma_upper the series.
double upper_bound(const IncrementModel& model, double x, double R, double epsilon,
                   double gamma_lower, double gamma_upper, double tol, const GridSpec& grid);

/// Evaluation point of the series for level x: x - R + a - eps.
double upper_bound_argument(const IncrementModel& model, double x, double R, double epsilon);

}  // namespace vvlab
