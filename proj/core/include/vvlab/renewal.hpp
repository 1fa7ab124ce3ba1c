#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vvlab/stats.hpp"
#include "vvlab/walk.hpp"

namespace vvlab {

/// Parameters of the tilted renewal times: tau_1 is the first n >= 1 with
/// S_n > R - n(a - eps); later renewals restart the line at the current
/// position.
struct RenewalParams {
  double R = 10.0;
  double epsilon = 0.1;
  /// A one-sided search gives up once line - S_n exceeds this gap;
  /// 0 means 20 R.
  double gap_max = 0.0;
  std::uint64_t step_cap = 10'000'000;

  double effective_gap() const noexcept { return gap_max > 0.0 ? gap_max : 20.0 * R; }
  /// Throws ConfigError unless R > 0 and 0 < eps < a.
  void validate(const IncrementModel& model) const;
};

struct Tau1 {
  std::optional<std::uint64_t> index;  // nullopt: not detected
  double value = 0.0;                  // S_{tau_1} when detected
};

/// First n >= 1 with sums[n] - sums[0] > R - n(a - eps) on a given path.
/// Not detected if the path ends first or the gap exceeds gap_max.
Tau1 detect_tau1(std::span<const double> sums, double a, const RenewalParams& params);

enum class GammaMethod { one_sided, two_sided };

std::string_view to_string(GammaMethod m) noexcept;

struct GammaEstimate {
  double value = 0.0;
  Interval ci;  // Clopper-Pearson at `confidence`
  double confidence = 0.95;
  /// Additive allowance for crossings missed by paths given up at the gap
  /// horizon or the step cap.
  double residual_bound = 0.0;
  GammaMethod method = GammaMethod::two_sided;
  std::uint64_t paths = 0;
  std::uint64_t crossings = 0;
  std::uint64_t truncated = 0;  // gave up at the gap horizon
  std::uint64_t cap_hits = 0;
  /// More than 0.1% of paths reached the step cap.
  bool warning = false;

  double lower_limit() const noexcept { return ci.lower; }
  double upper_limit() const noexcept { return std::min(1.0, ci.upper + residual_bound); }
};

/// Estimates gamma = P(tau_1 < inf).
///
/// one_sided follows each path until it crosses the line or falls gap_max
/// below it; the truncated paths carry an allowance of twice the asymptote
/// of the walk S_n + n(a - eps) (drift -eps) at level gap_max.
/// two_sided also stops at S_n < -R - n(a + eps) and counts only crossings
/// of the upper line first. A path can stay between the lines forever, so
/// the gap horizon and its allowance apply to both methods.
GammaEstimate estimate_gamma(const IncrementModel& model, const RenewalParams& params,
                             const SimConfig& cfg, GammaMethod method = GammaMethod::two_sided,
                             double confidence = 0.95);

/// Allowance used by the one-sided method for one truncated path.
double one_sided_residual(const IncrementModel& model, const RenewalParams& params);

struct Cycle {
  std::uint64_t duration = 0;  // tau_m - tau_{m-1}
  double increment = 0.0;      // S_{tau_m} - S_{tau_{m-1}}
};

/// Successive renewal cycles found on a given path.
std::vector<Cycle> renewal_cycles(std::span<const double> sums, double a, const RenewalParams& params);

/// Simulates cfg.n_paths walks and returns the renewal cycles of each, up
/// to max_cycles per path. Paths are ordered by substream then position.
std::vector<std::vector<Cycle>> simulate_renewal_cycles(const IncrementModel& model,
                                                        const RenewalParams& params,
                                                        const SimConfig& cfg,
                                                        std::size_t max_cycles);

struct FirstRenewalSample {
  std::vector<double> values;  // S_{tau_1} on paths where tau_1 was detected, sorted
  std::uint64_t paths = 0;
};

/// One-sided simulation of S_{tau_1}.
FirstRenewalSample sample_first_renewal(const IncrementModel& model, const RenewalParams& params,
                                        const SimConfig& cfg);

enum class BigJumpStatus { ok, insufficient_data };

std::string_view to_string(BigJumpStatus s) noexcept;

struct BigJumpReport {
  double x = 0.0;
  double R = 0.0;
  double epsilon = 0.0;
  std::uint64_t paths = 0;
  std::uint64_t exceedances = 0;
  /// Exceedance paths with S_{tau_1} > x.
  std::uint64_t first_renewal_exceeds = 0;
  double fraction = 0.0;
  Interval ci;
  /// Same, for the shifted event S_{tau_1} > x - R + a - eps.
  std::uint64_t first_renewal_exceeds_shifted = 0;
  double shifted_fraction = 0.0;
  std::optional<GammaEstimate> gamma;
  BigJumpStatus status = BigJumpStatus::ok;
};

/// Among simulated paths with M > x (stopped at -B, the step cap, or at the
/// first exceedance), the fraction whose first tilted renewal already lands
/// above x. Requires x >= R - a + eps, so that tau_1 never comes after the
/// first exceedance.
BigJumpReport big_jump_fraction(const IncrementModel& model, double x, const RenewalParams& params,
                                const SimConfig& cfg, double confidence = 0.95);

}  // namespace vvlab
