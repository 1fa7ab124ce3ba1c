#pragma once

#include <string>
#include <vector>

#include "vvlab/bounds.hpp"
#include "vvlab/config.hpp"
#include "vvlab/renewal.hpp"
#include "vvlab/walk.hpp"

namespace vvlab {

struct TailReportRow {
  double x = 0.0;
  double asymptote = 0.0;
  double lower_bound = 0.0;
  LowerBoundParams lower_params;
  /// x > R - a + eps; the upper bound is NaN outside.
  bool in_validity = false;
  double upper_bound = 0.0;
  Estimate conditional;
  Estimate crude;
  std::uint64_t exceedances = 0;

  /// lower <= upper: deterministic, so a failure is an invariant violation.
  bool sandwich_ok() const noexcept { return !in_validity || lower_bound <= upper_bound; }
  /// lower <= conditional + 2 stderr.
  bool lower_consistent() const noexcept;
  /// conditional - 2 stderr <= upper.
  bool upper_consistent() const noexcept;
};

struct TailReport {
  ExperimentConfig config;
  double drift_magnitude = 0.0;
  RenewalParams renewal;
  GammaEstimate gamma;
  int series_depth = 0;
  double series_remainder = 0.0;
  std::size_t grid_points = 0;
  double grid_step = 0.0;
  SimDiagnostics diagnostics;
  std::vector<TailReportRow> rows;  // in x-grid order

  bool sandwich_holds() const noexcept;
};

/// Runs every stage on the config's x grid. Stage failures are rethrown with
/// the stage name prefixed to the message and the original error category.
TailReport build_report(const ExperimentConfig& config);

std::string report_csv(const TailReport& report);
std::string report_json(const TailReport& report);

/// Scientific notation with 10 significant digits; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_number(double v);

/// Runs f and rethrows any vvlab error as the same type with "stage: "
/// prefixed.
template <class F>
decltype(auto) run_stage(const char* stage, F&& f);

}  // namespace vvlab

#include "vvlab/errors.hpp"

namespace vvlab {

template <class F>
decltype(auto) run_stage(const char* stage, F&& f) {
  const std::string prefix = std::string(stage) + ": ";
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(prefix + e.what());
  }
}

}  // namespace vvlab
