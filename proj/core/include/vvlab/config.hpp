#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vvlab/bounds.hpp"
#include "vvlab/class_checks.hpp"
#include "vvlab/distributions.hpp"
#include "vvlab/renewal.hpp"
#include "vvlab/walk.hpp"

namespace vvlab {

enum class EstimatorKind { conditional, crude };

std::string_view to_string(EstimatorKind k) noexcept;

struct LowerBoundConfig {
  LStrategy strategy = LStrategy::chebyshev;
  std::vector<double> epsilons{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  std::vector<double> deltas{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  EmpiricalLOptions empirical;
  /// Paths for the empirical strategy; 0 means simulation.n_paths.
  std::uint64_t n_paths = 0;

  friend bool operator==(const LowerBoundConfig& a, const LowerBoundConfig& b) {
    return a.strategy == b.strategy && a.epsilons == b.epsilons && a.deltas == b.deltas &&
           a.empirical.L_step == b.empirical.L_step && a.empirical.L_max == b.empirical.L_max &&
           a.empirical.horizon == b.empirical.horizon && a.n_paths == b.n_paths;
  }
};

struct RenewalConfig {
  double R = 20.0;
  /// 0 means a / 2.
  double epsilon = 0.0;
  double gap_max = 0.0;
  std::uint64_t step_cap = 10'000'000;
  /// Sweep values for the gamma and big-jump commands; empty means {R}.
  std::vector<double> R_values;
  GammaMethod method = GammaMethod::two_sided;
  double confidence = 0.95;
  /// 0 means simulation.n_paths.
  std::uint64_t n_paths = 0;

  RenewalParams params(const IncrementModel& model, double R_override = 0.0) const;
  friend bool operator==(const RenewalConfig&, const RenewalConfig&) = default;
};

struct UpperBoundConfig {
  double tolerance = 1e-9;
  double grid_step = 0.0;
  double grid_top = 0.0;
  std::size_t max_points = 1u << 23;
  /// Method used to estimate gamma for the bound.
  GammaMethod gamma_method = GammaMethod::one_sided;

  friend bool operator==(const UpperBoundConfig&, const UpperBoundConfig&) = default;
};

struct BigJumpConfig {
  /// Levels; empty means the x grid.
  std::vector<double> xs;
  std::uint64_t n_paths = 0;

  friend bool operator==(const BigJumpConfig&, const BigJumpConfig&) = default;
};

struct ClassCheckConfig {
  ClassCheckOptions options;
  std::vector<ClassSubject> subjects{ClassSubject::increment_positive_part, ClassSubject::second_tail};

  friend bool operator==(const ClassCheckConfig& a, const ClassCheckConfig& b) {
    const auto& x = a.options;
    const auto& y = b.options;
    return a.subjects == b.subjects && x.depth == y.depth && x.step == y.step &&
           x.max_points == y.max_points && x.trajectory_points == y.trajectory_points &&
           x.shifts == y.shifts && x.r2_low == y.r2_low && x.r2_high == y.r2_high &&
           x.long_tail_max == y.long_tail_max && x.light_tail_min == y.light_tail_min;
  }
};

/// Everything a command needs. Every command is a function of this value.
/// simulation.threads is an execution setting: it is neither read from nor
/// written to JSON, and never changes results.
struct ExperimentConfig {
  JumpDistribution jump = JumpDistribution::pareto(2.5, 1.0);
  double drift = 2.0;
  SecondTailMode second_tail_mode = SecondTailMode::closed_form;
  double second_tail_rel_tol = 1e-12;
  std::vector<double> x_grid;
  std::uint64_t seed = 1;
  SimConfig simulation;
  EstimatorKind estimator = EstimatorKind::conditional;
  LowerBoundConfig lower_bound;
  RenewalConfig renewal;
  UpperBoundConfig upper_bound;
  BigJumpConfig big_jump;
  ClassCheckConfig class_check;
  std::string output_dir;

  IncrementModel model() const;
  /// simulation settings for a stage, with the stage's own derived seed and
  /// path count (0 keeps simulation.n_paths).
  SimConfig stage_simulation(std::uint64_t stage, std::uint64_t n_paths = 0) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Seeds for independent stages derived from one master seed.
namespace stage {
inline constexpr std::uint64_t tail_mc = 1;
inline constexpr std::uint64_t lower_bound = 2;
inline constexpr std::uint64_t gamma = 3;
inline constexpr std::uint64_t big_jump = 4;
}  // namespace stage

/// Parses a JSON config. Syntax errors report line and column; semantic
/// errors name the offending field as a JSON pointer. Unknown fields are
/// rejected. Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Serializes to JSON that parse_config() maps back to an equal config.
std::string config_to_json(const ExperimentConfig& config, int indent = 2);

}  // namespace vvlab
