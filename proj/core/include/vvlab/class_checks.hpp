#pragma once

#include <string_view>
#include <vector>

#include "vvlab/walk.hpp"

namespace vvlab {

/// Which distribution on [0, inf) is examined.
enum class ClassSubject {
  /// The positive part of the increment law: atom P(xi <= 0) at 0 plus the
  /// increment tail on (0, inf).
  increment_positive_part,
  /// The positive part of the increment's second-tail distribution.
  second_tail,
};

enum class ClassVerdict { consistent_with_subexponential, consistent_with_long_tailed_only, light_tailed_signal };

std::string_view to_string(ClassSubject s) noexcept;
std::string_view to_string(ClassVerdict v) noexcept;

struct ClassCheckOptions {
  /// Tail level at which the verdict is taken.
  double depth = 1e-4;
  double step = 0.01;
  std::size_t max_points = 1u << 22;
  int trajectory_points = 8;
  std::vector<double> shifts{1.0, 5.0};
  double r2_low = 1.9;
  double r2_high = 2.1;
  /// l_1 at depth at or below this counts as long-tailed behaviour.
  double long_tail_max = 1.15;
  /// l_1 at depth at or above this is a light-tail signal.
  double light_tail_min = 1.5;

  void validate() const;
};

struct ClassCheckRow {
  double x = 0.0;
  double tail = 0.0;
  /// Two-fold convolution ratio; r2_lower/r2_upper come from rounding the
  /// lattice down/up, r2 is their midpoint.
  double r2 = 0.0;
  double r2_lower = 0.0;
  double r2_upper = 0.0;
  std::vector<double> ell;  // H(x - h)/H(x), one per shift
};

struct ClassCheckResult {
  ClassSubject subject = ClassSubject::increment_positive_part;
  double x_depth = 0.0;
  std::vector<ClassCheckRow> rows;  // increasing x; the last row is at x_depth
  ClassVerdict verdict = ClassVerdict::light_tailed_signal;
  std::size_t grid_points = 0;
};

inline constexpr std::string_view kClassCheckCaveat =
    "numerical class diagnostics are evidence only, never proofs of subexponentiality or long-tailedness";

/// Tail function of the examined subject on the real line.
double subject_tail(const IncrementModel& model, ClassSubject subject, double x);

/// Two-fold convolution ratios on a dense lattice and shift ratios in closed
/// form along a trajectory ending where the subject's tail equals depth.
/// Throws NumericalError when the lattice would need more than max_points.
ClassCheckResult class_check(const IncrementModel& model, ClassSubject subject,
                             const ClassCheckOptions& options = {});

}  // namespace vvlab
