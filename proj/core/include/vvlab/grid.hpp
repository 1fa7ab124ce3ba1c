#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace vvlab {

/// A lattice distribution on the points origin + i * step, i = 0..n-1,
/// plus an overflow atom at +infinity, stored by its tail values
/// tail[i] = P(X > origin + i * step). The last tail value is the overflow
/// mass, so evaluating beyond the grid returns it (a conservative clamp).
class GridDistribution {
 public:
  GridDistribution(double origin, double step, std::vector<double> tail);

  enum class Rounding {
    up,    // X rounded up to the next grid point: dominates the source law
    down,  // X rounded down: dominated by the source law
  };

  /// Discretizes a continuous tail function on n grid points. With
  /// Rounding::up all mass below the origin is placed at the origin.
  static GridDistribution from_tail(const std::function<double(double)>& tail, double origin,
                                    double step, std::size_t n, Rounding rounding = Rounding::up);

  double origin() const noexcept { return origin_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return tail_.size(); }
  double point(std::size_t i) const noexcept { return origin_ + static_cast<double>(i) * step_; }
  double top() const noexcept { return point(size() - 1); }
  const std::vector<double>& tail_values() const noexcept { return tail_; }
  double overflow() const noexcept { return tail_.back(); }

  /// P(X > y).
  double tail(double y) const noexcept;

  /// Point masses p_0..p_{n-1}; the overflow mass is overflow().
  std::vector<double> masses() const;

 private:
  double origin_;
  double step_;
  std::vector<double> tail_;
};

/// Distribution of X + Y for independent lattice variables on grids with
/// the same step. The result keeps max(size) points starting at the summed
/// origin; mass beyond the last point joins the overflow atom. Large inputs
/// are convolved by FFT, and a round-off allowance is added to the tail so
/// that the result still dominates the exact lattice convolution.
GridDistribution convolve(const GridDistribution& a, const GridDistribution& b);

/// m-fold convolution power of g (m >= 1; m == 1 returns g).
GridDistribution convolve_tail(const GridDistribution& g, int m);

}  // namespace vvlab
