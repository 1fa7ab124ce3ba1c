#pragma once

#include <cmath>
#include <cstdint>

namespace vvlab {

/// Streaming mean/variance accumulator (Welford), mergeable with Chan's
/// pairwise update. Merging in a fixed order gives bit-identical results.
class RunningStats {
 public:
  void add(double v) noexcept {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }

  void merge(const RunningStats& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    n_ += other.n_;
  }

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; zero for fewer than two samples.
  double variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double standard_error() const noexcept {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion at the given confidence level.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

/// Upper quantile of the standard normal: P(Z > z) = p.
double normal_upper_quantile(double p);

/// Simple normal-approximation interval: mean +/- z * stderr.
Interval normal_interval(double mean, double std_error, double confidence = 0.95);

inline bool intervals_overlap(const Interval& a, const Interval& b) noexcept {
  return a.lower <= b.upper && b.lower <= a.upper;
}

}  // namespace vvlab
