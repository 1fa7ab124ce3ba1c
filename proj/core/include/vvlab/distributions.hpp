#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

#include "vvlab/random.hpp"

namespace vvlab {

inline constexpr double kInfiniteVariance = std::numeric_limits<double>::infinity();

/// True when a variance value is the infinite-variance marker.
inline bool is_infinite(double v) noexcept { return std::isinf(v); }

double normal_quantile(double u);
double normal_upper_tail(double z) noexcept;

// Each family provides closed forms on the real line. All are supported on
// [0, inf) except Pareto, which lives on [scale, inf). Everything here is
// inline because the path simulators call tail() and quantile() per step.

struct Pareto {
  double alpha;
  double scale;

  friend bool operator==(const Pareto&, const Pareto&) = default;

  double support_min() const noexcept { return scale; }
  double tail(double x) const noexcept {
    return x <= scale ? 1.0 : std::pow(scale / x, alpha);
  }
  double density(double x) const noexcept {
    return x < scale ? 0.0 : alpha / scale * std::pow(scale / x, alpha + 1.0);
  }
  double quantile(double u) const noexcept {
    return scale * std::pow(1.0 - u, -1.0 / alpha);
  }
  double mean() const noexcept { return alpha * scale / (alpha - 1.0); }
  double variance() const noexcept {
    if (alpha <= 2.0) return kInfiniteVariance;
    return alpha * scale * scale / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0));
  }
};

struct Weibull {
  double shape;
  double scale;

  friend bool operator==(const Weibull&, const Weibull&) = default;

  double support_min() const noexcept { return 0.0; }
  double tail(double x) const noexcept {
    return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / scale, shape));
  }
  double density(double x) const noexcept {
    if (x <= 0.0) return 0.0;
    const double z = std::pow(x / scale, shape);
    return shape / x * z * std::exp(-z);
  }
  double quantile(double u) const noexcept {
    return scale * std::pow(-std::log1p(-u), 1.0 / shape);
  }
  double mean() const noexcept { return scale * std::tgamma(1.0 + 1.0 / shape); }
  double variance() const noexcept {
    const double g1 = std::tgamma(1.0 + 1.0 / shape);
    return scale * scale * (std::tgamma(1.0 + 2.0 / shape) - g1 * g1);
  }
};

struct Lognormal {
  double mu;
  double sigma;

  friend bool operator==(const Lognormal&, const Lognormal&) = default;

  double support_min() const noexcept { return 0.0; }
  double tail(double x) const noexcept {
    return x <= 0.0 ? 1.0 : normal_upper_tail((std::log(x) - mu) / sigma);
  }
  double density(double x) const noexcept {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (x * sigma * 2.5066282746310002);
  }
  double quantile(double u) const { return std::exp(mu + sigma * normal_quantile(u)); }
  double mean() const noexcept { return std::exp(mu + 0.5 * sigma * sigma); }
  double variance() const noexcept {
    const double s2 = sigma * sigma;
    return std::expm1(s2) * std::exp(2.0 * mu + s2);
  }
};

struct Exponential {
  double rate;

  friend bool operator==(const Exponential&, const Exponential&) = default;

  double support_min() const noexcept { return 0.0; }
  double tail(double x) const noexcept { return x <= 0.0 ? 1.0 : std::exp(-rate * x); }
  double density(double x) const noexcept { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); }
  double quantile(double u) const noexcept { return -std::log1p(-u) / rate; }
  double mean() const noexcept { return 1.0 / rate; }
  double variance() const noexcept { return 1.0 / (rate * rate); }
};

/// A nonnegative jump law: one of the supported parametric families.
///
/// Construction validates parameters and throws ConfigError on anything
/// outside the admissible range (in particular Pareto requires alpha > 1 so
/// that the mean, and hence the integrated tail, is finite).
class JumpDistribution {
 public:
  using Family = std::variant<Pareto, Weibull, Lognormal, Exponential>;

  explicit JumpDistribution(Family family);

  static JumpDistribution pareto(double alpha, double scale);
  static JumpDistribution weibull(double shape, double scale);
  static JumpDistribution lognormal(double mu, double sigma);
  static JumpDistribution exponential(double rate);

  const Family& family() const noexcept { return family_; }
  std::string_view name() const noexcept;

  template <class Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), family_);
  }

  double support_min() const noexcept;
  double tail(double x) const noexcept;
  double density(double x) const noexcept;
  double mean() const noexcept;
  /// Returns kInfiniteVariance when the second moment diverges.
  double variance() const noexcept;
  double quantile(double u) const;
  double sample(RandomStream& stream) const { return quantile(stream.uniform()); }

  /// Closed-form value of the integral of tail() over [x, inf), unclamped.
  double integrated_tail(double x) const;

  /// An analytic upper bound on the integral of tail() over [x, inf), valid
  /// for x above the support infimum. Used as the stopping rule for the
  /// quadrature route, so it never calls integrated_tail().
  double integrated_tail_bound(double x) const;

  std::string describe() const;

  friend bool operator==(const JumpDistribution&, const JumpDistribution&) = default;

 private:
  Family family_;
};

enum class SecondTailMode { closed_form, quadrature };

std::string_view to_string(SecondTailMode mode) noexcept;

/// The integrated (second-tail) distribution of a jump law, optionally
/// shifted: value(x) = min(1, integral of tail(t) over t >= x + shift).
///
/// A shift of d turns the jump's second tail into the second tail of the
/// increment J - d.
class SecondTail {
 public:
  explicit SecondTail(JumpDistribution dist,
                      SecondTailMode mode = SecondTailMode::closed_form,
                      double rel_tol = 1e-12, double shift = 0.0);

  double operator()(double x) const { return std::min(1.0, integral(x)); }
  /// The unclamped integral.
  double integral(double x) const;

  const JumpDistribution& distribution() const noexcept { return dist_; }
  SecondTailMode mode() const noexcept { return mode_; }
  double rel_tol() const noexcept { return rel_tol_; }
  double shift() const noexcept { return shift_; }

 private:
  JumpDistribution dist_;
  SecondTailMode mode_;
  double rel_tol_;
  double shift_;
};

}  // namespace vvlab
