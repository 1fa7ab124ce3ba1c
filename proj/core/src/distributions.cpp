#include "vvlab/distributions.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <sstream>

#include "vvlab/errors.hpp"
#include "vvlab/quadrature.hpp"

namespace vvlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate(const JumpDistribution::Family& family) {
  std::visit(
      overloaded{
          [](const Pareto& p) {
            require(std::isfinite(p.alpha) && p.alpha > 1.0,
                    "pareto: alpha must be > 1 (finite mean required)");
            require(std::isfinite(p.scale) && p.scale > 0.0, "pareto: scale must be > 0");
          },
          [](const Weibull& w) {
            require(std::isfinite(w.shape) && w.shape > 0.0, "weibull: shape must be > 0");
            require(std::isfinite(w.scale) && w.scale > 0.0, "weibull: scale must be > 0");
          },
          [](const Lognormal& l) {
            require(std::isfinite(l.mu), "lognormal: mu must be finite");
            require(std::isfinite(l.sigma) && l.sigma > 0.0, "lognormal: sigma must be > 0");
          },
          [](const Exponential& e) {
            require(std::isfinite(e.rate) && e.rate > 0.0, "exponential: rate must be > 0");
          },
      },
      family);
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kNoBound = std::numeric_limits<double>::infinity();

}  // namespace

double normal_upper_tail(double z) noexcept { return 0.5 * std::erfc(z * kInvSqrt2); }

double normal_quantile(double u) {
  return -1.4142135623730950488 * boost::math::erfc_inv(2.0 * u);
}

JumpDistribution::JumpDistribution(Family family) : family_(family) { validate(family_); }

JumpDistribution JumpDistribution::pareto(double alpha, double scale) {
  return JumpDistribution(Pareto{alpha, scale});
}
JumpDistribution JumpDistribution::weibull(double shape, double scale) {
  return JumpDistribution(Weibull{shape, scale});
}
JumpDistribution JumpDistribution::lognormal(double mu, double sigma) {
  return JumpDistribution(Lognormal{mu, sigma});
}
JumpDistribution JumpDistribution::exponential(double rate) {
  return JumpDistribution(Exponential{rate});
}

std::string_view JumpDistribution::name() const noexcept {
  return visit(overloaded{
      [](const Pareto&) { return std::string_view("pareto"); },
      [](const Weibull&) { return std::string_view("weibull"); },
      [](const Lognormal&) { return std::string_view("lognormal"); },
      [](const Exponential&) { return std::string_view("exponential"); },
  });
}

double JumpDistribution::support_min() const noexcept {
  return visit([](const auto& f) { return f.support_min(); });
}
double JumpDistribution::tail(double x) const noexcept {
  return visit([x](const auto& f) { return f.tail(x); });
}
double JumpDistribution::density(double x) const noexcept {
  return visit([x](const auto& f) { return f.density(x); });
}
double JumpDistribution::mean() const noexcept {
  return visit([](const auto& f) { return f.mean(); });
}
double JumpDistribution::variance() const noexcept {
  return visit([](const auto& f) { return f.variance(); });
}
double JumpDistribution::quantile(double u) const {
  return visit([u](const auto& f) { return f.quantile(u); });
}

double JumpDistribution::integrated_tail(double x) const {
  // Below the support the tail is identically 1.
  const double lo = support_min();
  if (x < lo) return (lo - x) + integrated_tail(lo);
  return visit(overloaded{
      [x](const Pareto& p) {
        return p.scale * std::pow(p.scale / x, p.alpha - 1.0) / (p.alpha - 1.0);
      },
      [x](const Exponential& e) { return std::exp(-e.rate * x) / e.rate; },
      [x](const Weibull& w) {
        const double s = 1.0 / w.shape;
        const double z = std::pow(x / w.scale, w.shape);
        return w.scale * s * boost::math::tgamma(s, z);
      },
      [x](const Lognormal& l) {
        if (x <= 0.0) return l.mean();
        const double z = (std::log(x) - l.mu) / l.sigma;
        return l.mean() * normal_upper_tail(z - l.sigma) - x * normal_upper_tail(z);
      },
  });
}

double JumpDistribution::integrated_tail_bound(double x) const {
  return visit(overloaded{
      [x](const Pareto& p) {
        const double t = std::max(x, p.scale);
        return p.scale * std::pow(p.scale / t, p.alpha - 1.0) / (p.alpha - 1.0);
      },
      [x](const Exponential& e) { return std::exp(-e.rate * std::max(x, 0.0)) / e.rate; },
      [x](const Weibull& w) {
        // Gamma(s, z) <= z^(s-1) e^-z for s <= 1, and <= 2 z^(s-1) e^-z once
        // z >= 2(s-1) for s > 1.
        if (x <= 0.0) return kNoBound;
        const double s = 1.0 / w.shape;
        const double z = std::pow(x / w.scale, w.shape);
        double factor = 1.0;
        if (s > 1.0) {
          if (z < 2.0 * (s - 1.0)) return kNoBound;
          factor = 2.0;
        }
        return w.scale * s * factor * std::exp((s - 1.0) * std::log(z) - z);
      },
      [x](const Lognormal& l) {
        // E[(J-x)+] <= E[J; J > x] = mean * Q(w), with Q(w) <= phi(w)/w.
        if (x <= 0.0) return kNoBound;
        const double w = (std::log(x) - l.mu) / l.sigma - l.sigma;
        if (w <= 1.0) return kNoBound;
        return l.mean() * kInvSqrt2Pi * std::exp(-0.5 * w * w) / w;
      },
  });
}

std::string JumpDistribution::describe() const {
  std::ostringstream os;
  os.precision(10);
  visit(overloaded{
      [&os](const Pareto& p) { os << "pareto(alpha=" << p.alpha << ", scale=" << p.scale << ")"; },
      [&os](const Weibull& w) { os << "weibull(shape=" << w.shape << ", scale=" << w.scale << ")"; },
      [&os](const Lognormal& l) { os << "lognormal(mu=" << l.mu << ", sigma=" << l.sigma << ")"; },
      [&os](const Exponential& e) { os << "exponential(rate=" << e.rate << ")"; },
  });
  return os.str();
}

std::string_view to_string(SecondTailMode mode) noexcept {
  return mode == SecondTailMode::closed_form ? "closed-form" : "quadrature";
}

SecondTail::SecondTail(JumpDistribution dist, SecondTailMode mode, double rel_tol, double shift)
    : dist_(dist), mode_(mode), rel_tol_(rel_tol), shift_(shift) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("second tail: rel_tol must be in (0, 1)");
}

double SecondTail::integral(double x) const {
  const double at = x + shift_;
  if (mode_ == SecondTailMode::closed_form) return dist_.integrated_tail(at);
  return integrate_tail(dist_, at, rel_tol_).value;
}

}  // namespace vvlab
