#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "vvlab/distributions.hpp"
#include "vvlab/errors.hpp"
#include "vvlab/quadrature.hpp"
#include "vvlab/random.hpp"

using namespace vvlab;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Independent reference: integral of tail over [x, inf) by exp-sinh.
double reference_integrated_tail(const JumpDistribution& d, double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double lo = std::max(x, d.support_min());
  const double below = std::max(0.0, d.support_min() - x);
  return below + integrator.integrate([&](double t) { return d.tail(t); }, lo,
                                      std::numeric_limits<double>::infinity(), 1e-13);
}

std::vector<JumpDistribution> random_laws(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<JumpDistribution> out;
  for (int i = 0; i < count; ++i) {
    switch (i % 4) {
      case 0: out.push_back(JumpDistribution::pareto(1.2 + 3.0 * u(rng), 0.2 + 3.0 * u(rng))); break;
      case 1: out.push_back(JumpDistribution::weibull(0.3 + 1.5 * u(rng), 0.2 + 3.0 * u(rng))); break;
      case 2: out.push_back(JumpDistribution::lognormal(-1.0 + 2.0 * u(rng), 0.2 + 1.3 * u(rng))); break;
      default: out.push_back(JumpDistribution::exponential(0.2 + 3.0 * u(rng))); break;
    }
  }
  return out;
}

}  // namespace

TEST(Pareto, TailMatchesHighPrecision) {
  const auto d = JumpDistribution::pareto(2.5, 1.0);
  for (double x : {1.0, 1.5, 2.0, 10.0, 157.0, 1e4, 1e8}) {
    const big exact = boost::multiprecision::pow(big(1) / big(x), big(2.5));
    EXPECT_NEAR(d.tail(x), static_cast<double>(exact), 1e-14 * static_cast<double>(exact)) << x;
  }
  EXPECT_EQ(d.tail(0.5), 1.0);
}

TEST(Pareto, IntegratedTailMatchesHighPrecision) {
  const auto d = JumpDistribution::pareto(2.5, 1.5);
  for (double x : {1.5, 3.0, 42.0, 1e6}) {
    const big s = big(1.5);
    const big exact = boost::multiprecision::pow(s, big(2.5)) * boost::multiprecision::pow(big(x), big(-1.5)) / big(1.5);
    EXPECT_NEAR(d.integrated_tail(x), static_cast<double>(exact), 1e-13 * static_cast<double>(exact)) << x;
  }
  // Below the support the tail is 1, so the integral grows linearly.
  EXPECT_NEAR(d.integrated_tail(0.5), 1.0 + 1.5 / 1.5, 1e-14);
}

TEST(Distributions, MeanAgreesWithIntegratedTailAtZero) {
  std::mt19937_64 rng(11);
  for (const auto& d : random_laws(rng, 40)) {
    EXPECT_NEAR(reference_integrated_tail(d, 0.0), d.mean(), 1e-9 * d.mean()) << d.describe();
  }
  EXPECT_DOUBLE_EQ(JumpDistribution::pareto(2.5, 1.0).mean(), 2.5 / 1.5);
}

TEST(Distributions, VarianceAgreesWithTailMoment) {
  // E[X^2] = integral of 2 t tail(t) over [0, inf).
  std::mt19937_64 rng(12);
  for (const auto& d : random_laws(rng, 20)) {
    if (is_infinite(d.variance())) continue;
    boost::math::quadrature::exp_sinh<double> integrator;
    const double lo = d.support_min();
    const double second = lo * lo + integrator.integrate([&](double t) { return 2.0 * t * d.tail(t); }, lo,
                                                         std::numeric_limits<double>::infinity(), 1e-12);
    const double m = d.mean();
    EXPECT_NEAR(second - m * m, d.variance(), 1e-7 * second) << d.describe();
  }
  EXPECT_TRUE(is_infinite(JumpDistribution::pareto(1.8, 1.0).variance()));
  EXPECT_NEAR(JumpDistribution::pareto(2.5, 1.0).variance(), 2.5 / (1.5 * 1.5 * 0.5), 1e-14);
}

TEST(Distributions, QuantileInvertsTail) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (const auto& d : random_laws(rng, 1000)) {
    const double p = u(rng);
    const double x = d.quantile(p);
    EXPECT_NEAR(d.tail(x), 1.0 - p, 1e-9 * (1.0 - p) + 1e-14) << d.describe() << " u=" << p;
  }
}

TEST(Distributions, ClosedFormIntegratedTailMatchesReferenceQuadrature) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& d : random_laws(rng, 200)) {
    const double x = d.quantile(0.5 + 0.4999 * u(rng));
    const double ref = reference_integrated_tail(d, x);
    EXPECT_NEAR(d.integrated_tail(x), ref, 1e-8 * ref) << d.describe() << " x=" << x;
  }
}

TEST(Distributions, RemainderBoundDominates) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& d : random_laws(rng, 1000)) {
    const double x = d.quantile(0.9 + 0.0999 * u(rng));
    EXPECT_GE(d.integrated_tail_bound(x), d.integrated_tail(x) * (1.0 - 1e-12)) << d.describe() << " x=" << x;
  }
}

TEST(Distributions, ExponentialClosedForms) {
  const auto d = JumpDistribution::exponential(2.0);
  for (double x : {0.0, 0.5, 3.0, 20.0}) {
    EXPECT_DOUBLE_EQ(d.tail(x), std::exp(-2.0 * x));
    EXPECT_NEAR(d.integrated_tail(x), std::exp(-2.0 * x) / 2.0, 1e-16);
  }
}

TEST(Distributions, RejectsInvalidParameters) {
  EXPECT_THROW(JumpDistribution::pareto(1.0, 1.0), ConfigError);
  EXPECT_THROW(JumpDistribution::pareto(2.5, 0.0), ConfigError);
  EXPECT_THROW(JumpDistribution::weibull(0.0, 1.0), ConfigError);
  EXPECT_THROW(JumpDistribution::lognormal(0.0, -1.0), ConfigError);
  EXPECT_THROW(JumpDistribution::exponential(0.0), ConfigError);
  EXPECT_THROW(JumpDistribution::exponential(std::nan("")), ConfigError);
}

TEST(SecondTail, ClampsAtOne) {
  const SecondTail st(JumpDistribution::pareto(2.5, 1.0));
  EXPECT_EQ(st(0.0), 1.0);
  EXPECT_NEAR(st.integral(0.0), 1.0 + 1.0 / 1.5, 1e-14);
  EXPECT_NEAR(st(10.0), std::pow(10.0, -1.5) / 1.5, 1e-16);
}

TEST(SecondTail, ShiftMovesTheArgument) {
  const SecondTail st(JumpDistribution::pareto(2.5, 1.0), SecondTailMode::closed_form, 1e-12, 2.0);
  // Reference increment model: Fs(x) = 2 (x + 2)^{-3/2} / 3.
  for (double x : {1.0, 10.0, 156.7}) EXPECT_NEAR(st(x), std::pow(x + 2.0, -1.5) / 1.5, 1e-15);
}

TEST(SecondTail, QuadratureAgreesWithClosedForm) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& d : random_laws(rng, 100)) {
    const SecondTail closed(d, SecondTailMode::closed_form);
    const SecondTail quad(d, SecondTailMode::quadrature, 1e-10);
    const double x = d.quantile(0.3 + 0.6999 * u(rng));
    EXPECT_NEAR(quad(x), closed(x), 1e-8 * closed(x)) << d.describe() << " x=" << x;
  }
}

TEST(SecondTail, RejectsBadTolerance) {
  EXPECT_THROW(SecondTail(JumpDistribution::exponential(1.0), SecondTailMode::quadrature, 0.0), ConfigError);
}

TEST(Quadrature, FiniteIntervalPolynomial) {
  const auto r = integrate([](double t) { return t * t; }, 0.0, 3.0, 1e-12, 0.0);
  EXPECT_NEAR(r.value, 9.0, 1e-12);
}

TEST(Normal, QuantileInvertsUpperTail) {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.8, 0.999}) {
    EXPECT_NEAR(normal_upper_tail(-normal_quantile(p)), p, 1e-12 * std::max(p, 1e-3)) << p;
  }
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
}

TEST(Sampling, EmpiricalTailMatches) {
  const auto d = JumpDistribution::pareto(2.5, 1.0);
  RandomStream stream(5);
  const int n = 200000;
  int above = 0;
  for (int i = 0; i < n; ++i) above += d.sample(stream) > 3.0;
  const double p = d.tail(3.0);
  EXPECT_NEAR(static_cast<double>(above) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Sampling, SubstreamsAreReproducible) {
  RandomStream a = RandomStream::substream(9, 3);
  RandomStream b = RandomStream::substream(9, 3);
  RandomStream c = RandomStream::substream(9, 4);
  for (int i = 0; i < 10; ++i) {
    const double ua = a.uniform();
    EXPECT_EQ(ua, b.uniform());
    EXPECT_NE(ua, c.uniform());
    EXPECT_GT(ua, 0.0);
    EXPECT_LT(ua, 1.0);
  }
}
