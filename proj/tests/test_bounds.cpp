#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vvlab/bounds.hpp"
#include "vvlab/errors.hpp"

using namespace vvlab;

namespace {

IncrementModel reference_model() { return IncrementModel(JumpDistribution::pareto(2.5, 1.0), 2.0); }

constexpr double kA = 1.0 / 3.0;

}  // namespace

TEST(Asymptote, ReferenceClosedForm) {
  const auto m = reference_model();
  for (double x : {0.0, 10.0, 156.7}) EXPECT_NEAR(asymptote(m, x), 2.0 * std::pow(x + 2.0, -1.5), 1e-15);
  // The tail level 1e-3 is reached near x = 156.7.
  EXPECT_NEAR(asymptote(m, std::pow(2000.0, 2.0 / 3.0) - 2.0), 1e-3, 1e-15);
}

TEST(ChebyshevL, ReferenceValue) {
  EXPECT_NEAR(choose_L_chebyshev(reference_model(), 0.1, 0.1), (20.0 / 9.0) / 0.04, 1e-12);
}

TEST(ChebyshevL, SupremumOverStepsIsDelta) {
  const auto m = reference_model();
  const double var = m.variance();
  for (double eps : {0.01, 0.1, 0.5}) {
    for (double delta : {0.01, 0.1, 0.4}) {
      const double L = choose_L_chebyshev(m, eps, delta);
      double sup = 0.0;
      for (int n = 1; n <= 2'000'000; ++n) {
        const double v = n * var / ((L + n * eps) * (L + n * eps));
        sup = std::max(sup, v);
      }
      EXPECT_LE(sup, delta * (1 + 1e-12));
      // The continuous maximiser n = L / eps attains delta exactly.
      const double n = L / eps;
      EXPECT_NEAR(n * var / ((L + n * eps) * (L + n * eps)), delta, 1e-12 * delta);
    }
  }
}

TEST(ChebyshevL, InfiniteVarianceIsNumericalError) {
  const IncrementModel m(JumpDistribution::pareto(1.8, 1.0), 3.0);
  EXPECT_THROW(choose_L_chebyshev(m, 0.1, 0.1), NumericalError);
  EXPECT_THROW(choose_L_chebyshev(reference_model(), 0.0, 0.1), ConfigError);
}

TEST(LowerBound, HandValue) {
  const auto m = reference_model();
  LowerBoundParams p;
  p.epsilon = 0.1;
  p.delta = 0.1;
  p.L = 55.0;
  const double fs = std::pow(50.0 + 55.0 + 2.0, -1.5) / 1.5;
  EXPECT_NEAR(lower_bound(m, 50.0, p), 0.9 * fs / (kA + 0.1 + fs), 1e-16);
}

TEST(LowerBound, NeverExceedsAsymptote) {
  const auto m = reference_model();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    LowerBoundParams p;
    p.epsilon = 1e-3 + u(rng);
    p.delta = 1e-3 + 0.99 * u(rng);
    p.L = 100.0 * u(rng);
    const double x = 500.0 * u(rng);
    EXPECT_LE(lower_bound(m, x, p), asymptote(m, x));
    EXPECT_GE(lower_bound(m, x, p), 0.0);
  }
}

TEST(LowerBound, OptimizerScansGridAndKeepsFirstTie) {
  const auto m = reference_model();
  const auto provider = LProvider::chebyshev(m);
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.5};
  const std::vector<double> deltas{0.05, 0.1, 0.2, 0.5};
  const auto opt = optimize_lower_bound(m, 100.0, eps, deltas, provider);
  for (double e : eps) {
    for (double d : deltas) EXPECT_LE(lower_bound(m, 100.0, provider(e, d)), opt.value);
  }
  const std::vector<double> same{0.1, 0.1};
  const std::vector<double> one{0.2};
  const auto tie = optimize_lower_bound(m, 100.0, same, one, provider);
  EXPECT_EQ(tie.params.epsilon, 0.1);
}

TEST(EmpiricalL, FromDeficitsByHand) {
  const std::vector<double> d{0.05, 0.2, 0.35, 1.0};
  EmpiricalLOptions opt;
  opt.L_step = 0.1;
  const auto r = choose_L_from_deficits(d, 0.5, opt);  // need frequency >= 0.75
  EXPECT_NEAR(r.L, 0.4, 1e-12);
  EXPECT_DOUBLE_EQ(r.frequency, 0.75);
  opt.L_max = 0.3;
  EXPECT_THROW(choose_L_from_deficits(d, 0.5, opt), NumericalError);
}

TEST(EmpiricalL, ValidatesRequestedFrequency) {
  const auto m = reference_model();
  SimConfig cfg;
  cfg.n_paths = 2000;
  EmpiricalLOptions opt;
  opt.horizon = 2000;
  const auto r = choose_L_empirical(m, 0.1, 0.1, cfg, opt);
  EXPECT_GE(r.frequency, 0.95);
  EXPECT_LT(r.L, choose_L_chebyshev(m, 0.1, 0.1));
}

TEST(BuildG, ClampAndLimitRatio) {
  const auto m = reference_model();
  const double R = 20.0;
  const double eps = kA / 2.0;
  const double gamma = 0.07;
  GridSpec spec;
  spec.step = 0.5;
  spec.top = 12000.0;
  const auto G = build_G(m, R, eps, gamma, spec);
  // G is 1 up to the point where I(y - R - a + eps) = gamma (a - eps).
  EXPECT_EQ(G.tail(G.origin() - 1.0), 1.0);
  EXPECT_NEAR(G.tail_values()[0], 1.0, 1e-9);
  const double shift = R + kA - eps;
  const auto& st = m.second_tail_function();
  EXPECT_GE(st.integral(G.origin() - shift), gamma * (kA - eps) * (1 - 1e-9));
  // Far out, G / Fs tends to 1 / (gamma (a - eps)).
  bool checked = false;
  for (std::size_t i = 0; i + 1 < G.size(); i += 101) {
    const double y = G.point(i);
    if (m.second_tail(y) > 1e-6) continue;
    EXPECT_NEAR(G.tail(y) / m.second_tail(y) * gamma * (kA - eps), 1.0, 0.05) << y;
    checked = true;
  }
  EXPECT_TRUE(checked);
}

TEST(BuildG, DominatesContinuousFormEverywhere) {
  const auto m = reference_model();
  GridSpec spec;
  spec.step = 0.05;
  spec.top = 400.0;
  const double R = 10.0;
  const double eps = 0.1;
  const double gamma = 0.2;
  const auto G = build_G(m, R, eps, gamma, spec);
  const auto& st = m.second_tail_function();
  for (double y = 0.0; y < 399.0; y += 0.37) {
    const double exact = std::min(1.0, st.integral(y - R - kA + eps) / (gamma * (kA - eps)));
    EXPECT_GE(G.tail(y), exact * (1 - 1e-12)) << y;
  }
}

TEST(BuildG, Errors) {
  const auto m = reference_model();
  GridSpec spec;
  spec.top = 100.0;
  EXPECT_THROW(build_G(m, 10.0, 0.1, 0.0, spec), NumericalError);
  EXPECT_THROW(build_G(m, 10.0, 0.1, 1.5, spec), ConfigError);
  EXPECT_THROW(build_G(m, 10.0, kA, 0.1, spec), ConfigError);
  EXPECT_THROW(build_G(m, 0.0, 0.1, 0.1, spec), ConfigError);
  spec.max_points = 10;
  EXPECT_THROW(build_G(m, 10.0, 0.1, 0.1, spec), NumericalError);
}

TEST(Series, DepthIsSmallestAdmissible) {
  for (double gamma : {0.01, 0.1, 0.5, 0.9}) {
    for (double tol : {1e-3, 1e-9}) {
      const int m = series_depth(gamma, tol);
      EXPECT_LE(std::pow(gamma, m + 1) / (1 - gamma), tol);
      if (m > 1) EXPECT_GT(std::pow(gamma, m) / (1 - gamma), tol);
    }
  }
  EXPECT_EQ(series_depth(0.1, 1e-9), 9);
}

TEST(Series, SingleTermArithmetic) {
  const auto m = reference_model();
  GridSpec spec;
  spec.top = 400.0;
  const double R = 10.0;
  const double eps = 0.1;
  const double gamma = 0.05;
  const double tol = gamma * gamma / (1 - gamma);
  const auto G = build_G(m, R, eps, gamma, spec);
  const double y = 90.0;
  const double ys[] = {y};
  const auto s = upper_bound_series(G, gamma, tol, ys);
  EXPECT_EQ(s.depth, 1);
  EXPECT_NEAR(s.values[0], gamma * G.tail(y) + gamma * gamma / (1 - gamma), 1e-15);
}

TEST(UpperBound, MonotoneInLevelAndGamma) {
  const auto m = reference_model();
  GridSpec spec;
  spec.step = 0.02;
  spec.top = 800.0;
  const double R = 20.0;
  const double eps = kA / 2.0;
  double prev = 2.0;
  for (double x : {25.0, 40.0, 80.0, 160.0}) {
    const double v = upper_bound(m, x, R, eps, 0.06, 0.08, 1e-9, spec);
    EXPECT_LE(v, prev);
    prev = v;
    EXPECT_LE(v, upper_bound(m, x, R, eps, 0.06, 0.12, 1e-9, spec));
  }
}

TEST(UpperBound, VanishesWithGamma) {
  const auto m = reference_model();
  GridSpec spec;
  spec.top = 800.0;
  const double v = upper_bound(m, 100.0, 20.0, 0.1, 1e-8, 1e-8, 1e-12, spec);
  EXPECT_LT(v, 2e-8);
}

TEST(UpperBound, DominatesLowerBound) {
  const auto m = reference_model();
  const auto provider = LProvider::chebyshev(m);
  const std::vector<double> grid{0.02, 0.05, 0.1, 0.2, 0.5};
  GridSpec spec;
  spec.top = 800.0;
  for (double x : {25.0, 60.0, 160.0}) {
    const double lo = optimize_lower_bound(m, x, grid, grid, provider).value;
    EXPECT_LE(lo, upper_bound(m, x, 20.0, kA / 2.0, 0.06, 0.08, 1e-9, spec));
  }
}

TEST(UpperBound, Errors) {
  const auto m = reference_model();
  GridSpec spec;
  EXPECT_THROW(upper_bound(m, 10.0, 20.0, 0.1, 0.05, 0.06, 1e-9, spec), ConfigError);
  EXPECT_THROW(upper_bound(m, 100.0, 20.0, 0.1, 0.5, 1.0, 1e-9, spec), NumericalError);
}
