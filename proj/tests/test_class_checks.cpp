#include <cmath>

#include <gtest/gtest.h>

#include "vvlab/class_checks.hpp"
#include "vvlab/errors.hpp"

using namespace vvlab;

TEST(ClassCheck, ParetoPositivePartLooksSubexponential) {
  const IncrementModel m(JumpDistribution::pareto(2.5, 1.0), 2.0);
  const auto r = class_check(m, ClassSubject::increment_positive_part);
  const auto& last = r.rows.back();
  EXPECT_NEAR(last.tail, 1e-4, 1e-8);
  EXPECT_GE(last.r2, 1.9);
  EXPECT_LE(last.r2, 2.1);
  EXPECT_LE(last.r2_lower, last.r2_upper);
  EXPECT_EQ(r.verdict, ClassVerdict::consistent_with_subexponential);
}

TEST(ClassCheck, SecondTailOfParetoLooksSubexponential) {
  const IncrementModel m(JumpDistribution::pareto(2.5, 1.0), 2.0);
  const auto r = class_check(m, ClassSubject::second_tail);
  EXPECT_EQ(r.verdict, ClassVerdict::consistent_with_subexponential);
}

TEST(ClassCheck, RefiningTheLatticeChangesLittle) {
  const IncrementModel m(JumpDistribution::pareto(2.5, 1.0), 2.0);
  ClassCheckOptions coarse;
  coarse.step = 0.02;
  ClassCheckOptions fine;
  fine.step = 0.01;
  const auto a = class_check(m, ClassSubject::increment_positive_part, coarse);
  const auto b = class_check(m, ClassSubject::increment_positive_part, fine);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    // The finer bracket sits inside the coarser one and is narrower.
    EXPECT_LE(b.rows[i].r2_upper - b.rows[i].r2_lower, a.rows[i].r2_upper - a.rows[i].r2_lower + 1e-12);
    EXPECT_GE(b.rows[i].r2_lower, a.rows[i].r2_lower - 1e-9);
    EXPECT_LE(b.rows[i].r2_upper, a.rows[i].r2_upper + 1e-9);
  }
}

TEST(ClassCheck, ExponentialIsLightTailed) {
  const double d = 4.0 / 3.0;
  const IncrementModel m(JumpDistribution::exponential(1.0), d);
  const auto r = class_check(m, ClassSubject::increment_positive_part);
  EXPECT_EQ(r.verdict, ClassVerdict::light_tailed_signal);
  int exact_rows = 0;
  for (const auto& row : r.rows) {
    if (row.x < 1.0) continue;
    EXPECT_NEAR(row.ell[0], std::exp(1.0), 1e-12);
    ++exact_rows;
  }
  EXPECT_GE(exact_rows, 3);
}

TEST(ClassCheck, ExponentialTwoFoldRatioMatchesClosedForm) {
  // H+ has an atom 1 - e^{-d} at 0 and density e^{-(x+d)} on (0, inf), so
  // r2(x) = 2 (1 - e^{-d}) + e^{-d} (1 + x).
  const double d = 4.0 / 3.0;
  const IncrementModel m(JumpDistribution::exponential(1.0), d);
  const auto r = class_check(m, ClassSubject::increment_positive_part);
  for (const auto& row : r.rows) {
    const double exact = 2.0 * (1.0 - std::exp(-d)) + std::exp(-d) * (1.0 + row.x);
    EXPECT_LE(row.r2_lower, exact * (1 + 1e-9)) << row.x;
    EXPECT_GE(row.r2_upper, exact * (1 - 1e-9)) << row.x;
    EXPECT_NEAR(row.r2, exact, 0.01 * exact) << row.x;
  }
}

TEST(ClassCheck, WeibullShiftRatioTendsToOne) {
  const double d = 3.0;  // Weibull(0.5, 1) has mean 2
  const IncrementModel m(JumpDistribution::weibull(0.5, 1.0), d);
  ClassCheckOptions opt;
  opt.depth = 1e-8;
  opt.step = 0.05;
  const auto r = class_check(m, ClassSubject::increment_positive_part, opt);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) {
    if (row.x < 1.0) continue;
    const double exact = std::exp(std::sqrt(row.x + d) - std::sqrt(row.x + d - 1.0));
    EXPECT_NEAR(row.ell[0], exact, 1e-9 * exact);
    EXPECT_LT(row.ell[0], prev);
    prev = row.ell[0];
  }
  EXPECT_LT(prev, 1.15);
}

TEST(ClassCheck, ShallowGridIsAnError) {
  const IncrementModel m(JumpDistribution::pareto(2.5, 1.0), 2.0);
  ClassCheckOptions opt;
  opt.max_points = 100;
  EXPECT_THROW(class_check(m, ClassSubject::increment_positive_part, opt), NumericalError);
}

TEST(ClassCheck, OptionsValidation) {
  ClassCheckOptions opt;
  opt.r2_low = 2.2;
  EXPECT_THROW(opt.validate(), ConfigError);
  opt = {};
  opt.depth = 1.0;
  EXPECT_THROW(opt.validate(), ConfigError);
}

TEST(ClassCheck, CaveatText) {
  EXPECT_NE(kClassCheckCaveat.find("never proofs"), std::string_view::npos);
}
