#include <gtest/gtest.h>

#include "vvlab/config.hpp"
#include "vvlab/errors.hpp"

using namespace vvlab;

namespace {

const char* kMinimal = R"({"model": {"jump": {"family": "pareto", "alpha": 2.5, "scale": 1.0}, "drift": 2.0}})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.jump, JumpDistribution::pareto(2.5, 1.0));
  EXPECT_EQ(c.drift, 2.0);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_TRUE(c.x_grid.empty());
  EXPECT_EQ(c.simulation, SimConfig{});
}

TEST(Config, FullRoundTrip) {
  const std::string text = R"({
    "model": {"jump": {"family": "weibull", "shape": 0.5, "scale": 2.0}, "drift": 5.0,
              "second_tail": {"mode": "quadrature", "rel_tol": 1e-10}},
    "x_grid": {"start": 1, "stop": 100, "count": 5, "spacing": "geometric"},
    "seed": 42,
    "simulation": {"n_paths": 1e5, "barrier": 500, "step_cap": 1000000, "substreams": 32, "estimator": "crude"},
    "lower_bound": {"strategy": "empirical", "epsilon_grid": [0.1, 0.2], "delta_grid": [0.05],
                    "L_step": 0.5, "L_max": 1000, "horizon": 500, "n_paths": 300},
    "renewal": {"R": 30, "epsilon": 0.2, "gap_max": 100, "step_cap": 5000, "R_values": [10, 50],
                "method": "one-sided", "confidence": 0.9, "n_paths": 700},
    "upper_bound": {"tolerance": 1e-6, "grid_step": 0.01, "grid_top": 900, "max_points": 1000000,
                    "gamma_method": "two-sided"},
    "big_jump": {"x": [50, 60], "n_paths": 1000},
    "class_check": {"depth": 1e-5, "step": 0.02, "max_points": 100000, "trajectory_points": 4,
                    "shifts": [1, 2, 5], "r2_low": 1.8, "r2_high": 2.2, "long_tail_max": 1.1,
                    "light_tail_min": 1.6, "subjects": ["second-tail"]},
    "output": {"dir": "out"}
  })";
  const auto c = parse_config(text);
  EXPECT_EQ(c.simulation.n_paths, 100000u);
  EXPECT_EQ(c.estimator, EstimatorKind::crude);
  ASSERT_EQ(c.x_grid.size(), 5u);
  EXPECT_DOUBLE_EQ(c.x_grid.front(), 1.0);
  EXPECT_NEAR(c.x_grid.back(), 100.0, 1e-12);
  EXPECT_NEAR(c.x_grid[2], 10.0, 1e-12);
  EXPECT_EQ(c.class_check.subjects, std::vector<ClassSubject>{ClassSubject::second_tail});
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(again, c);
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, DefaultsRoundTrip) {
  auto c = parse_config(kMinimal);
  c.x_grid = {0.1, 1.0 / 3.0, 1e10};
  EXPECT_EQ(parse_config(config_to_json(c)), c);
}

TEST(Config, ThreadsAreNotPartOfTheExperiment) {
  auto c = parse_config(kMinimal);
  const std::string before = config_to_json(c);
  c.simulation.threads = 7;
  EXPECT_EQ(config_to_json(c), before);
}

TEST(Config, UnknownFieldsNamePath) {
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 2.5}, "drift": 2}, "sim": {}})")
                .find("/sim: unknown field"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 2.5, "shape": 1}, "drift": 2}})")
                .find("/model/jump/shape: unknown field"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 2.5}, "drift": 2},
                         "simulation": {"n_path": 10}})")
                .find("/simulation/n_path"),
            std::string::npos);
}

TEST(Config, SyntaxErrorsReportLine) {
  const std::string msg = error_of("{\n\"model\": {\n  \"jump\": ,\n}}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, TypeAndRangeErrorsNameField) {
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": "x"}, "drift": 2}})")
                .find("/model/jump/alpha: expected a number"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 2.5}, "drift": 2},
                         "simulation": {"n_paths": -5}})")
                .find("/simulation/n_paths"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 2.5}, "drift": 2},
                         "renewal": {"method": "three-sided"}})")
                .find("/renewal/method: unknown value"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "gamma"}, "drift": 2}})").find("/model/jump/family"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"drift": 2})").find("/model: required field is missing"), std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 2.5}, "drift": 2},
                         "x_grid": [1, -2]})")
                .find("/x_grid/1"),
            std::string::npos);
}

TEST(Config, ModelConstraintSurfaces) {
  const std::string msg = error_of(R"({"model": {"jump": {"family": "exponential", "rate": 1}, "drift": 0}})");
  EXPECT_NE(msg.find("/model"), std::string::npos);
  EXPECT_NE(msg.find("a = d - E[J]"), std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"jump": {"family": "pareto", "alpha": 0.9}, "drift": 20}})")
                .find("/model/jump"),
            std::string::npos);
}

TEST(Config, RenewalEpsilonDefaultsToHalfDrift) {
  const auto c = parse_config(kMinimal);
  const auto p = c.renewal.params(c.model());
  EXPECT_NEAR(p.epsilon, 1.0 / 6.0, 1e-15);
  EXPECT_EQ(c.renewal.params(c.model(), 50.0).R, 50.0);
}

TEST(Config, StageSeedsDiffer) {
  const auto c = parse_config(kMinimal);
  EXPECT_NE(c.stage_simulation(stage::tail_mc).seed, c.stage_simulation(stage::gamma).seed);
  EXPECT_EQ(c.stage_simulation(stage::gamma, 77).n_paths, 77u);
  EXPECT_EQ(c.stage_simulation(stage::gamma).n_paths, c.simulation.n_paths);
}
