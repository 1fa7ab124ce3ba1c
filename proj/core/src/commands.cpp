#include "vvlab/commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vvlab/bounds.hpp"
#include "vvlab/class_checks.hpp"
#include "vvlab/errors.hpp"
#include "vvlab/renewal.hpp"
#include "vvlab/report.hpp"

namespace vvlab {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kCommands{
    "tail", "itail", "class-check", "simulate", "lower-bound", "upper-bound", "gamma", "big-jump", "report"};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json header(std::string_view command, const ExperimentConfig& config) {
  return {{"command", command}, {"config", json::parse(config_to_json(config))}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const std::vector<double>& require_grid(const ExperimentConfig& config, const char* command) {
  if (config.x_grid.empty()) throw ConfigError(std::string(command) + ": x_grid is required");
  return config.x_grid;
}

std::string shift_label(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", h);
  return buf;
}

std::vector<double> sweep_R(const ExperimentConfig& config) {
  return config.renewal.R_values.empty() ? std::vector<double>{config.renewal.R} : config.renewal.R_values;
}

CommandOutput cmd_tail(const ExperimentConfig& config, bool integrated) {
  const auto& xs = require_grid(config, integrated ? "itail" : "tail");
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const char* column = integrated ? "second_tail" : "tail";
  std::ostringstream csv;
  csv << "x," << column << '\n';
  json rows = json::array();
  for (double x : xs) {
    const double v = integrated ? model.second_tail(x) : model.tail(x);
    csv << format_number(x) << ',' << format_number(v) << '\n';
    rows.push_back({{"x", x}, {column, v}});
  }
  json j = header(integrated ? "itail" : "tail", config);
  j["rows"] = std::move(rows);
  return {csv.str(), dump(j), std::nullopt};
}

CommandOutput cmd_class_check(const ExperimentConfig& config) {
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const auto& opts = config.class_check.options;
  std::ostringstream csv;
  csv << "# " << kClassCheckCaveat << '\n';
  csv << "subject,x,tail,r2,r2_lower,r2_upper";
  for (double h : opts.shifts) csv << ",ell_" << shift_label(h);
  csv << '\n';
  json subjects = json::array();
  for (ClassSubject s : config.class_check.subjects) {
    const ClassCheckResult r = run_stage("class-check", [&] { return class_check(model, s, opts); });
    json rows = json::array();
    for (const auto& row : r.rows) {
      csv << to_string(s) << ',' << format_number(row.x) << ',' << format_number(row.tail) << ','
          << format_number(row.r2) << ',' << format_number(row.r2_lower) << ',' << format_number(row.r2_upper);
      for (double l : row.ell) csv << ',' << format_number(l);
      csv << '\n';
      rows.push_back({{"x", row.x},
                      {"tail", row.tail},
                      {"r2", row.r2},
                      {"r2_lower", row.r2_lower},
                      {"r2_upper", row.r2_upper},
                      {"ell", row.ell}});
    }
    subjects.push_back({{"subject", to_string(s)},
                        {"x_depth", r.x_depth},
                        {"verdict", to_string(r.verdict)},
                        {"grid_points", r.grid_points},
                        {"rows", std::move(rows)}});
  }
  json j = header("class-check", config);
  j["caveat"] = kClassCheckCaveat;
  j["thresholds"] = {{"depth", opts.depth},
                     {"r2_low", opts.r2_low},
                     {"r2_high", opts.r2_high},
                     {"long_tail_max", opts.long_tail_max},
                     {"light_tail_min", opts.light_tail_min},
                     {"shifts", opts.shifts}};
  j["subjects"] = std::move(subjects);
  return {csv.str(), dump(j), std::nullopt};
}

CommandOutput cmd_simulate(const ExperimentConfig& config) {
  const auto& xs = require_grid(config, "simulate");
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const TailEstimates est =
      run_stage("monte-carlo", [&] { return estimate_tail(model, xs, config.stage_simulation(stage::tail_mc)); });
  const bool conditional = config.estimator == EstimatorKind::conditional;
  std::ostringstream csv;
  csv << "x,estimate,stderr,bias_bound,n_paths\n";
  json records = json::array();
  for (const auto& p : est.points) {
    const Estimate& e = conditional ? p.conditional : p.crude;
    csv << format_number(p.x) << ',' << format_number(e.value) << ',' << format_number(e.std_error) << ','
        << format_number(e.bias_bound) << ',' << e.samples << '\n';
    records.push_back({{"x", p.x},
                       {"estimator", to_string(config.estimator)},
                       {"estimate", e.value},
                       {"stderr", e.std_error},
                       {"bias_bound", e.bias_bound},
                       {"n_paths", e.samples},
                       {"exceedances", p.exceedances}});
  }
  json j = header("simulate", config);
  j["records"] = std::move(records);
  const auto& d = est.diagnostics;
  j["diagnostics"] = {{"paths", d.paths},
                      {"barrier_stops", d.barrier_stops},
                      {"cap_stops", d.cap_stops},
                      {"exceeded_all", d.exceeded_all},
                      {"steps", d.steps}};
  return {csv.str(), dump(j), std::nullopt};
}

CommandOutput cmd_lower_bound(const ExperimentConfig& config) {
  const auto& xs = require_grid(config, "lower-bound");
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const auto& lb = config.lower_bound;
  std::ostringstream csv;
  csv << "x,lower_bound,epsilon,delta,L,strategy,asymptote\n";
  json rows = json::array();
  run_stage("lower-bound", [&] {
    const LProvider provider =
        lb.strategy == LStrategy::chebyshev
            ? LProvider::chebyshev(model)
            : LProvider::empirical(model, config.stage_simulation(stage::lower_bound, lb.n_paths), lb.empirical);
    for (double x : xs) {
      const LowerBoundOptimum opt = optimize_lower_bound(model, x, lb.epsilons, lb.deltas, provider);
      const double asy = asymptote(model, x);
      csv << format_number(x) << ',' << format_number(opt.value) << ',' << format_number(opt.params.epsilon) << ','
          << format_number(opt.params.delta) << ',' << format_number(opt.params.L) << ','
          << to_string(opt.params.strategy) << ',' << format_number(asy) << '\n';
      rows.push_back({{"x", x},
                      {"lower_bound", opt.value},
                      {"epsilon", opt.params.epsilon},
                      {"delta", opt.params.delta},
                      {"L", opt.params.L},
                      {"strategy", to_string(opt.params.strategy)},
                      {"validated_frequency", opt.params.validated_frequency},
                      {"asymptote", asy}});
    }
  });
  json j = header("lower-bound", config);
  j["rows"] = std::move(rows);
  return {csv.str(), dump(j), std::nullopt};
}

json gamma_json(const GammaEstimate& g, const RenewalParams& p) {
  return {{"R", p.R},
          {"epsilon", p.epsilon},
          {"gap_max", p.effective_gap()},
          {"method", to_string(g.method)},
          {"estimate", g.value},
          {"ci_lower", g.ci.lower},
          {"ci_upper", g.ci.upper},
          {"confidence", g.confidence},
          {"residual_bound", g.residual_bound},
          {"lower_limit", g.lower_limit()},
          {"upper_limit", g.upper_limit()},
          {"paths", g.paths},
          {"crossings", g.crossings},
          {"truncated", g.truncated},
          {"cap_hits", g.cap_hits},
          {"warning", g.warning}};
}

CommandOutput cmd_upper_bound(const ExperimentConfig& config) {
  const auto& xs = require_grid(config, "upper-bound");
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const RenewalParams params = config.renewal.params(model);
  const GammaEstimate g = run_stage("gamma", [&] {
    return estimate_gamma(model, params, config.stage_simulation(stage::gamma, config.renewal.n_paths),
                          config.upper_bound.gamma_method, config.renewal.confidence);
  });
  std::vector<double> values(xs.size(), std::nan(""));
  UpperBoundSeries series;
  std::size_t grid_points = 0;
  run_stage("upper-bound", [&] {
    std::vector<double> ys;
    double top = 0.0;
    for (double x : xs) {
      const double y = upper_bound_argument(model, x, params.R, params.epsilon);
      if (y > 0.0) {
        ys.push_back(y);
        top = std::max(top, x);
      }
    }
    if (ys.empty()) return;
    const auto& u = config.upper_bound;
    GridSpec spec{u.grid_step, u.grid_top, u.max_points};
    if (!(spec.top > 0.0)) spec.top = 4.0 * top;
    const GridDistribution G = build_G(model, params.R, params.epsilon, g.lower_limit(), spec);
    grid_points = G.size();
    series = upper_bound_series(G, g.upper_limit(), u.tolerance, ys);
    std::size_t k = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (upper_bound_argument(model, xs[i], params.R, params.epsilon) > 0.0) {
        values[i] = std::min(1.0, series.values[k++]);
      }
    }
  });
  std::ostringstream csv;
  csv << "x,upper_bound,argument,gamma_lower,gamma_upper,depth,remainder\n";
  json rows = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = upper_bound_argument(model, xs[i], params.R, params.epsilon);
    csv << format_number(xs[i]) << ',' << format_number(values[i]) << ',' << format_number(y) << ','
        << format_number(g.lower_limit()) << ',' << format_number(g.upper_limit()) << ',' << series.depth << ','
        << format_number(series.remainder) << '\n';
    rows.push_back({{"x", xs[i]}, {"upper_bound", number_or_null(values[i])}, {"argument", y}});
  }
  json j = header("upper-bound", config);
  j["gamma"] = gamma_json(g, params);
  j["series"] = {{"depth", series.depth}, {"remainder", series.remainder}, {"grid_points", grid_points}};
  j["rows"] = std::move(rows);
  return {csv.str(), dump(j), std::nullopt};
}

CommandOutput cmd_gamma(const ExperimentConfig& config) {
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  std::ostringstream csv;
  csv << "R,epsilon,method,estimate,ci_lower,ci_upper,residual_bound,upper_limit,paths,crossings,truncated,"
         "cap_hits,warning\n";
  json estimates = json::array();
  for (double R : sweep_R(config)) {
    const RenewalParams p = config.renewal.params(model, R);
    const GammaEstimate g = run_stage("gamma", [&] {
      return estimate_gamma(model, p, config.stage_simulation(stage::gamma, config.renewal.n_paths),
                            config.renewal.method, config.renewal.confidence);
    });
    csv << format_number(p.R) << ',' << format_number(p.epsilon) << ',' << to_string(g.method) << ','
        << format_number(g.value) << ',' << format_number(g.ci.lower) << ',' << format_number(g.ci.upper) << ','
        << format_number(g.residual_bound) << ',' << format_number(g.upper_limit()) << ',' << g.paths << ','
        << g.crossings << ',' << g.truncated << ',' << g.cap_hits << ',' << int{g.warning} << '\n';
    estimates.push_back(gamma_json(g, p));
  }
  json j = header("gamma", config);
  j["estimates"] = std::move(estimates);
  return {csv.str(), dump(j), std::nullopt};
}

CommandOutput cmd_big_jump(const ExperimentConfig& config) {
  const std::vector<double>& xs = config.big_jump.xs.empty() ? config.x_grid : config.big_jump.xs;
  if (xs.empty()) throw ConfigError("big-jump: big_jump.x or x_grid is required");
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const double a = model.drift_magnitude();
  const SimConfig sim = config.stage_simulation(stage::big_jump, config.big_jump.n_paths);
  std::ostringstream csv;
  csv << "x,R,epsilon,paths,exceedances,fraction,ci_lower,ci_upper,shifted_fraction,gamma,status\n";
  json reports = json::array();
  for (double R : sweep_R(config)) {
    const RenewalParams p = config.renewal.params(model, R);
    const GammaEstimate g = run_stage("gamma", [&] {
      return estimate_gamma(model, p, config.stage_simulation(stage::gamma, config.renewal.n_paths),
                            config.renewal.method, config.renewal.confidence);
    });
    for (double x : xs) {
      if (!(x - p.R + a - p.epsilon >= 0.0)) {
        csv << format_number(x) << ',' << format_number(p.R) << ',' << format_number(p.epsilon)
            << ",0,0,nan,nan,nan,nan," << format_number(g.value) << ",outside-validity\n";
        reports.push_back({{"x", x}, {"R", p.R}, {"epsilon", p.epsilon}, {"status", "outside-validity"}});
        continue;
      }
      BigJumpReport r =
          run_stage("big-jump", [&] { return big_jump_fraction(model, x, p, sim, config.renewal.confidence); });
      r.gamma = g;
      const bool ok = r.status == BigJumpStatus::ok;
      const double nan = std::nan("");
      csv << format_number(x) << ',' << format_number(p.R) << ',' << format_number(p.epsilon) << ',' << r.paths
          << ',' << r.exceedances << ',' << format_number(ok ? r.fraction : nan) << ','
          << format_number(r.ci.lower) << ',' << format_number(r.ci.upper) << ','
          << format_number(ok ? r.shifted_fraction : nan) << ',' << format_number(g.value) << ','
          << to_string(r.status) << '\n';
      reports.push_back({{"x", x},
                         {"R", p.R},
                         {"epsilon", p.epsilon},
                         {"paths", r.paths},
                         {"exceedances", r.exceedances},
                         {"first_renewal_exceeds", r.first_renewal_exceeds},
                         {"fraction", number_or_null(ok ? r.fraction : nan)},
                         {"ci_lower", r.ci.lower},
                         {"ci_upper", r.ci.upper},
                         {"first_renewal_exceeds_shifted", r.first_renewal_exceeds_shifted},
                         {"shifted_fraction", number_or_null(ok ? r.shifted_fraction : nan)},
                         {"gamma", gamma_json(g, p)},
                         {"status", to_string(r.status)}});
    }
  }
  json j = header("big-jump", config);
  j["reports"] = std::move(reports);
  return {csv.str(), dump(j), std::nullopt};
}

CommandOutput cmd_report(const ExperimentConfig& config) {
  const TailReport rep = build_report(config);
  CommandOutput out{report_csv(rep), report_json(rep), std::nullopt};
  if (!rep.sandwich_holds()) {
    for (const auto& r : rep.rows) {
      if (!r.sandwich_ok()) {
        out.violation = "report: lower bound " + format_number(r.lower_bound) + " exceeds upper bound " +
                        format_number(r.upper_bound) + " at x = " + format_number(r.x);
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::span<const std::string_view> command_names() noexcept { return kCommands; }

CommandOutput run_command(std::string_view name, const ExperimentConfig& config) {
  if (name == "tail") return cmd_tail(config, false);
  if (name == "itail") return cmd_tail(config, true);
  if (name == "class-check") return cmd_class_check(config);
  if (name == "simulate") return cmd_simulate(config);
  if (name == "lower-bound") return cmd_lower_bound(config);
  if (name == "upper-bound") return cmd_upper_bound(config);
  if (name == "gamma") return cmd_gamma(config);
  if (name == "big-jump") return cmd_big_jump(config);
  if (name == "report") return cmd_report(config);
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

}  // namespace vvlab
