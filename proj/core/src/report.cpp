#include "vvlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vvlab {

using nlohmann::json;

bool TailReportRow::lower_consistent() const noexcept {
  return lower_bound <= conditional.value + 2.0 * conditional.std_error;
}

bool TailReportRow::upper_consistent() const noexcept {
  return !in_validity || conditional.value - 2.0 * conditional.std_error <= upper_bound;
}

bool TailReport::sandwich_holds() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const TailReportRow& r) { return r.sandwich_ok(); });
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

TailReport build_report(const ExperimentConfig& config) {
  if (config.x_grid.empty()) throw ConfigError("report: x_grid is required");
  TailReport rep;
  rep.config = config;
  const IncrementModel model = run_stage("model", [&] { return config.model(); });
  const double a = model.drift_magnitude();
  rep.drift_magnitude = a;
  const auto& xs = config.x_grid;
  rep.rows.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    rep.rows[i].x = xs[i];
    rep.rows[i].asymptote = asymptote(model, xs[i]);
  }

  run_stage("lower-bound", [&] {
    const auto& lb = config.lower_bound;
    const LProvider provider =
        lb.strategy == LStrategy::chebyshev
            ? LProvider::chebyshev(model)
            : LProvider::empirical(model, config.stage_simulation(stage::lower_bound, lb.n_paths), lb.empirical);
    for (auto& row : rep.rows) {
      const LowerBoundOptimum opt = optimize_lower_bound(model, row.x, lb.epsilons, lb.deltas, provider);
      row.lower_bound = opt.value;
      row.lower_params = opt.params;
    }
  });

  rep.renewal = config.renewal.params(model);
  rep.gamma = run_stage("gamma", [&] {
    return estimate_gamma(model, rep.renewal, config.stage_simulation(stage::gamma, config.renewal.n_paths),
                          config.upper_bound.gamma_method, config.renewal.confidence);
  });

  run_stage("upper-bound", [&] {
    std::vector<double> ys;
    double top = 0.0;
    for (auto& row : rep.rows) {
      const double y = upper_bound_argument(model, row.x, rep.renewal.R, rep.renewal.epsilon);
      row.in_validity = y > 0.0;
      row.upper_bound = std::nan("");
      if (row.in_validity) {
        ys.push_back(y);
        top = std::max(top, row.x);
      }
    }
    if (ys.empty()) return;
    GridSpec spec{config.upper_bound.grid_step, config.upper_bound.grid_top, config.upper_bound.max_points};
    if (!(spec.top > 0.0)) spec.top = 4.0 * top;
    const GridDistribution G = build_G(model, rep.renewal.R, rep.renewal.epsilon, rep.gamma.lower_limit(), spec);
    const UpperBoundSeries series =
        upper_bound_series(G, rep.gamma.upper_limit(), config.upper_bound.tolerance, ys);
    rep.series_depth = series.depth;
    rep.series_remainder = series.remainder;
    rep.grid_points = G.size();
    rep.grid_step = G.step();
    std::size_t k = 0;
    for (auto& row : rep.rows) {
      if (row.in_validity) row.upper_bound = std::min(1.0, series.values[k++]);
    }
  });

  run_stage("monte-carlo", [&] {
    const TailEstimates est = estimate_tail(model, xs, config.stage_simulation(stage::tail_mc));
    rep.diagnostics = est.diagnostics;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      rep.rows[i].conditional = est.points[i].conditional;
      rep.rows[i].crude = est.points[i].crude;
      rep.rows[i].exceedances = est.points[i].exceedances;
    }
  });
  return rep;
}

std::string report_csv(const TailReport& rep) {
  std::ostringstream out;
  out << "x,asymptote,lower_bound,upper_bound,conditional,conditional_stderr,conditional_bias_bound,"
         "crude,crude_stderr,exceedances,n_paths,lb_epsilon,lb_delta,lb_L,in_validity,sandwich_ok,"
         "lower_consistent,upper_consistent\n";
  for (const auto& r : rep.rows) {
    out << format_number(r.x) << ',' << format_number(r.asymptote) << ',' << format_number(r.lower_bound) << ','
        << format_number(r.upper_bound) << ',' << format_number(r.conditional.value) << ','
        << format_number(r.conditional.std_error) << ',' << format_number(r.conditional.bias_bound) << ','
        << format_number(r.crude.value) << ',' << format_number(r.crude.std_error) << ',' << r.exceedances << ','
        << r.conditional.samples << ',' << format_number(r.lower_params.epsilon) << ','
        << format_number(r.lower_params.delta) << ',' << format_number(r.lower_params.L) << ','
        << int{r.in_validity} << ',' << int{r.sandwich_ok()} << ',' << int{r.lower_consistent()} << ','
        << int{r.upper_consistent()} << '\n';
  }
  return out.str();
}

namespace {

json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"samples", e.samples}, {"bias_bound", e.bias_bound}};
}

// NaN has no JSON spelling; null marks a value outside its domain.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string report_json(const TailReport& rep) {
  json j;
  j["command"] = "report";
  j["config"] = json::parse(config_to_json(rep.config));
  j["drift_magnitude"] = rep.drift_magnitude;
  j["validity_region"] = {{"x_greater_than", rep.renewal.R - rep.drift_magnitude + rep.renewal.epsilon}};
  j["renewal"] = {{"R", rep.renewal.R}, {"epsilon", rep.renewal.epsilon}, {"gap_max", rep.renewal.effective_gap()}};
  const GammaEstimate& g = rep.gamma;
  j["gamma"] = {{"method", to_string(g.method)},   {"estimate", g.value},
                {"ci_lower", g.ci.lower},          {"ci_upper", g.ci.upper},
                {"confidence", g.confidence},      {"residual_bound", g.residual_bound},
                {"lower_limit", g.lower_limit()},  {"upper_limit", g.upper_limit()},
                {"paths", g.paths},                {"crossings", g.crossings},
                {"truncated", g.truncated},        {"cap_hits", g.cap_hits},
                {"warning", g.warning}};
  j["upper_bound"] = {{"series_depth", rep.series_depth},
                      {"series_remainder", rep.series_remainder},
                      {"grid_points", rep.grid_points},
                      {"grid_step", rep.grid_step},
                      {"tolerance", rep.config.upper_bound.tolerance}};
  const SimDiagnostics& d = rep.diagnostics;
  j["diagnostics"] = {{"paths", d.paths},
                      {"barrier_stops", d.barrier_stops},
                      {"cap_stops", d.cap_stops},
                      {"exceeded_all", d.exceeded_all},
                      {"steps", d.steps}};
  j["sandwich_holds"] = rep.sandwich_holds();
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"x", r.x},
                    {"asymptote", r.asymptote},
                    {"lower_bound",
                     {{"value", r.lower_bound},
                      {"epsilon", r.lower_params.epsilon},
                      {"delta", r.lower_params.delta},
                      {"L", r.lower_params.L},
                      {"strategy", to_string(r.lower_params.strategy)},
                      {"validated_frequency", r.lower_params.validated_frequency}}},
                    {"upper_bound", number_or_null(r.upper_bound)},
                    {"in_validity", r.in_validity},
                    {"conditional", estimate_json(r.conditional)},
                    {"crude", estimate_json(r.crude)},
                    {"exceedances", r.exceedances},
                    {"sandwich_ok", r.sandwich_ok()},
                    {"lower_consistent", r.lower_consistent()},
                    {"upper_consistent", r.upper_consistent()}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace vvlab
