#include "vvlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vvlab/errors.hpp"
#include "vvlab/random.hpp"

namespace vvlab {

using nlohmann::json;

std::string_view to_string(EstimatorKind k) noexcept {
  return k == EstimatorKind::conditional ? "conditional" : "crude";
}

RenewalParams RenewalConfig::params(const IncrementModel& model, double R_override) const {
  RenewalParams p;
  p.R = R_override > 0.0 ? R_override : R;
  p.epsilon = epsilon > 0.0 ? epsilon : 0.5 * model.drift_magnitude();
  p.gap_max = gap_max;
  p.step_cap = step_cap;
  return p;
}

IncrementModel ExperimentConfig::model() const {
  return IncrementModel(jump, drift, second_tail_mode, second_tail_rel_tol);
}

SimConfig ExperimentConfig::stage_simulation(std::uint64_t stage, std::uint64_t n_paths) const {
  SimConfig cfg = simulation;
  cfg.seed = splitmix64(splitmix64(seed) ^ stage);
  if (n_paths > 0) cfg.n_paths = n_paths;
  return cfg;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
}

// A JSON object whose keys are checked off as they are read; finish()
// rejects whatever was not read.
class Object {
 public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  const std::string& path() const noexcept { return path_; }
  std::string child(const std::string& key) const { return path_ + "/" + key; }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(child(key), "required field is missing");
    return *v;
  }

  Object object(const std::string& key) { return Object(require(key), child(key)); }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    return v ? as_number(*v, child(key)) : fallback;
  }
  double number(const std::string& key) { return as_number(require(key), child(key)); }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    return v ? as_count(*v, child(key)) : fallback;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(child(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = find(key);
    return v ? as_numbers(*v, child(key)) : fallback;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown field");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  static std::uint64_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) fail(path, "expected a nonnegative integer");
    // Accept 1e5 and the like when the value is integral.
    const double d = as_number(v, path);
    if (d < 0.0 || d != std::floor(d) || d > 9.007199254740992e15) fail(path, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(d);
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& value, const std::string& path, const Enum (&options)[N]) {
  std::string allowed;
  for (Enum e : options) {
    if (value == to_string(e)) return e;
    allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
  }
  fail(path, "unknown value '" + value + "' (expected one of: " + allowed + ")");
}

// Wraps a component validator so its message carries the field path.
template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

JumpDistribution parse_jump(Object o) {
  const std::string family = o.text("family", "");
  JumpDistribution::Family f = Pareto{2.5, 1.0};
  if (family == "pareto") {
    f = Pareto{o.number("alpha"), o.number("scale", 1.0)};
  } else if (family == "weibull") {
    f = Weibull{o.number("shape"), o.number("scale", 1.0)};
  } else if (family == "lognormal") {
    f = Lognormal{o.number("mu", 0.0), o.number("sigma")};
  } else if (family == "exponential") {
    f = Exponential{o.number("rate", 1.0)};
  } else {
    fail(o.child("family"), "unknown family '" + family + "' (expected pareto, weibull, lognormal or exponential)");
  }
  o.finish();
  std::optional<JumpDistribution> jump;
  checked(o.path(), [&] { jump.emplace(f); });
  return *jump;
}

std::vector<double> parse_x_grid(const json& v, const std::string& path) {
  if (v.is_array()) {
    auto xs = Object::as_numbers(v, path);
    if (xs.empty()) fail(path, "x grid is empty");
    return xs;
  }
  Object o(v, path);
  const double start = o.number("start");
  const double stop = o.number("stop");
  const std::uint64_t count = o.count("count", 0);
  const std::string spacing = o.text("spacing", "geometric");
  o.finish();
  if (count < 1) fail(o.child("count"), "must be >= 1");
  if (count > 1'000'000) fail(o.child("count"), "must be <= 1000000");
  if (!(stop >= start)) fail(o.child("stop"), "must be >= start");
  std::vector<double> xs(count);
  if (spacing == "linear") {
    for (std::uint64_t i = 0; i < count; ++i) {
      xs[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
  } else if (spacing == "geometric") {
    if (!(start > 0.0)) fail(o.child("start"), "geometric spacing needs start > 0");
    for (std::uint64_t i = 0; i < count; ++i) {
      xs[i] = count == 1 ? start
                         : start * std::pow(stop / start, static_cast<double>(i) / static_cast<double>(count - 1));
    }
  } else {
    fail(o.child("spacing"), "expected 'linear' or 'geometric'");
  }
  return xs;
}

json jump_to_json(const JumpDistribution& jump) {
  return jump.visit([](const auto& f) -> json {
    using T = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<T, Pareto>) {
      return {{"family", "pareto"}, {"alpha", f.alpha}, {"scale", f.scale}};
    } else if constexpr (std::is_same_v<T, Weibull>) {
      return {{"family", "weibull"}, {"shape", f.shape}, {"scale", f.scale}};
    } else if constexpr (std::is_same_v<T, Lognormal>) {
      return {{"family", "lognormal"}, {"mu", f.mu}, {"sigma", f.sigma}};
    } else {
      return {{"family", "exponential"}, {"rate", f.rate}};
    }
  });
}

constexpr SecondTailMode kModes[] = {SecondTailMode::closed_form, SecondTailMode::quadrature};
constexpr LStrategy kStrategies[] = {LStrategy::chebyshev, LStrategy::empirical};
constexpr GammaMethod kMethods[] = {GammaMethod::one_sided, GammaMethod::two_sided};
constexpr EstimatorKind kEstimators[] = {EstimatorKind::conditional, EstimatorKind::crude};
constexpr ClassSubject kSubjects[] = {ClassSubject::increment_positive_part, ClassSubject::second_tail};

void check_grid(const std::vector<double>& values, const std::string& path, bool open_unit) {
  if (values.empty()) fail(path, "must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v > 0.0) || (open_unit && !(v < 1.0))) {
      fail(path + "/" + std::to_string(i), open_unit ? "must lie in (0, 1)" : "must be > 0");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ExperimentConfig c;
  Object top(root, "");

  {
    Object m = top.object("model");
    c.jump = parse_jump(m.object("jump"));
    c.drift = m.number("drift");
    if (const json* st = m.find("second_tail")) {
      Object s(*st, m.child("second_tail"));
      c.second_tail_mode = parse_enum(s.text("mode", "closed-form"), s.child("mode"), kModes);
      c.second_tail_rel_tol = s.number("rel_tol", c.second_tail_rel_tol);
      s.finish();
    }
    m.finish();
    checked(m.path(), [&] { (void)c.model(); });
  }

  if (const json* v = top.find("x_grid")) {
    c.x_grid = parse_x_grid(*v, "/x_grid");
    for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
      if (!(c.x_grid[i] >= 0.0)) fail("/x_grid/" + std::to_string(i), "levels must be >= 0");
    }
  }

  c.seed = top.count("seed", c.seed);

  if (const json* v = top.find("simulation")) {
    Object s(*v, "/simulation");
    SimConfig& sim = c.simulation;
    sim.n_paths = s.count("n_paths", sim.n_paths);
    sim.barrier = s.number("barrier", sim.barrier);
    sim.step_cap = s.count("step_cap", sim.step_cap);
    sim.substreams = s.count("substreams", sim.substreams);
    c.estimator = parse_enum(s.text("estimator", "conditional"), s.child("estimator"), kEstimators);
    s.finish();
  }
  checked("/simulation", [&] { c.simulation.validate(); });

  if (const json* v = top.find("lower_bound")) {
    Object s(*v, "/lower_bound");
    LowerBoundConfig& lb = c.lower_bound;
    lb.strategy = parse_enum(s.text("strategy", "chebyshev"), s.child("strategy"), kStrategies);
    lb.epsilons = s.numbers("epsilon_grid", lb.epsilons);
    lb.deltas = s.numbers("delta_grid", lb.deltas);
    lb.empirical.L_step = s.number("L_step", lb.empirical.L_step);
    lb.empirical.L_max = s.number("L_max", lb.empirical.L_max);
    lb.empirical.horizon = s.count("horizon", lb.empirical.horizon);
    lb.n_paths = s.count("n_paths", lb.n_paths);
    s.finish();
    check_grid(lb.epsilons, "/lower_bound/epsilon_grid", false);
    check_grid(lb.deltas, "/lower_bound/delta_grid", true);
    if (!(lb.empirical.L_step > 0.0)) fail("/lower_bound/L_step", "must be > 0");
    if (!(lb.empirical.L_max >= lb.empirical.L_step)) fail("/lower_bound/L_max", "must be >= L_step");
  }

  if (const json* v = top.find("renewal")) {
    Object s(*v, "/renewal");
    RenewalConfig& r = c.renewal;
    r.R = s.number("R", r.R);
    r.epsilon = s.number("epsilon", r.epsilon);
    r.gap_max = s.number("gap_max", r.gap_max);
    r.step_cap = s.count("step_cap", r.step_cap);
    r.R_values = s.numbers("R_values", r.R_values);
    r.method = parse_enum(s.text("method", std::string(to_string(r.method))), s.child("method"), kMethods);
    r.confidence = s.number("confidence", r.confidence);
    r.n_paths = s.count("n_paths", r.n_paths);
    s.finish();
    if (!(r.confidence > 0.0 && r.confidence < 1.0)) fail("/renewal/confidence", "must lie in (0, 1)");
    if (r.epsilon < 0.0) fail("/renewal/epsilon", "must be >= 0 (0 selects a/2)");
    if (!r.R_values.empty()) check_grid(r.R_values, "/renewal/R_values", false);
  }
  {
    const IncrementModel model = c.model();
    checked("/renewal", [&] { c.renewal.params(model).validate(model); });
  }

  if (const json* v = top.find("upper_bound")) {
    Object s(*v, "/upper_bound");
    UpperBoundConfig& u = c.upper_bound;
    u.tolerance = s.number("tolerance", u.tolerance);
    u.grid_step = s.number("grid_step", u.grid_step);
    u.grid_top = s.number("grid_top", u.grid_top);
    u.max_points = s.count("max_points", u.max_points);
    u.gamma_method =
        parse_enum(s.text("gamma_method", std::string(to_string(u.gamma_method))), s.child("gamma_method"), kMethods);
    s.finish();
    if (!(u.tolerance > 0.0 && u.tolerance < 1.0)) fail("/upper_bound/tolerance", "must lie in (0, 1)");
    if (u.grid_step < 0.0) fail("/upper_bound/grid_step", "must be >= 0 (0 selects 0.01 a)");
    if (u.grid_top < 0.0) fail("/upper_bound/grid_top", "must be >= 0 (0 selects 4 max x)");
  }

  if (const json* v = top.find("big_jump")) {
    Object s(*v, "/big_jump");
    c.big_jump.xs = s.numbers("x", c.big_jump.xs);
    c.big_jump.n_paths = s.count("n_paths", c.big_jump.n_paths);
    s.finish();
  }

  if (const json* v = top.find("class_check")) {
    Object s(*v, "/class_check");
    ClassCheckOptions& o = c.class_check.options;
    o.depth = s.number("depth", o.depth);
    o.step = s.number("step", o.step);
    o.max_points = s.count("max_points", o.max_points);
    o.trajectory_points = static_cast<int>(s.count("trajectory_points", static_cast<std::uint64_t>(o.trajectory_points)));
    o.shifts = s.numbers("shifts", o.shifts);
    o.r2_low = s.number("r2_low", o.r2_low);
    o.r2_high = s.number("r2_high", o.r2_high);
    o.long_tail_max = s.number("long_tail_max", o.long_tail_max);
    o.light_tail_min = s.number("light_tail_min", o.light_tail_min);
    if (const json* subj = s.find("subjects")) {
      const std::string path = s.child("subjects");
      if (!subj->is_array() || subj->empty()) fail(path, "expected a nonempty array of strings");
      c.class_check.subjects.clear();
      for (std::size_t i = 0; i < subj->size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        if (!(*subj)[i].is_string()) fail(p, "expected a string");
        c.class_check.subjects.push_back(parse_enum((*subj)[i].get<std::string>(), p, kSubjects));
      }
    }
    s.finish();
    checked("/class_check", [&] { o.validate(); });
  }

  if (const json* v = top.find("output")) {
    Object s(*v, "/output");
    c.output_dir = s.text("dir", c.output_dir);
    s.finish();
  }

  top.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c, int indent) {
  json j;
  j["model"] = {{"jump", jump_to_json(c.jump)},
                {"drift", c.drift},
                {"second_tail", {{"mode", to_string(c.second_tail_mode)}, {"rel_tol", c.second_tail_rel_tol}}}};
  if (!c.x_grid.empty()) j["x_grid"] = c.x_grid;
  j["seed"] = c.seed;
  j["simulation"] = {{"n_paths", c.simulation.n_paths},       {"barrier", c.simulation.barrier},
                     {"step_cap", c.simulation.step_cap},     {"substreams", c.simulation.substreams},
                     {"estimator", to_string(c.estimator)}};
  const auto& lb = c.lower_bound;
  j["lower_bound"] = {{"strategy", to_string(lb.strategy)}, {"epsilon_grid", lb.epsilons},
                      {"delta_grid", lb.deltas},            {"L_step", lb.empirical.L_step},
                      {"L_max", lb.empirical.L_max},        {"horizon", lb.empirical.horizon},
                      {"n_paths", lb.n_paths}};
  const auto& r = c.renewal;
  j["renewal"] = {{"R", r.R},           {"epsilon", r.epsilon},   {"gap_max", r.gap_max},
                  {"step_cap", r.step_cap}, {"R_values", r.R_values}, {"method", to_string(r.method)},
                  {"confidence", r.confidence}, {"n_paths", r.n_paths}};
  const auto& u = c.upper_bound;
  j["upper_bound"] = {{"tolerance", u.tolerance}, {"grid_step", u.grid_step}, {"grid_top", u.grid_top},
                      {"max_points", u.max_points}, {"gamma_method", to_string(u.gamma_method)}};
  j["big_jump"] = {{"x", c.big_jump.xs}, {"n_paths", c.big_jump.n_paths}};
  const auto& o = c.class_check.options;
  json subjects = json::array();
  for (ClassSubject s : c.class_check.subjects) subjects.push_back(to_string(s));
  j["class_check"] = {{"depth", o.depth},
                      {"step", o.step},
                      {"max_points", o.max_points},
                      {"trajectory_points", o.trajectory_points},
                      {"shifts", o.shifts},
                      {"r2_low", o.r2_low},
                      {"r2_high", o.r2_high},
                      {"long_tail_max", o.long_tail_max},
                      {"light_tail_min", o.light_tail_min},
                      {"subjects", subjects}};
  j["output"] = {{"dir", c.output_dir}};
  return j.dump(indent);
}

}  // namespace vvlab
