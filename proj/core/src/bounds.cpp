#include "vvlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvlab/errors.hpp"
#include "vvlab/parallel.hpp"

namespace vvlab {

double asymptote(const IncrementModel& model, double x) {
  return model.second_tail(x) / model.drift_magnitude();
}

std::string_view to_string(LStrategy s) noexcept {
  return s == LStrategy::chebyshev ? "chebyshev" : "empirical";
}

void LowerBoundParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("lower bound: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("lower bound: delta must be in (0, 1)");
  if (!(L >= 0.0) || !std::isfinite(L)) throw ConfigError("lower bound: L must be finite and >= 0");
}

double choose_L_chebyshev(const IncrementModel& model, double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw ConfigError("choose_L_chebyshev: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("choose_L_chebyshev: delta must be in (0, 1)");
  const double var = model.variance();
  if (is_infinite(var)) {
    throw NumericalError("choose_L_chebyshev: increment variance is infinite for " +
                         model.jump().describe() + "; use the empirical L strategy");
  }
  return var / (4.0 * epsilon * delta);
}

std::vector<double> simulate_deficits(const IncrementModel& model, double epsilon,
                                      const SimConfig& cfg, std::uint64_t horizon) {
  cfg.validate();
  if (horizon < 1) throw ConfigError("simulate_deficits: horizon must be >= 1");
  const double slope = model.drift_magnitude() + epsilon;
  auto blocks = run_indexed<std::vector<double>>(cfg.substreams, cfg.threads, [&](std::size_t k) {
    RandomStream stream = RandomStream::substream(cfg.seed, k);
    const std::uint64_t paths = substream_share(cfg.n_paths, cfg.substreams, k);
    std::vector<double> out;
    out.reserve(paths);
    model.jump().visit([&](const auto& jump) {
      for (std::uint64_t p = 0; p < paths; ++p) {
        double low = 0.0;
        std::uint64_t steps = 0;
        detail::run_walk(jump, model.drift(), stream, std::numeric_limits<double>::infinity(), horizon,
                         steps, [&](std::uint64_t n, double s, bool) {
                           low = std::min(low, s + static_cast<double>(n) * slope);
                           return false;
                         });
        out.push_back(-low);
      }
    });
    return out;
  });
  std::vector<double> all;
  all.reserve(cfg.n_paths);
  for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  return all;
}

EmpiricalL choose_L_from_deficits(std::span<const double> sorted, double delta,
                                  const EmpiricalLOptions& options) {
  if (sorted.empty()) throw NumericalError("choose_L_empirical: no simulated paths");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("choose_L_empirical: delta must be in (0, 1)");
  if (!(options.L_step > 0.0)) throw ConfigError("choose_L_empirical: L_step must be > 0");
  const auto n = static_cast<double>(sorted.size());
  const auto needed =
      static_cast<std::size_t>(std::ceil((1.0 - delta / 2.0) * n - 1e-9 * n));
  const std::size_t k = std::clamp<std::size_t>(needed, 1, sorted.size());
  const double critical = sorted[k - 1];
  const double L = (std::floor(critical / options.L_step) + 1.0) * options.L_step;
  if (L > options.L_max) {
    throw NumericalError("choose_L_empirical: required L exceeds the search range (L_max = " +
                         std::to_string(options.L_max) + ")");
  }
  const auto below = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), L) - sorted.begin());
  return {L, below / n, sorted.size()};
}

EmpiricalL choose_L_empirical(const IncrementModel& model, double epsilon, double delta,
                              const SimConfig& cfg, const EmpiricalLOptions& options) {
  if (!(epsilon > 0.0)) throw ConfigError("choose_L_empirical: epsilon must be > 0");
  const auto deficits = simulate_deficits(model, epsilon, cfg, options.horizon);
  return choose_L_from_deficits(deficits, delta, options);
}

double lower_bound(const IncrementModel& model, double x, const LowerBoundParams& params) {
  params.validate();
  const double fs = model.second_tail(x + params.L);
  return (1.0 - params.delta) * fs / (model.drift_magnitude() + params.epsilon + fs);
}

LProvider LProvider::chebyshev(const IncrementModel& model) {
  LProvider p;
  p.model_ = model;
  p.strategy_ = LStrategy::chebyshev;
  return p;
}

LProvider LProvider::empirical(const IncrementModel& model, const SimConfig& cfg,
                               const EmpiricalLOptions& options) {
  LProvider p;
  p.model_ = model;
  p.strategy_ = LStrategy::empirical;
  p.cfg_ = cfg;
  p.options_ = options;
  p.deficits_ = std::make_shared<std::map<double, std::vector<double>>>();
  return p;
}

LowerBoundParams LProvider::operator()(double epsilon, double delta) const {
  LowerBoundParams params;
  params.epsilon = epsilon;
  params.delta = delta;
  params.strategy = strategy_;
  if (strategy_ == LStrategy::chebyshev) {
    params.L = choose_L_chebyshev(*model_, epsilon, delta);
    return params;
  }
  auto it = deficits_->find(epsilon);
  if (it == deficits_->end()) {
    it = deficits_->emplace(epsilon, simulate_deficits(*model_, epsilon, cfg_, options_.horizon)).first;
  }
  const EmpiricalL chosen = choose_L_from_deficits(it->second, delta, options_);
  params.L = chosen.L;
  params.validated_frequency = chosen.frequency;
  return params;
}

LowerBoundOptimum optimize_lower_bound(const IncrementModel& model, double x,
                                       std::span<const double> epsilons,
                                       std::span<const double> deltas, const LProvider& provider) {
  if (epsilons.empty() || deltas.empty()) throw ConfigError("optimize_lower_bound: empty grid");
  LowerBoundOptimum best;
  bool first = true;
  for (double eps : epsilons) {
    for (double delta : deltas) {
      const LowerBoundParams params = provider(eps, delta);
      const double v = lower_bound(model, x, params);
      if (first || v > best.value) {
        best = {v, params};
        first = false;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

// Solves I(z) = level for the decreasing integrated tail I by bisection.
double solve_integrated_tail(const IncrementModel& model, double level) {
  const SecondTail& st = model.second_tail_function();
  double lo = -1.0;
  while (st.integral(lo) < level) lo *= 2.0;
  double hi = 1.0;
  while (st.integral(hi) >= level) {
    hi = hi * 2.0 + 1.0;
    if (hi > 1e300) throw NumericalError("build_G: integrated tail does not decay");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (st.integral(mid) >= level ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

GridDistribution build_G(const IncrementModel& model, double R, double epsilon, double gamma,
                         const GridSpec& grid) {
  const double a = model.drift_magnitude();
  if (!(R > 0.0)) throw ConfigError("build_G: R must be > 0");
  if (!(epsilon > 0.0 && epsilon < a)) throw ConfigError("build_G: epsilon must lie in (0, a)");
  if (gamma == 0.0) {
    throw NumericalError("build_G: gamma = 0 (no renewal observed); the series bound degenerates");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("build_G: gamma must lie in (0, 1]");
  if (!(grid.top > 0.0)) throw ConfigError("build_G: grid top must be set");

  const double shift = R + a - epsilon;
  const double scale = gamma * (a - epsilon);
  const double origin = solve_integrated_tail(model, scale) + shift;
  const double step = grid.step > 0.0 ? grid.step : 0.01 * a;
  const double span = std::max(grid.top - origin, step);
  const auto n = static_cast<std::size_t>(std::ceil(span / step)) + 1;
  if (n > grid.max_points) {
    throw NumericalError("build_G: grid needs " + std::to_string(n) + " points (max_points = " +
                         std::to_string(grid.max_points) + ")");
  }
  const SecondTail& st = model.second_tail_function();
  return GridDistribution::from_tail(
      [&](double y) { return std::min(1.0, st.integral(y - shift) / scale); }, origin, step, n,
      GridDistribution::Rounding::up);
}

int series_depth(double gamma, double tol) {
  if (!(tol > 0.0)) throw ConfigError("upper bound: tolerance must be > 0");
  if (gamma <= 0.0) return 1;
  int m = 1;
  double rem = gamma * gamma / (1.0 - gamma);
  while (rem > tol) {
    rem *= gamma;
    ++m;
    if (m > 10000) throw NumericalError("upper bound: series depth exceeds 10000");
  }
  return m;
}

UpperBoundSeries upper_bound_series(const GridDistribution& G, double gamma_upper, double tol,
                                    std::span<const double> ys) {
  if (!(gamma_upper < 1.0)) {
    throw NumericalError("upper bound: gamma_upper >= 1, the renewal series diverges (increase R)");
  }
  if (!(gamma_upper >= 0.0)) throw ConfigError("upper bound: gamma_upper must be >= 0");
  UpperBoundSeries out;
  out.depth = series_depth(gamma_upper, tol);
  out.remainder = std::pow(gamma_upper, out.depth + 1) / (1.0 - gamma_upper);
  out.values.assign(ys.size(), 0.0);

  GridDistribution power = G;
  double weight = gamma_upper;
  for (int m = 1; m <= out.depth; ++m) {
    if (m > 1) power = convolve(power, G);
    for (std::size_t i = 0; i < ys.size(); ++i) out.values[i] += weight * power.tail(ys[i]);
    weight *= gamma_upper;
  }
  for (double& v : out.values) v += out.remainder;
  return out;
}

double upper_bound_argument(const IncrementModel& model, double x, double R, double epsilon) {
  return x - R + model.drift_magnitude() - epsilon;
}

double upper_bound(const IncrementModel& model, double x, double R, double epsilon,
                   double gamma_lower, double gamma_upper, double tol, const GridSpec& grid) {
  if (!(upper_bound_argument(model, x, R, epsilon) > 0.0)) {
    throw ConfigError("upper bound: requires x > R - a + eps");
  }
  GridSpec spec = grid;
  if (!(spec.top > 0.0)) spec.top = 4.0 * x;
  const GridDistribution G = build_G(model, R, epsilon, gamma_lower, spec);
  const double y[] = {upper_bound_argument(model, x, R, epsilon)};
  return upper_bound_series(G, gamma_upper, tol, y).values.front();
}

}  // namespace vvlab
