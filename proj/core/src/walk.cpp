#include "vvlab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vvlab/errors.hpp"
#include "vvlab/parallel.hpp"

namespace vvlab {

IncrementModel::IncrementModel(JumpDistribution jump, double drift, SecondTailMode mode,
                               double rel_tol)
    : jump_(jump),
      drift_(drift),
      a_(drift - jump.mean()),
      second_tail_(jump, mode, rel_tol, drift) {
  if (!std::isfinite(drift)) throw ConfigError("model: drift must be finite");
  if (!(a_ > 0.0)) {
    throw ConfigError("model: drift d must exceed the jump mean (a = d - E[J] must be > 0), got a = " +
                      std::to_string(a_));
  }
}

void SimConfig::validate() const {
  if (n_paths < 1) throw ConfigError("simulation: n_paths must be >= 1");
  if (!(barrier > 0.0)) throw ConfigError("simulation: barrier must be > 0");
  if (step_cap < 1) throw ConfigError("simulation: step_cap must be >= 1");
  if (substreams < 1) throw ConfigError("simulation: substreams must be >= 1");
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::predicate:
      return "predicate";
    case StopReason::barrier:
      return "barrier";
    case StopReason::step_cap:
      return "step-cap";
  }
  return "unknown";
}

WalkPath simulate_path(const IncrementModel& model, RandomStream& stream, const StopPredicate& stop,
                       double barrier, std::uint64_t step_cap) {
  WalkPath path;
  double max = 0.0;
  std::uint64_t steps = 0;
  path.reason = model.jump().visit([&](const auto& jump) {
    return detail::run_walk(jump, model.drift(), stream, barrier, step_cap, steps,
                            [&](std::uint64_t n, double s, bool) {
                              max = std::max(max, s);
                              path.sums.push_back(s);
                              path.maxima.push_back(max);
                              return n > 0 && stop && stop(n, s);
                            });
  });
  return path;
}

double barrier_bias(const IncrementModel& model, double x, double barrier) {
  return std::min(1.0, 2.0 * model.second_tail(x + barrier) / model.drift_magnitude());
}

double conditional_accumulator(const IncrementModel& model, std::span<const double> sums, double x) {
  double acc = 0.0;
  double max = 0.0;
  // The last point is the stopping time T and contributes nothing.
  for (std::size_t n = 0; n + 1 < sums.size(); ++n) {
    max = std::max(max, sums[n]);
    if (max > x) break;
    acc += model.tail(x - sums[n]);
  }
  return acc;
}

namespace {

struct SubstreamTally {
  std::vector<RunningStats> crude;
  std::vector<RunningStats> conditional;
  std::vector<std::uint64_t> exceed;
  std::vector<std::uint64_t> barrier_nonexceed;
  std::vector<double> cap_bias;  // summed per-path allowances
  SimDiagnostics diag;
};

template <class Family>
SubstreamTally run_substream(const Family& jump, const IncrementModel& model,
                             const std::vector<double>& xs, const SimConfig& cfg, std::uint64_t k) {
  const std::size_t levels = xs.size();
  SubstreamTally t;
  t.crude.resize(levels);
  t.conditional.resize(levels);
  t.exceed.assign(levels, 0);
  t.barrier_nonexceed.assign(levels, 0);
  t.cap_bias.assign(levels, 0.0);

  RandomStream stream = RandomStream::substream(cfg.seed, k);
  const std::uint64_t paths = substream_share(cfg.n_paths, cfg.substreams, k);
  const double d = model.drift();
  const double a = model.drift_magnitude();
  std::vector<double> acc(levels);

  for (std::uint64_t p = 0; p < paths; ++p) {
    std::fill(acc.begin(), acc.end(), 0.0);
    double max = 0.0;
    double last = 0.0;
    std::size_t first_open = 0;  // xs[i] with i >= first_open are not yet exceeded
    std::uint64_t steps = 0;
    const StopReason reason = detail::run_walk(
        jump, d, stream, cfg.barrier, cfg.step_cap, steps, [&](std::uint64_t, double s, bool terminal) {
          last = s;
          if (s > max) {
            max = s;
            while (first_open < levels && max > xs[first_open]) ++first_open;
            if (first_open == levels) return true;
          }
          if (!terminal) {
            for (std::size_t i = first_open; i < levels; ++i) acc[i] += jump.tail(xs[i] - s + d);
          }
          return false;
        });

    ++t.diag.paths;
    t.diag.steps += steps;
    switch (reason) {
      case StopReason::predicate:
        ++t.diag.exceeded_all;
        break;
      case StopReason::barrier:
        ++t.diag.barrier_stops;
        break;
      case StopReason::step_cap:
        ++t.diag.cap_stops;
        break;
    }
    for (std::size_t i = 0; i < levels; ++i) {
      const bool exceeded = i < first_open;
      t.crude[i].add(exceeded ? 1.0 : 0.0);
      t.conditional[i].add(acc[i]);
      if (exceeded) {
        ++t.exceed[i];
      } else if (reason == StopReason::barrier) {
        ++t.barrier_nonexceed[i];
      } else if (reason == StopReason::step_cap) {
        t.cap_bias[i] += std::min(1.0, 2.0 * model.second_tail(xs[i] - last) / a);
      }
    }
  }
  return t;
}

}  // namespace

TailEstimates estimate_tail(const IncrementModel& model, std::span<const double> xs,
                            const SimConfig& cfg) {
  cfg.validate();
  for (double x : xs) {
    if (!(x >= 0.0)) throw ConfigError("estimate_tail: levels must satisfy x >= 0");
  }
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
  std::vector<double> sorted(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sorted[i] = xs[order[i]];

  auto tallies = run_indexed<SubstreamTally>(cfg.substreams, cfg.threads, [&](std::size_t k) {
    return model.jump().visit([&](const auto& jump) { return run_substream(jump, model, sorted, cfg, k); });
  });

  const std::size_t levels = sorted.size();
  std::vector<RunningStats> crude(levels);
  std::vector<RunningStats> conditional(levels);
  std::vector<std::uint64_t> exceed(levels, 0);
  std::vector<std::uint64_t> barrier_nonexceed(levels, 0);
  std::vector<double> cap_bias(levels, 0.0);
  SimDiagnostics diag;
  for (const auto& t : tallies) {
    for (std::size_t i = 0; i < levels; ++i) {
      crude[i].merge(t.crude[i]);
      conditional[i].merge(t.conditional[i]);
      exceed[i] += t.exceed[i];
      barrier_nonexceed[i] += t.barrier_nonexceed[i];
      cap_bias[i] += t.cap_bias[i];
    }
    diag.paths += t.diag.paths;
    diag.barrier_stops += t.diag.barrier_stops;
    diag.cap_stops += t.diag.cap_stops;
    diag.exceeded_all += t.diag.exceeded_all;
    diag.steps += t.diag.steps;
  }

  TailEstimates out;
  out.diagnostics = diag;
  out.points.resize(levels);
  const double n = static_cast<double>(diag.paths);
  for (std::size_t i = 0; i < levels; ++i) {
    const double bias = static_cast<double>(barrier_nonexceed[i]) / n *
                            barrier_bias(model, sorted[i], cfg.barrier) +
                        cap_bias[i] / n;
    TailPoint& pt = out.points[order[i]];
    pt.x = sorted[i];
    pt.exceedances = exceed[i];
    pt.crude = {crude[i].mean(), crude[i].standard_error(), crude[i].count(), bias};
    pt.conditional = {conditional[i].mean(), conditional[i].standard_error(), conditional[i].count(), bias};
  }
  return out;
}

Estimate crude_mc(const IncrementModel& model, double x, const SimConfig& cfg) {
  const double xs[] = {x};
  return estimate_tail(model, xs, cfg).points.front().crude;
}

Estimate conditional_mc(const IncrementModel& model, double x, const SimConfig& cfg) {
  const double xs[] = {x};
  return estimate_tail(model, xs, cfg).points.front().conditional;
}

}  // namespace vvlab
