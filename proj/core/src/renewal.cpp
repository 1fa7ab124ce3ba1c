#include "vvlab/renewal.hpp"

#include <algorithm>
#include <cmath>

#include "vvlab/errors.hpp"
#include "vvlab/parallel.hpp"

namespace vvlab {

void RenewalParams::validate(const IncrementModel& model) const {
  const double a = model.drift_magnitude();
  if (!(R > 0.0)) throw ConfigError("renewal: R must be > 0");
  if (!(epsilon > 0.0 && epsilon < a)) throw ConfigError("renewal: epsilon must lie in (0, a)");
  if (gap_max < 0.0) throw ConfigError("renewal: gap_max must be >= 0");
  if (step_cap < 1) throw ConfigError("renewal: step_cap must be >= 1");
}

std::string_view to_string(GammaMethod m) noexcept {
  return m == GammaMethod::one_sided ? "one-sided" : "two-sided";
}

std::string_view to_string(BigJumpStatus s) noexcept {
  return s == BigJumpStatus::ok ? "ok" : "insufficient-data";
}

Tau1 detect_tau1(std::span<const double> sums, double a, const RenewalParams& params) {
  const double slope = a - params.epsilon;
  const double gap = params.effective_gap();
  for (std::size_t n = 1; n < sums.size(); ++n) {
    const double rel = sums[n] - sums[0];
    const double line = params.R - static_cast<double>(n) * slope;
    if (rel > line) return {n, sums[n]};
    if (line - rel > gap) break;
  }
  return {};
}

std::vector<Cycle> renewal_cycles(std::span<const double> sums, double a, const RenewalParams& params) {
  std::vector<Cycle> cycles;
  std::size_t base = 0;
  while (base + 1 < sums.size()) {
    const Tau1 t = detect_tau1(sums.subspan(base), a, params);
    if (!t.index) break;
    cycles.push_back({*t.index, sums[base + *t.index] - sums[base]});
    base += *t.index;
  }
  return cycles;
}

double one_sided_residual(const IncrementModel& model, const RenewalParams& params) {
  // The walk W_n = S_n + n(a - eps) has drift -eps and its increments are
  // xi + (a - eps), whose integrated tail at g is that of xi at g - a + eps.
  const double a = model.drift_magnitude();
  const double g = params.effective_gap();
  return std::min(1.0, 2.0 * model.second_tail(g - a + params.epsilon) / params.epsilon);
}

namespace {

struct GammaTally {
  std::uint64_t paths = 0;
  std::uint64_t crossings = 0;
  std::uint64_t truncated = 0;
  std::uint64_t cap_hits = 0;
};

enum class Outcome { crossed, lower, gap, cap };

// One renewal search from the current position. On a crossing, `steps`
// holds the cycle length and `rel_out` the displacement.
template <class Family>
Outcome search_renewal(const Family& jump, double drift, double a, const RenewalParams& params,
                       bool two_sided, RandomStream& stream, std::uint64_t& steps, double& rel_out) {
  const double up = a - params.epsilon;
  const double down = a + params.epsilon;
  const double gap = params.effective_gap();
  double rel = 0.0;
  for (std::uint64_t n = 1; n <= params.step_cap; ++n) {
    rel += jump.quantile(stream.uniform()) - drift;
    steps = n;
    const double nd = static_cast<double>(n);
    const double line = params.R - nd * up;
    if (rel > line) {
      rel_out = rel;
      return Outcome::crossed;
    }
    if (two_sided && rel < -params.R - nd * down) return Outcome::lower;
    // The walk's drift -a lies strictly between the two line slopes, so the
    // two-sided search needs the gap horizon too.
    if (line - rel > gap) return Outcome::gap;
  }
  return Outcome::cap;
}

}  // namespace

GammaEstimate estimate_gamma(const IncrementModel& model, const RenewalParams& params,
                             const SimConfig& cfg, GammaMethod method, double confidence) {
  params.validate(model);
  cfg.validate();
  const bool two_sided = method == GammaMethod::two_sided;
  const double a = model.drift_magnitude();

  auto tallies = run_indexed<GammaTally>(cfg.substreams, cfg.threads, [&](std::size_t k) {
    RandomStream stream = RandomStream::substream(cfg.seed, k);
    const std::uint64_t paths = substream_share(cfg.n_paths, cfg.substreams, k);
    GammaTally t;
    model.jump().visit([&](const auto& jump) {
      for (std::uint64_t p = 0; p < paths; ++p) {
        std::uint64_t steps = 0;
        double rel = 0.0;
        const Outcome o = search_renewal(jump, model.drift(), a, params, two_sided, stream, steps, rel);
        ++t.paths;
        if (o == Outcome::crossed) ++t.crossings;
        if (o == Outcome::gap) ++t.truncated;
        if (o == Outcome::cap) ++t.cap_hits;
      }
    });
    return t;
  });

  GammaTally total;
  for (const auto& t : tallies) {
    total.paths += t.paths;
    total.crossings += t.crossings;
    total.truncated += t.truncated;
    total.cap_hits += t.cap_hits;
  }

  GammaEstimate est;
  est.method = method;
  est.confidence = confidence;
  est.paths = total.paths;
  est.crossings = total.crossings;
  est.truncated = total.truncated;
  est.cap_hits = total.cap_hits;
  const double n = static_cast<double>(total.paths);
  est.value = static_cast<double>(total.crossings) / n;
  est.ci = clopper_pearson(total.crossings, total.paths, confidence);
  // Capped paths have an unknown gap, so each may still cross.
  est.residual_bound = (static_cast<double>(total.truncated) * one_sided_residual(model, params) +
                        static_cast<double>(total.cap_hits)) / n;
  est.warning = static_cast<double>(total.cap_hits) > 1e-3 * n;
  return est;
}

std::vector<std::vector<Cycle>> simulate_renewal_cycles(const IncrementModel& model,
                                                        const RenewalParams& params,
                                                        const SimConfig& cfg,
                                                        std::size_t max_cycles) {
  params.validate(model);
  cfg.validate();
  const double a = model.drift_magnitude();
  auto blocks = run_indexed<std::vector<std::vector<Cycle>>>(cfg.substreams, cfg.threads, [&](std::size_t k) {
    RandomStream stream = RandomStream::substream(cfg.seed, k);
    const std::uint64_t paths = substream_share(cfg.n_paths, cfg.substreams, k);
    std::vector<std::vector<Cycle>> out(paths);
    model.jump().visit([&](const auto& jump) {
      for (auto& cycles : out) {
        while (cycles.size() < max_cycles) {
          std::uint64_t steps = 0;
          double rel = 0.0;
          if (search_renewal(jump, model.drift(), a, params, false, stream, steps, rel) != Outcome::crossed) {
            break;
          }
          cycles.push_back({steps, rel});
        }
      }
    });
    return out;
  });
  std::vector<std::vector<Cycle>> all;
  all.reserve(cfg.n_paths);
  for (auto& b : blocks) {
    for (auto& c : b) all.push_back(std::move(c));
  }
  return all;
}

FirstRenewalSample sample_first_renewal(const IncrementModel& model, const RenewalParams& params,
                                        const SimConfig& cfg) {
  params.validate(model);
  cfg.validate();
  const double a = model.drift_magnitude();
  auto blocks = run_indexed<std::vector<double>>(cfg.substreams, cfg.threads, [&](std::size_t k) {
    RandomStream stream = RandomStream::substream(cfg.seed, k);
    const std::uint64_t paths = substream_share(cfg.n_paths, cfg.substreams, k);
    std::vector<double> out;
    model.jump().visit([&](const auto& jump) {
      for (std::uint64_t p = 0; p < paths; ++p) {
        std::uint64_t steps = 0;
        double rel = 0.0;
        if (search_renewal(jump, model.drift(), a, params, false, stream, steps, rel) == Outcome::crossed) {
          out.push_back(rel);
        }
      }
    });
    return out;
  });
  FirstRenewalSample sample;
  sample.paths = cfg.n_paths;
  for (const auto& b : blocks) sample.values.insert(sample.values.end(), b.begin(), b.end());
  std::sort(sample.values.begin(), sample.values.end());
  return sample;
}

namespace {

struct BigJumpTally {
  std::uint64_t paths = 0;
  std::uint64_t exceed = 0;
  std::uint64_t above = 0;
  std::uint64_t above_shifted = 0;
};

}  // namespace

BigJumpReport big_jump_fraction(const IncrementModel& model, double x, const RenewalParams& params,
                                const SimConfig& cfg, double confidence) {
  params.validate(model);
  cfg.validate();
  const double a = model.drift_magnitude();
  const double slope = a - params.epsilon;
  const double shifted_level = x - params.R + a - params.epsilon;
  if (!(shifted_level >= 0.0)) throw ConfigError("big_jump_fraction: requires x >= R - a + eps");

  auto tallies = run_indexed<BigJumpTally>(cfg.substreams, cfg.threads, [&](std::size_t k) {
    RandomStream stream = RandomStream::substream(cfg.seed, k);
    const std::uint64_t paths = substream_share(cfg.n_paths, cfg.substreams, k);
    BigJumpTally t;
    model.jump().visit([&](const auto& jump) {
      for (std::uint64_t p = 0; p < paths; ++p) {
        bool renewed = false;
        double at_renewal = 0.0;
        std::uint64_t steps = 0;
        const StopReason reason = detail::run_walk(
            jump, model.drift(), stream, cfg.barrier, cfg.step_cap, steps,
            [&](std::uint64_t n, double s, bool) {
              if (n == 0) return false;
              if (!renewed && s > params.R - static_cast<double>(n) * slope) {
                renewed = true;
                at_renewal = s;
              }
              return s > x;
            });
        ++t.paths;
        if (reason == StopReason::predicate) {
          ++t.exceed;
          if (at_renewal > x) ++t.above;
          if (at_renewal > shifted_level) ++t.above_shifted;
        }
      }
    });
    return t;
  });

  BigJumpTally total;
  for (const auto& t : tallies) {
    total.paths += t.paths;
    total.exceed += t.exceed;
    total.above += t.above;
    total.above_shifted += t.above_shifted;
  }

  BigJumpReport r;
  r.x = x;
  r.R = params.R;
  r.epsilon = params.epsilon;
  r.paths = total.paths;
  r.exceedances = total.exceed;
  r.first_renewal_exceeds = total.above;
  r.first_renewal_exceeds_shifted = total.above_shifted;
  if (total.exceed == 0) {
    r.status = BigJumpStatus::insufficient_data;
    r.ci = {0.0, 1.0};
    return r;
  }
  const double n = static_cast<double>(total.exceed);
  r.fraction = static_cast<double>(total.above) / n;
  r.shifted_fraction = static_cast<double>(total.above_shifted) / n;
  r.ci = clopper_pearson(total.above, total.exceed, confidence);
  return r;
}

}  // namespace vvlab
