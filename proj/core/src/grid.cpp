#include "vvlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

#include "vvlab/errors.hpp"

namespace vvlab {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::size_t kDirectLimit = 1u << 22;  // n_a * n_b below this: direct sum

std::vector<double> direct_convolution(const std::vector<double>& a, const std::vector<double>& b,
                                       std::size_t keep) {
  std::vector<double> out(keep, 0.0);
  for (std::size_t i = 0; i < a.size() && i < keep; ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), keep - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

// Returns the first `keep` coefficients of a * b and a per-coefficient
// absolute error allowance.
std::vector<double> fft_convolution(const std::vector<double>& a, const std::vector<double>& b,
                                    std::size_t keep, double& per_coefficient_error) {
  const std::size_t full = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < full) n <<= 1;
  const std::size_t spectrum = n / 2 + 1;

  std::unique_ptr<double, FftwFree> ra(fftw_alloc_real(n));
  std::unique_ptr<double, FftwFree> rb(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> ca(fftw_alloc_complex(spectrum));
  std::unique_ptr<fftw_complex, FftwFree> cb(fftw_alloc_complex(spectrum));
  if (!ra || !rb || !ca || !cb) throw NumericalError("convolve: FFT buffer allocation failed");

  fftw_plan fa, fb, back;
  {
    std::lock_guard lock(planner_mutex());
    fa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra.get(), ca.get(), FFTW_ESTIMATE);
    fb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb.get(), cb.get(), FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca.get(), ra.get(), FFTW_ESTIMATE);
  }
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(a.begin(), a.end(), ra.get());
  std::copy(b.begin(), b.end(), rb.get());
  fftw_execute(fa);
  fftw_execute(fb);
  fftw_complex* x = ca.get();
  fftw_complex* y = cb.get();
  for (std::size_t k = 0; k < spectrum; ++k) {
    const double re = x[k][0] * y[k][0] - x[k][1] * y[k][1];
    const double im = x[k][0] * y[k][1] + x[k][1] * y[k][0];
    x[k][0] = re;
    x[k][1] = im;
  }
  fftw_execute(back);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fa);
    fftw_destroy_plan(fb);
    fftw_destroy_plan(back);
  }

  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> out(keep);
  for (std::size_t i = 0; i < keep; ++i) out[i] = ra.get()[i] * scale;

  // Round-off of a radix-2 FFT convolution is bounded in norm by a small
  // multiple of eps * log2(n) * |a|_2 * |b|_2.
  auto norm2 = [](const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  };
  per_coefficient_error = 8.0 * DBL_EPSILON * std::log2(static_cast<double>(n)) * norm2(a) * norm2(b);
  return out;
}

}  // namespace

GridDistribution::GridDistribution(double origin, double step, std::vector<double> tail)
    : origin_(origin), step_(step), tail_(std::move(tail)) {
  if (!(step_ > 0.0) || !std::isfinite(step_)) throw ConfigError("grid: step must be > 0");
  if (!std::isfinite(origin_)) throw ConfigError("grid: origin must be finite");
  if (tail_.empty()) throw ConfigError("grid: at least one point required");
  for (std::size_t i = 0; i < tail_.size(); ++i) {
    const double v = tail_[i];
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("grid: tail values must lie in [0, 1]");
    if (i > 0 && v > tail_[i - 1]) throw ConfigError("grid: tail values must be nonincreasing");
  }
}

GridDistribution GridDistribution::from_tail(const std::function<double(double)>& tail, double origin,
                                             double step, std::size_t n, Rounding rounding) {
  if (n == 0) throw ConfigError("grid: at least one point required");
  std::vector<double> values(n);
  const std::size_t shift = rounding == Rounding::up ? 0 : 1;
  double prev = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = origin + static_cast<double>(i + shift) * step;
    prev = std::min(prev, std::clamp(tail(z), 0.0, 1.0));
    values[i] = prev;
  }
  return GridDistribution(origin, step, std::move(values));
}

double GridDistribution::tail(double y) const noexcept {
  if (y < origin_) return 1.0;
  const double pos = std::floor((y - origin_) / step_);
  if (pos >= static_cast<double>(tail_.size() - 1)) return tail_.back();
  return tail_[static_cast<std::size_t>(pos)];
}

std::vector<double> GridDistribution::masses() const {
  std::vector<double> p(tail_.size());
  p[0] = 1.0 - tail_[0];
  for (std::size_t i = 1; i < tail_.size(); ++i) p[i] = tail_[i - 1] - tail_[i];
  return p;
}

GridDistribution convolve(const GridDistribution& a, const GridDistribution& b) {
  if (std::abs(a.step() - b.step()) > 1e-12 * a.step()) {
    throw ConfigError("convolve: grids must share the same step");
  }
  const std::size_t keep = std::max(a.size(), b.size());
  const std::vector<double> pa = a.masses();
  const std::vector<double> pb = b.masses();

  double coefficient_error = 0.0;
  std::vector<double> pc;
  if (a.size() * b.size() <= kDirectLimit) {
    pc = direct_convolution(pa, pb, keep);
  } else {
    pc = fft_convolution(pa, pb, keep, coefficient_error);
  }
  for (double& v : pc) v = std::max(v, 0.0);

  // Mass that leaves the kept window: either input overflowed, or both are
  // finite and the sum lands past the last kept point.
  const double oa = a.overflow();
  const double ob = b.overflow();
  const double finite_a = std::accumulate(pa.begin(), pa.end(), 0.0);
  const double finite_b = std::accumulate(pb.begin(), pb.end(), 0.0);
  const double kept = std::accumulate(pc.begin(), pc.end(), 0.0);
  const double beyond = std::max(0.0, finite_a * finite_b - kept);
  double overflow = oa + ob - oa * ob + beyond;

  std::vector<double> tail(keep);
  double running = overflow;
  for (std::size_t i = keep; i-- > 0;) {
    const double allowance = coefficient_error * static_cast<double>(keep - 1 - i);
    tail[i] = std::min(1.0, running + allowance);
    running += pc[i];
  }
  for (std::size_t i = 1; i < keep; ++i) tail[i] = std::min(tail[i], tail[i - 1]);
  return GridDistribution(a.origin() + b.origin(), a.step(), std::move(tail));
}

GridDistribution convolve_tail(const GridDistribution& g, int m) {
  if (m < 1) throw ConfigError("convolve_tail: m must be >= 1");
  GridDistribution out = g;
  for (int k = 2; k <= m; ++k) out = convolve(out, g);
  return out;
}

}  // namespace vvlab
