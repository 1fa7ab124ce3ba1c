#include "vvlab/stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "vvlab/errors.hpp"

namespace vvlab {

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw NumericalError("clopper_pearson: no trials");
  if (successes > trials) throw ConfigError("clopper_pearson: successes exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("clopper_pearson: confidence must be in (0, 1)");
  }
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  Interval ci;
  ci.lower = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  ci.upper = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return ci;
}

double normal_upper_quantile(double p) {
  return 1.4142135623730950488 * boost::math::erfc_inv(2.0 * p);
}

Interval normal_interval(double mean, double std_error, double confidence) {
  const double z = normal_upper_quantile((1.0 - confidence) / 2.0);
  return {mean - z * std_error, mean + z * std_error};
}

}  // namespace vvlab
