#include "bbdd/coherence.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bbdd {

double principal_arg(std::complex<double> z) {
  const double a = std::arg(z);
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

double damping_of(std::complex<double> z) {
  const double r = std::abs(z);
  return r == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(r);
}

CoherenceResult CoherenceResult::exact(std::complex<double> ratio, std::int64_t size) {
  CoherenceResult r;
  r.ratio = ratio;
  r.phase = principal_arg(ratio);
  r.damping = damping_of(ratio);
  r.ensemble_size = size;
  return r;
}

CoherenceResult CoherenceResult::sampled(const RunningStats<std::complex<double>>& stats) {
  CoherenceResult r = exact(stats.mean(), stats.count());
  const PolarErrors pe = polar_errors(stats);
  r.std_error = stats.std_error();
  r.abs_std_error = pe.abs;
  r.phase_std_error = pe.arg;
  return r;
}

}  // namespace bbdd
