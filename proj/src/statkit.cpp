#include "bbdd/statkit.hpp"

#include <array>
#include <limits>
#include <numbers>

#include "bbdd/errors.hpp"

namespace bbdd {

PolarErrors polar_errors(const RunningStats<std::complex<double>>& stats) {
  const std::complex<double> m = stats.mean();
  const double r = std::abs(m);
  if (stats.count() == 0) return {};
  if (r == 0.0) {
    const double se = stats.std_error();
    return {se, std::numeric_limits<double>::infinity()};
  }
  const Eigen::Vector2d radial(m.real() / r, m.imag() / r);
  const Eigen::Vector2d tangential(-radial(1), radial(0));
  return {stats.std_error_along(radial), stats.std_error_along(tangential) / r};
}

namespace {

// Acklam's rational approximation of the normal quantile (|rel err| < 1.2e-9).
double acklam_quantile(double p) {
  constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
  constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
  constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  double x = acklam_quantile(p);
  // One Halley step on Phi(x) - p.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double normal_upper_quantile(double p) { return -normal_quantile(p); }

SampleSizePlan plan_samples(double delta, double epsilon, double sigma_est) {
  if (!(delta > 0.0)) throw DomainError("required_samples: delta must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("required_samples: epsilon must lie in (0, 1)");
  if (!(sigma_est >= 0.0) || !std::isfinite(sigma_est))
    throw DomainError("required_samples: sigma_est must be finite and >= 0");
  SampleSizePlan plan;
  plan.margin = delta;
  plan.confidence = epsilon;
  plan.sigma = sigma_est;
  plan.z = normal_upper_quantile(epsilon / 2.0);
  const double k = std::ceil(std::pow(plan.z * sigma_est / delta, 2));
  plan.min_samples = std::max<std::int64_t>(1, static_cast<std::int64_t>(k));
  return plan;
}

std::int64_t required_samples(double delta, double epsilon, double sigma_est) {
  return plan_samples(delta, epsilon, sigma_est).min_samples;
}

SigmaEstimate sigma_estimate_drift(double omega0, double t_horizon, double dt) {
  SigmaEstimate est;
  est.value = std::abs(omega0) * std::sqrt(std::max(0.0, t_horizon * dt));
  est.in_regime = omega0 * omega0 * t_horizon * dt <= 0.1;
  return est;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace bbdd
