#include "bbdd/spectral_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "bbdd/errors.hpp"

namespace bbdd {

void BathSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidSpec("bath: alpha must be > 0");
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidSpec("bath: s must be > 0");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw InvalidSpec("bath: omega_c must be > 0");
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    throw InvalidSpec("bath: temperature must be >= 0");
}

double BathSpec::spectral_density(double w) const {
  if (w <= 0.0) return 0.0;
  return 0.25 * alpha * std::pow(w, s) * std::exp(-w / omega_c);
}

double BathSpec::thermal_factor(double w) const {
  if (temperature == 0.0) return 1.0;
  const double x = w / (2.0 * temperature);
  if (x < 1e-4) return 1.0 / x + x / 3.0;
  return 1.0 / std::tanh(x);
}

double free_filter(double w, double tau) {
  const double sh = std::sin(0.5 * w * tau);
  return 8.0 * sh * sh / (w * w);
}

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

// Appends the Gauss nodes of [a, b] mapped through w(y) with Jacobian dw/dy.
template <typename Map>
void add_panel(double a, double b, Map&& map, std::vector<double>& nodes,
               std::vector<double>& weights) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int side : {-1, 1}) {
      if (x[i] == 0.0 && side < 0) continue;
      const auto [node, jac] = map(mid + side * half * x[i]);
      nodes.push_back(node);
      weights.push_back(half * w[i] * jac);
    }
  }
}

}  // namespace

SpectralQuadrature::SpectralQuadrature(const BathSpec& bath, double horizon, int level,
                                       const QuadratureOptions& options)
    : bath_(bath), horizon_(horizon), level_(level) {
  bath_.validate();
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw DomainError("spectral quadrature: horizon must be finite and >= 0");
  if (level < 0) throw DomainError("spectral quadrature: level must be >= 0");
  const double wc = bath_.omega_c;
  const double lo = options.low_cut * wc;
  const double hi = options.high_cut * wc;
  const double width = horizon > 0.0 ? std::min(std::numbers::pi / horizon, 0.5 * wc) : 0.5 * wc;
  const int pieces = 1 << level;

  std::vector<std::pair<double, double>> panels;
  double a = lo;
  while (a < width && a < hi) {
    const double b = std::min(2.0 * a, hi);
    panels.emplace_back(a, b);
    a = b;
  }
  while (a < hi) {
    const double b = std::min(a + width, hi);
    panels.emplace_back(a, b);
    a = b;
  }

  const std::size_t expected = (panels.size() + 1) * pieces * 20;
  nodes_.reserve(expected);
  weights_.reserve(expected);
  const double inv_s = 1.0 / bath_.s;
  auto head = [&](double y) {
    return std::pair{lo * std::pow(y, inv_s), lo * inv_s * std::pow(y, inv_s - 1.0)};
  };
  auto identity = [](double w) { return std::pair{w, 1.0}; };
  for (int k = 0; k < pieces; ++k)
    add_panel(double(k) / pieces, double(k + 1) / pieces, head, nodes_, weights_);
  for (const auto& [pa, pb] : panels) {
    const double step = (pb - pa) / pieces;
    for (int k = 0; k < pieces; ++k) add_panel(pa + k * step, pa + (k + 1) * step, identity, nodes_, weights_);
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    weights_[i] *= bath_.spectral_density(nodes_[i]) * bath_.thermal_factor(nodes_[i]);
}

SpectralQuadrature SpectralQuadrature::refined(const BathSpec& bath, double horizon,
                                               const QuadratureOptions& options) {
  auto probes = [&](const SpectralQuadrature& q) {
    std::vector<double> p;
    p.push_back(q.integrate([](double) { return 1.0; }));
    if (horizon > 0.0) {
      p.push_back(q.integrate([&](double w) { return free_filter(w, horizon); }));
      p.push_back(q.integrate([&](double w) { return free_filter(w, 0.25 * horizon); }));
    }
    return p;
  };
  SpectralQuadrature prev(bath, horizon, 0, options);
  auto prev_p = probes(prev);
  double change = 0.0;
  for (int level = 1; level <= options.max_level; ++level) {
    SpectralQuadrature cur(bath, horizon, level, options);
    const auto cur_p = probes(cur);
    change = 0.0;
    for (std::size_t i = 0; i < cur_p.size(); ++i)
      change = std::max(change, std::abs(cur_p[i] - prev_p[i]) / std::max(std::abs(cur_p[i]), 1e-300));
    cur.achieved_ = change;
    if (change < options.target_rel) return cur;
    prev = std::move(cur);
    prev_p = cur_p;
  }
  if (change > options.accept_rel)
    throw QuadratureError("spectral quadrature did not converge", change);
  return prev;
}

}  // namespace bbdd
