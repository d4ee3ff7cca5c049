#include "bbdd/bathsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bbdd/errors.hpp"

namespace bbdd {

namespace {

using cd = std::complex<double>;

// int_a^b exp(i k u) du = exp(i k (a+b)/2) (b - a) sinc(k (b - a)/2)
cd oscillating_segment(double k, double a, double b) {
  const double len = b - a;
  const double x = 0.5 * k * len;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return std::polar(len * sinc, 0.5 * k * (a + b));
}

void require_even(int intervals, const char* who) {
  if (intervals < 2 || intervals % 2 != 0)
    throw DomainError(std::string(who) + ": M must be even and >= 2");
}

double uniform_step(const ControlRealization& r, const char* who) {
  const auto dt = r.uniform_dt();
  if (!dt) throw DomainError(std::string(who) + ": realization grid must be uniform");
  return *dt;
}

}  // namespace

double CouplingModulation::at(double t, double omega_c) const {
  switch (kind) {
    case Kind::kConstant:
      return sign;
    case Kind::kFloorSign: {
      const double k = std::floor(rate * omega_c * t);
      return std::fmod(std::abs(k), 2.0) == 0.0 ? 1.0 : -1.0;
    }
    case Kind::kCosSin:
      return std::cos(p * std::numbers::pi * omega_c * t) * std::sin(q * std::numbers::pi * omega_c * t);
  }
  return 1.0;
}

std::complex<double> interval_response(const CouplingModulation& f, double omega_c, double a,
                                       double b, double w) {
  if (!(a < b)) throw DomainError("interval_response: need a < b");
  switch (f.kind) {
    case CouplingModulation::Kind::kConstant:
      return f.sign * oscillating_segment(w, a, b);
    case CouplingModulation::Kind::kFloorSign: {
      const double unit = 1.0 / (f.rate * omega_c);
      cd sum = 0.0;
      double lo = a;
      double k = std::floor(a / unit) + 1.0;
      while (lo < b) {
        const double hi = std::min(b, k * unit);
        if (hi > lo) sum += f.at(0.5 * (lo + hi), omega_c) * oscillating_segment(w, lo, hi);
        lo = hi;
        k += 1.0;
      }
      return sum;
    }
    case CouplingModulation::Kind::kCosSin: {
      // cos(Au) sin(Bu) = [sin((A+B)u) - sin((A-B)u)] / 2
      const double sa = f.p * std::numbers::pi * omega_c;
      const double sb = f.q * std::numbers::pi * omega_c;
      const cd sum = oscillating_segment(w + sa + sb, a, b) - oscillating_segment(w - sa - sb, a, b) -
                     oscillating_segment(w + sa - sb, a, b) + oscillating_segment(w - sa + sb, a, b);
      return sum / cd(0.0, 4.0);
    }
  }
  return 0.0;
}

std::vector<double> chi_correlations(std::span<const Sign> chi) {
  const std::size_t m = chi.size();
  std::vector<double> c(m, 0.0);
  for (std::size_t d = 0; d < m; ++d) {
    long s = 0;
    for (std::size_t l = 0; l + d < m; ++l) s += chi[l] * chi[l + d];
    c[d] = static_cast<double>(s);
  }
  return c;
}

SpectralQuadrature quadrature_for(const BathSpec& bath, double horizon) {
  return SpectralQuadrature::refined(bath, horizon);
}

double gamma_free(const SpectralQuadrature& quad, double tau) {
  if (!(tau >= 0.0)) throw DomainError("gamma_free: need t >= t0");
  if (tau == 0.0) return 0.0;
  return quad.integrate([tau](double w) { return free_filter(w, tau); });
}

double gamma_free(const BathSpec& bath, double t, double t0) {
  const double tau = t - t0;
  if (!(tau >= 0.0)) throw DomainError("gamma_free: need t >= t0");
  if (tau == 0.0) return 0.0;
  return gamma_free(quadrature_for(bath, tau), tau);
}

double gamma_deterministic(const SpectralQuadrature& quad, int intervals, double dt) {
  require_even(intervals, "gamma_deterministic");
  if (!(dt > 0.0)) throw DomainError("gamma_deterministic: dt must be > 0");
  const double horizon = intervals * dt;
  const double near_pole = std::sin(1e-3);
  return quad.integrate([&](double w) {
    const double half = 0.5 * w * dt;
    const double c = std::cos(half);
    if (std::abs(c) >= near_pole) {
      const double t = std::sin(half) / c;
      return free_filter(w, horizon) * t * t;
    }
    cd sum = 0.0;
    for (int j = 0; j < intervals; ++j) sum += std::polar(j % 2 == 0 ? 1.0 : -1.0, j * w * dt);
    return free_filter(w, dt) * std::norm(sum);
  });
}

double gamma_deterministic(const BathSpec& bath, int intervals, double dt, double /*t0*/) {
  require_even(intervals, "gamma_deterministic");
  if (!(dt > 0.0)) throw DomainError("gamma_deterministic: dt must be > 0");
  return gamma_deterministic(quadrature_for(bath, intervals * dt), intervals, dt);
}

double gamma_random(const SpectralQuadrature& quad, const ControlRealization& r) {
  const double dt = uniform_step(r, "gamma_random");
  const auto c = chi_correlations(r.chi());
  const std::size_t m = c.size();
  return quad.integrate([&](double w) {
    double bracket = c[0];
    for (std::size_t d = 1; d < m; ++d) {
      if (c[d] != 0.0) bracket += 2.0 * c[d] * std::cos(static_cast<double>(d) * w * dt);
    }
    return free_filter(w, dt) * bracket;
  });
}

double gamma_random(const BathSpec& bath, const ControlRealization& r) {
  return gamma_random(quadrature_for(bath, r.horizon() - r.t0()), r);
}

double gamma_modulated(const SpectralQuadrature& quad, const ControlRealization& r,
                       const CouplingModulation& f) {
  const auto b = r.boundaries();
  const auto chi = r.chi();
  const double wc = quad.bath().omega_c;
  return quad.integrate([&](double w) {
    cd total = 0.0;
    for (std::size_t j = 0; j < chi.size(); ++j)
      total += static_cast<double>(chi[j]) * interval_response(f, wc, b[j], b[j + 1], w);
    return 2.0 * std::norm(total);
  });
}

double gamma_modulated(const BathSpec& bath, const ControlRealization& r,
                       const CouplingModulation& f) {
  return gamma_modulated(quadrature_for(bath, r.horizon() - r.t0()), r, f);
}

DecoherenceKernel DecoherenceKernel::uniform(const SpectralQuadrature& quad, int intervals,
                                             double dt) {
  if (intervals < 1) throw DomainError("DecoherenceKernel: M must be >= 1");
  if (!(dt > 0.0)) throw DomainError("DecoherenceKernel: dt must be > 0");
  std::vector<double> lag(intervals);
  for (int d = 0; d < intervals; ++d) {
    lag[d] = quad.integrate(
        [&](double w) { return free_filter(w, dt) * std::cos(static_cast<double>(d) * w * dt); });
  }
  Eigen::MatrixXd k(intervals, intervals);
  for (int i = 0; i < intervals; ++i) {
    for (int j = 0; j < intervals; ++j) k(i, j) = lag[std::abs(i - j)];
  }
  return DecoherenceKernel(std::move(k));
}

DecoherenceKernel DecoherenceKernel::modulated(const SpectralQuadrature& quad,
                                               std::span<const double> boundaries,
                                               const CouplingModulation& f) {
  if (boundaries.size() < 2) throw DomainError("DecoherenceKernel: need an interval");
  const auto nodes = quad.nodes();
  const auto weights = quad.weights();
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  const Eigen::Index m = static_cast<Eigen::Index>(boundaries.size() - 1);
  const double wc = quad.bath().omega_c;
  Eigen::MatrixXcd a(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(std::max(0.0, weights[i]));
    for (Eigen::Index j = 0; j < m; ++j)
      a(i, j) = sw * interval_response(f, wc, boundaries[j], boundaries[j + 1], nodes[i]);
  }
  Eigen::MatrixXd k = 2.0 * (a.adjoint() * a).real();
  return DecoherenceKernel(0.5 * (k + k.transpose()));
}

double DecoherenceKernel::gamma(std::span<const Sign> chi) const {
  if (static_cast<Eigen::Index>(chi.size()) != k_.rows())
    throw DomainError("DecoherenceKernel: sign sequence length mismatch");
  Eigen::VectorXd x(k_.rows());
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = chi[j];
  return x.dot(k_ * x);
}

GammaExpectation expected_gamma_and_bound(const BathSpec& bath, int intervals, double dt) {
  if (intervals < 1) throw DomainError("expected_gamma_and_bound: M must be >= 1");
  if (!(dt > 0.0)) throw DomainError("expected_gamma_and_bound: dt must be > 0");
  const auto quad = quadrature_for(bath, intervals * dt);
  GammaExpectation e;
  e.expected = intervals * gamma_free(quad, dt);
  e.bound = std::exp(-e.expected);
  return e;
}

double small_dt_limits(const BathSpec& bath, int intervals, double dt, LimitRegime regime) {
  if (intervals < 1) throw DomainError("small_dt_limits: M must be >= 1");
  if (!(dt > 0.0)) throw DomainError("small_dt_limits: dt must be > 0");
  const double t = intervals * dt;
  const auto quad = quadrature_for(bath, t);
  if (regime == LimitRegime::kRandom) return 2.0 * t * dt * quad.integrate([](double) { return 1.0; });
  return dt * dt * quad.integrate([t](double w) {
    const double sh = std::sin(0.5 * w * t);
    return 2.0 * sh * sh;
  });
}

ModeSet ModeSet::uniform(const BathSpec& bath, std::size_t count, double omega_max) {
  bath.validate();
  if (count < 1 || !(omega_max > 0.0)) throw InvalidSpec("ModeSet: need count >= 1 and omega_max > 0");
  ModeSet modes;
  const double dw = omega_max / static_cast<double>(count);
  modes.omega.reserve(count);
  modes.coupling.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double w = (static_cast<double>(k) + 0.5) * dw;
    modes.omega.push_back(w);
    modes.coupling.push_back(std::sqrt(bath.spectral_density(w) * dw));
  }
  return modes;
}

double discrete_mode_gamma(const ModeSet& modes, double temperature, const ControlRealization& r) {
  const double dt = uniform_step(r, "discrete_mode_gamma");
  const auto chi = r.chi();
  BathSpec thermal;
  thermal.temperature = temperature;
  double total = 0.0;
  for (std::size_t k = 0; k < modes.omega.size(); ++k) {
    const double w = modes.omega[k];
    const cd xi = (2.0 * modes.coupling[k] / w) * (1.0 - std::polar(1.0, w * dt));
    cd sum = 0.0;
    for (std::size_t j = 0; j < chi.size(); ++j)
      sum += static_cast<double>(chi[j]) * std::polar(1.0, w * static_cast<double>(j) * dt);
    const cd eta = xi * sum;
    total += 0.5 * std::norm(eta) * thermal.thermal_factor(w);
  }
  return total;
}

namespace {

struct Unit {
  void merge(const Unit&) {}
};

struct Member {
  double gamma = 0.0;
  double weight = 1.0;
  double signed_time = 0.0;  // sum_j chi_j dt_j
};

// Gamma of every ensemble member; deterministic kinds give a single member.
std::vector<Member> ensemble_members(const SpectralQuadrature& quad, const ProtocolSpec& spec,
                                     const CouplingModulation& f, const EnsembleMode& mode,
                                     unsigned workers, std::vector<double>& grid, bool& exact) {
  spec.validate();
  std::optional<RealizationEnumerator> en;
  std::optional<ControlRealization> fixed;
  if (!is_randomized(spec.kind)) {
    fixed = deterministic_realization(spec);
    grid.assign(fixed->boundaries().begin(), fixed->boundaries().end());
  } else {
    grid.resize(static_cast<std::size_t>(spec.intervals) + 1);
    for (int j = 0; j <= spec.intervals; ++j) grid[j] = spec.t0 + j * spec.dt;
    if (mode.kind == EnsembleMode::Kind::kEnumerate) en.emplace(spec);
  }
  const bool uniform = !fixed || fixed->uniform_dt().has_value();
  const DecoherenceKernel kernel = (f.kind == CouplingModulation::Kind::kConstant && uniform)
                                       ? DecoherenceKernel::uniform(quad, static_cast<int>(grid.size()) - 1,
                                                                    (grid.back() - grid.front()) / (grid.size() - 1))
                                       : DecoherenceKernel::modulated(quad, grid, f);
  auto member_of = [&](const ControlRealization& r, double weight) {
    Member m{kernel.gamma(r.chi()), weight, 0.0};
    for (int j = 0; j < r.intervals(); ++j) m.signed_time += r.chi()[j] * r.interval_length(j);
    return m;
  };
  exact = fixed.has_value() || en.has_value();
  if (fixed) return {member_of(*fixed, 1.0)};
  const std::size_t n = en ? en->size() : mode.count;
  if (n < 1) throw InvalidSpec("bath ensemble: sample count must be >= 1");
  std::vector<Member> out(n);
  chunked_reduce<Unit>(n, 1024, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (en) {
        const auto wr = en->at(i);
        out[i] = member_of(wr.realization, wr.weight);
      } else {
        Rng rng = make_rng(mode.seed, i);
        out[i] = member_of(sample_realization(spec, rng), 1.0 / static_cast<double>(n));
      }
    }
    return Unit{};
  });
  return out;
}

// E Gamma of the unbiased R ensemble on the uniform grid of the spec.
double random_expectation(const SpectralQuadrature& quad, const ProtocolSpec& spec,
                          const CouplingModulation& f) {
  if (f.kind == CouplingModulation::Kind::kConstant) return spec.intervals * gamma_free(quad, spec.dt);
  const double wc = quad.bath().omega_c;
  double total = 0.0;
  for (int j = 0; j < spec.intervals; ++j) {
    const double a = spec.t0 + j * spec.dt;
    const double b = a + spec.dt;
    total += quad.integrate([&](double w) { return 2.0 * std::norm(interval_response(f, wc, a, b, w)); });
  }
  return total;
}

}  // namespace

BathEnsembleResult bath_ensemble(const SpectralQuadrature& quad, const ProtocolSpec& spec,
                                 const CouplingModulation& f, const EnsembleMode& mode,
                                 unsigned workers) {
  std::vector<double> grid;
  bool exact = true;
  const auto members = ensemble_members(quad, spec, f, mode, workers, grid, exact);
  BathEnsembleResult res;
  res.exact = exact;
  res.count = static_cast<std::int64_t>(members.size());
  double wsum = 0.0;
  double mean = 0.0;
  double mean_gamma = 0.0;
  for (const auto& m : members) {
    wsum += m.weight;
    mean += m.weight * std::exp(-m.gamma);
    mean_gamma += m.weight * m.gamma;
  }
  mean /= wsum;
  mean_gamma /= wsum;
  double var = 0.0;
  for (const auto& m : members) {
    const double d = std::exp(-m.gamma) - mean;
    var += m.weight * d * d;
  }
  var /= wsum;
  if (!exact && members.size() > 1) var *= static_cast<double>(members.size()) / (members.size() - 1);
  res.mean_exp_neg_gamma = mean;
  res.mean_gamma = mean_gamma;
  res.stddev = std::sqrt(var);
  res.std_error = exact ? 0.0 : res.stddev / std::sqrt(static_cast<double>(members.size()));
  res.lower_bound = std::exp(-random_expectation(quad, spec, f));
  return res;
}

FrameRatios physical_frame_ratios(const SpectralQuadrature& quad, const ProtocolSpec& spec,
                                  double omega0, const EnsembleMode& mode) {
  std::vector<double> grid;
  bool exact = true;
  const auto members =
      ensemble_members(quad, spec, CouplingModulation::constant(), mode, 1, grid, exact);
  double wsum = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  for (const auto& m : members) {
    const double decay = std::exp(-m.gamma);
    wsum += m.weight;
    f2 += m.weight * decay;
    f1 += m.weight * std::cos(omega0 * m.signed_time) * decay;
  }
  return {f1 / wsum, f2 / wsum};
}

}  // namespace bbdd
