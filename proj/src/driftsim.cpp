#include "bbdd/driftsim.hpp"

#include <algorithm>
#include <cmath>

#include "bbdd/errors.hpp"

namespace bbdd {

void DriftSpec::validate() const {
  if (!(omega0 >= 0.0) || !std::isfinite(omega0)) throw InvalidSpec("drift: omega0 must be >= 0");
  switch (g.kind) {
    case Modulation::Kind::kNone:
      break;
    case Modulation::Kind::kSinusoid:
      if (!(g.multiple > 0.0) || !std::isfinite(g.multiple))
        throw InvalidSpec("drift: sinusoid multiple must be > 0");
      break;
    case Modulation::Kind::kTable:
      if (g.times.size() < 2 || g.times.size() != g.values.size())
        throw InvalidSpec("drift: table needs >= 2 knots with one value each");
      for (std::size_t i = 1; i < g.times.size(); ++i) {
        if (!(g.times[i] > g.times[i - 1])) throw InvalidSpec("drift: table times must increase");
      }
      break;
  }
  if (d.kind == SignSchedule::Kind::kFloorSign && !(d.num > 0.0 && d.den > 0.0 && omega0 > 0.0))
    throw InvalidSpec("drift: floor-sign needs num, den and omega0 > 0");
  if (g.kind == Modulation::Kind::kSinusoid && !(omega0 > 0.0))
    throw InvalidSpec("drift: sinusoid needs omega0 > 0");
}

double DriftSpec::modulation_at(double t) const {
  switch (g.kind) {
    case Modulation::Kind::kNone:
      return 0.0;
    case Modulation::Kind::kSinusoid:
      return std::sin(g.multiple * omega0 * t);
    case Modulation::Kind::kTable: {
      if (t <= g.times.front()) return g.values.front();
      if (t >= g.times.back()) return g.values.back();
      const auto it = std::upper_bound(g.times.begin(), g.times.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - g.times.begin());
      const double w = (t - g.times[i - 1]) / (g.times[i] - g.times[i - 1]);
      return g.values[i - 1] + w * (g.values[i] - g.values[i - 1]);
    }
  }
  return 0.0;
}

int DriftSpec::sign_at(double t) const {
  if (d.kind == SignSchedule::Kind::kOne) return 1;
  const double k = std::floor(d.num * omega0 * t / d.den);
  return std::fmod(std::abs(k), 2.0) == 0.0 ? 1 : -1;
}

double DriftSpec::frequency(double t) const {
  return omega0 * (1.0 + modulation_at(t)) * sign_at(t);
}

void QubitState::validate() const {
  if (!(rho00 >= 0.0 && rho00 <= 1.0)) throw InvalidSpec("state: rho00 must lie in [0, 1]");
  if (std::norm(rho01) > rho00 * rho11() + 1e-12)
    throw InvalidSpec("state: |rho01|^2 exceeds rho00 rho11");
}

bool QubitState::is_pure(double tol) const {
  return std::abs(std::norm(rho01) - rho00 * rho11()) <= tol;
}

namespace {

// Integral of the unmodulated-plus-G integrand on [a, b] where D is constant.
double smooth_piece(const DriftSpec& drift, double a, double b) {
  const double len = b - a;
  switch (drift.g.kind) {
    case Modulation::Kind::kNone:
      return len;
    case Modulation::Kind::kSinusoid: {
      const double k = drift.g.multiple * drift.omega0;
      // (cos ka - cos kb) / k without cancellation for short pieces
      return len + 2.0 * std::sin(0.5 * k * (a + b)) * std::sin(0.5 * k * len) / k;
    }
    case Modulation::Kind::kTable: {
      // The interpolant is linear between knots, so the trapezoid is exact.
      const auto& knots = drift.g.times;
      double total = 0.0;
      double lo = a;
      auto it = std::upper_bound(knots.begin(), knots.end(), a);
      while (lo < b) {
        const double hi = (it != knots.end() && *it < b) ? *it : b;
        total += (hi - lo) * (2.0 + drift.modulation_at(lo) + drift.modulation_at(hi)) * 0.5;
        lo = hi;
        if (it != knots.end()) ++it;
      }
      return total;
    }
  }
  return len;
}

}  // namespace

double interval_phase(const DriftSpec& drift, double a, double b) {
  if (!(a < b)) throw DomainError("interval_phase: need a < b");
  if (drift.d.kind == SignSchedule::Kind::kOne) return drift.omega0 * smooth_piece(drift, a, b);
  const double unit = drift.d.den / (drift.d.num * drift.omega0);
  double total = 0.0;
  double lo = a;
  double k = std::floor(a / unit) + 1.0;
  while (lo < b) {
    const double hi = std::min(b, k * unit);
    if (hi > lo) total += drift.sign_at(0.5 * (lo + hi)) * smooth_piece(drift, lo, hi);
    lo = hi;
    k += 1.0;
  }
  return drift.omega0 * total;
}

std::vector<double> interval_phases(const DriftSpec& drift, std::span<const double> boundaries) {
  std::vector<double> theta;
  theta.reserve(boundaries.size());
  const std::size_t m = boundaries.size() - 1;
  if (drift.g.kind == Modulation::Kind::kNone && drift.d.kind == SignSchedule::Kind::kOne && m > 0) {
    // Constant drift on a uniform grid: one shared phase, so that sign sums
    // cancel exactly instead of to rounding.
    const double step = (boundaries.back() - boundaries.front()) / static_cast<double>(m);
    bool uniform = true;
    for (std::size_t j = 0; j < m && uniform; ++j)
      uniform = std::abs(boundaries[j + 1] - boundaries[j] - step) <= 1e-12 * std::abs(step) + 1e-15 * std::abs(boundaries[j]);
    if (uniform) return std::vector<double>(m, drift.omega0 * step);
  }
  for (std::size_t j = 0; j + 1 < boundaries.size(); ++j)
    theta.push_back(interval_phase(drift, boundaries[j], boundaries[j + 1]));
  return theta;
}

namespace {

double signed_sum(std::span<const Sign> chi, const std::vector<double>& theta) {
  double s = 0.0;
  for (std::size_t j = 0; j < chi.size(); ++j) s += chi[j] * theta[j];
  return s;
}

std::complex<double> unit_phase(double phase) { return std::polar(1.0, -phase); }

constexpr std::size_t kChunk = 4096;

std::vector<double> uniform_boundaries(const ProtocolSpec& spec) {
  std::vector<double> b(static_cast<std::size_t>(spec.intervals) + 1);
  for (int j = 0; j <= spec.intervals; ++j) b[j] = spec.t0 + j * spec.dt;
  return b;
}

}  // namespace

double realization_phase(const ControlRealization& r, const DriftSpec& drift) {
  return signed_sum(r.chi(), interval_phases(drift, r.boundaries()));
}

CoherenceResult ensemble_coherence_logical(const ProtocolSpec& spec, const DriftSpec& drift,
                                           const EnsembleMode& mode, unsigned workers) {
  spec.validate();
  drift.validate();
  if (!is_randomized(spec.kind)) {
    const auto r = deterministic_realization(spec);
    return CoherenceResult::exact(unit_phase(realization_phase(r, drift)), 1);
  }
  // R and H realizations share one uniform grid.
  const auto theta = interval_phases(drift, uniform_boundaries(spec));
  if (mode.kind == EnsembleMode::Kind::kEnumerate) {
    const RealizationEnumerator en(spec);
    const auto acc = chunked_reduce<WeightedSum>(
        en.size(), kChunk, workers, [&](std::size_t begin, std::size_t end) {
          WeightedSum s;
          for (std::size_t i = begin; i < end; ++i) {
            const auto wr = en.at(i);
            s.add(unit_phase(signed_sum(wr.realization.chi(), theta)), wr.weight);
          }
          return s;
        });
    return CoherenceResult::exact(acc.sum() / acc.weight(), acc.count());
  }
  if (mode.count < 1) throw InvalidSpec("ensemble: sample count must be >= 1");
  const auto stats = chunked_reduce<RunningStats<std::complex<double>>>(
      mode.count, kChunk, workers, [&](std::size_t begin, std::size_t end) {
        RunningStats<std::complex<double>> s;
        for (std::size_t i = begin; i < end; ++i) {
          Rng rng = make_rng(mode.seed, i);
          const auto r = sample_realization(spec, rng);
          s.push(unit_phase(signed_sum(r.chi(), theta)));
        }
        return s;
      });
  return CoherenceResult::sampled(stats);
}

double closed_form_R_expectation(double omega0, double dt, int intervals) {
  if (intervals < 0) throw DomainError("closed_form_R_expectation: M must be >= 0");
  return std::pow(std::cos(omega0 * dt), intervals);
}

double closed_form_R_dephasing_timedep(const DriftSpec& drift, const ProtocolSpec& spec) {
  spec.validate();
  drift.validate();
  if (spec.kind == Protocol::kRandom && spec.flip_probability != 0.5)
    throw DomainError("closed_form_R_dephasing_timedep: needs flip_probability = 1/2");
  double prod = 1.0;
  for (double th : interval_phases(drift, uniform_boundaries(spec))) prod *= std::cos(th);
  return prod;
}

double closed_form_H_dephasing(const DriftSpec& drift, const ProtocolSpec& spec) {
  if (spec.intervals % 2 != 0) throw DomainError("closed_form_H_dephasing: M must be even");
  spec.validate();
  drift.validate();
  const auto theta = interval_phases(drift, uniform_boundaries(spec));
  double prod = 1.0;
  for (std::size_t j = 0; j + 1 < theta.size(); j += 2) prod *= std::cos(theta[j] - theta[j + 1]);
  return prod;
}

std::complex<double> physical_frame_expectation(const QubitState& state0, const ProtocolSpec& spec,
                                                const DriftSpec& drift, Conditioning conditioning,
                                                const EnsembleMode& mode) {
  state0.validate();
  spec.validate();
  drift.validate();
  WeightedSum acc;
  auto visit = [&](const ControlRealization& r, double weight) {
    const bool even = total_flip_parity(r) == Parity::kEven;
    if (conditioning == Conditioning::kEvenParity && !even) return;
    const double phase = realization_phase(r, drift);
    acc.add(even ? state0.rho01 * unit_phase(phase) : state0.rho10() * unit_phase(-phase), weight);
  };
  if (!is_randomized(spec.kind)) {
    visit(deterministic_realization(spec), 1.0);
  } else if (mode.kind == EnsembleMode::Kind::kEnumerate) {
    RealizationEnumerator en(spec, EnumerationOptions{.include_final_flip = true});
    while (auto wr = en.next()) visit(wr->realization, wr->weight);
  } else {
    for (const auto& r : sample_realizations(spec, mode.count, mode.seed)) visit(r, 1.0);
  }
  if (acc.weight() == 0.0)
    throw DomainError("physical_frame_expectation: no realization with even flip parity");
  return acc.sum() / acc.weight();
}

ErrorProbability error_probability(const QubitState& state0, double omega0, double dt,
                                   int intervals) {
  state0.validate();
  const double c = closed_form_R_expectation(omega0, dt, intervals);
  ErrorProbability e;
  e.state = 2.0 * (state0.rho00 * state0.rho11() - std::norm(state0.rho01) * c);
  e.worst = 0.5 * (1.0 - c);
  e.pure_input = state0.is_pure();
  return e;
}

}  // namespace bbdd
