#include "bbdd/rtnsim.hpp"

#include <algorithm>
#include <cmath>

#include "bbdd/errors.hpp"

namespace bbdd {

void RtnParams::validate() const {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidSpec("rtn: v must be >= 0");
  if (!(gamma_plus >= 0.0 && gamma_minus >= 0.0)) throw InvalidSpec("rtn: rates must be >= 0");
  if (!(gamma() > 0.0)) throw InvalidSpec("rtn: gamma_plus + gamma_minus must be > 0");
  if (initial_sign != 1 && initial_sign != -1) throw InvalidSpec("rtn: initial_sign must be +1 or -1");
}

double RtnTrajectory::value(double u) const {
  const auto n = std::upper_bound(switch_times.begin(), switch_times.end(), u) - switch_times.begin();
  return (n % 2 == 0 ? initial_sign : -initial_sign) * amplitude;
}

int DisturbanceSpec::sign_at(double t) const {
  if (kind == Kind::kNone) return 1;
  const double a = std::floor(4.0 * rate * t / 25.0);
  const double b = std::floor(4.0 * rate * t / 5.0);
  return std::fmod(std::abs(a * b), 2.0) == 0.0 ? 1 : -1;
}

RtnTrajectory sample_trajectory(const RtnParams& params, double t_start, double t_end, Rng& rng) {
  if (!(t_start < t_end)) throw DomainError("sample_trajectory: need t_start < t_end");
  RtnTrajectory traj{t_start, t_end, {}, params.initial_sign, 0.5 * params.v};
  int state = params.initial_sign;
  double t = t_start;
  for (;;) {
    const double rate = state > 0 ? params.gamma_minus : params.gamma_plus;
    if (!(rate > 0.0)) break;
    t += std::exponential_distribution<double>(rate)(rng);
    if (t > t_end) break;
    traj.switch_times.push_back(t);
    state = -state;
  }
  return traj;
}

RtnTrajectory sample_trajectory(const RtnParams& params, double t_start, double t_end,
                                std::uint64_t seed) {
  Rng rng(seed);
  return sample_trajectory(params, t_start, t_end, rng);
}

std::complex<double> analytic_Z(const RtnParams& params, double t, double t0) {
  if (!(params.gamma() > 0.0)) throw DomainError("analytic_Z: gamma must be > 0");
  using namespace std::complex_literals;
  const double gamma = params.gamma();
  const double tau = t - t0;
  if (tau == 0.0) return 1.0;
  const double g = params.g();
  const std::complex<double> alpha = std::sqrt(1.0 - g * g + 2.0i * g * params.bias());
  const double half = 0.5 * gamma * tau;
  const std::complex<double> x = half * alpha;
  const std::complex<double> b = 1.0 - 1.0i * (g * params.initial_sign);
  // Z = exp(-half) [cosh x + b half sinh(x)/x]
  std::complex<double> cosh_part;
  std::complex<double> sinhc_part;
  if (std::abs(x) < 1e-3) {
    const std::complex<double> x2 = x * x;
    cosh_part = std::exp(-half) * (1.0 + x2 / 2.0 + x2 * x2 / 24.0);
    sinhc_part = std::exp(-half) * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
  } else {
    const std::complex<double> up = std::exp(x - half);
    const std::complex<double> down = std::exp(-x - half);
    cosh_part = 0.5 * (up + down);
    sinhc_part = 0.5 * (up - down) / x;
  }
  return cosh_part + b * half * sinhc_part;
}

std::vector<double> interval_noise_integrals(const RtnTrajectory& traj,
                                             std::span<const double> boundaries,
                                             const DisturbanceSpec& disturbance) {
  if (boundaries.size() < 2) throw DomainError("interval_noise_integrals: need an interval");
  if (boundaries.front() < traj.t_start || boundaries.back() > traj.t_end)
    throw DomainError("trajectory does not span the control horizon");
  const auto& sw = traj.switch_times;
  const bool burst = disturbance.kind == DisturbanceSpec::Kind::kBurst;
  const double spacing = burst ? disturbance.breakpoint_spacing() : 0.0;

  std::vector<double> phi(boundaries.size() - 1, 0.0);
  std::size_t next_switch = static_cast<std::size_t>(
      std::upper_bound(sw.begin(), sw.end(), boundaries.front()) - sw.begin());
  int sign = (next_switch % 2 == 0) ? traj.initial_sign : -traj.initial_sign;
  for (std::size_t j = 0; j + 1 < boundaries.size(); ++j) {
    double lo = boundaries[j];
    const double b = boundaries[j + 1];
    double sum = 0.0;
    while (lo < b) {
      double hi = b;
      if (next_switch < sw.size() && sw[next_switch] < hi) hi = sw[next_switch];
      if (burst) {
        const double brk = (std::floor(lo / spacing) + 1.0) * spacing;
        if (brk < hi) hi = brk;
      }
      if (hi > lo) {
        const int d = burst ? disturbance.sign_at(0.5 * (lo + hi)) : 1;
        sum += d * sign * (hi - lo);
      }
      if (next_switch < sw.size() && sw[next_switch] <= hi) {
        sign = -sign;
        ++next_switch;
      }
      lo = hi;
    }
    phi[j] = traj.amplitude * sum;
  }
  return phi;
}

double trajectory_phase(const RtnTrajectory& traj, const ControlRealization& r,
                        const DisturbanceSpec& disturbance) {
  const auto phi = interval_noise_integrals(traj, r.boundaries(), disturbance);
  const auto chi = r.chi();
  double s = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) s += chi[j] * phi[j];
  return s;
}

namespace {

std::complex<double> unit_phase(double phase) { return std::polar(1.0, -phase); }

std::complex<double> signed_exp(std::span<const Sign> chi, std::span<const double> phi) {
  double s = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) s += chi[j] * phi[j];
  return unit_phase(s);
}

// Pulse grid and, for deterministic kinds, the fixed sign sequence.
struct PulseLayout {
  std::vector<double> boundaries;
  std::vector<Sign> chi;
};

PulseLayout layout_for(const ProtocolSpec& spec) {
  if (!is_randomized(spec.kind)) {
    const auto r = deterministic_realization(spec);
    return {{r.boundaries().begin(), r.boundaries().end()}, {r.chi().begin(), r.chi().end()}};
  }
  PulseLayout l;
  l.boundaries.resize(static_cast<std::size_t>(spec.intervals) + 1);
  for (int j = 0; j <= spec.intervals; ++j) l.boundaries[j] = spec.t0 + j * spec.dt;
  return l;
}

// Exact average over lambda_0..lambda_{M-1} iid Bernoulli(p).
std::complex<double> random_transfer(double p, std::span<const double> phi) {
  std::complex<double> plus = (1.0 - p) * unit_phase(phi[0]);
  std::complex<double> minus = p * unit_phase(-phi[0]);
  for (std::size_t j = 1; j < phi.size(); ++j) {
    const std::complex<double> np = ((1.0 - p) * plus + p * minus) * unit_phase(phi[j]);
    const std::complex<double> nm = (p * plus + (1.0 - p) * minus) * unit_phase(-phi[j]);
    plus = np;
    minus = nm;
  }
  return plus + minus;
}

std::complex<double> average_with_chi(const ProtocolSpec& spec, std::span<const Sign> fixed_chi,
                                      std::span<const double> phi, const PulseAveraging& pulses,
                                      Rng& rng) {
  if (!is_randomized(spec.kind)) return signed_exp(fixed_chi, phi);
  const std::size_t m = phi.size();
  if (pulses.kind == PulseAveraging::Kind::kEnumerate) {
    if (spec.kind == Protocol::kRandom) return random_transfer(spec.flip_probability, phi);
    double prod = 1.0;
    for (std::size_t j = 0; j + 1 < m; j += 2) prod *= std::cos(phi[j] - phi[j + 1]);
    return prod;
  }
  // Draw order matches sample_realization so both produce the same sequence.
  std::complex<double> sum = 0.0;
  if (spec.kind == Protocol::kRandom) {
    std::bernoulli_distribution flip(spec.flip_probability);
    for (std::size_t k = 0; k < pulses.per_trajectory; ++k) {
      double s = 0.0;
      int sign = 1;
      for (std::size_t j = 0; j < m; ++j) {
        if (flip(rng)) sign = -sign;
        s += sign * phi[j];
      }
      flip(rng);  // lambda_M
      sum += unit_phase(s);
    }
  } else {
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t k = 0; k < pulses.per_trajectory; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j + 1 < m; j += 2) s += (coin(rng) ? -1.0 : 1.0) * (phi[j] - phi[j + 1]);
      sum += unit_phase(s);
    }
  }
  return sum / static_cast<double>(pulses.per_trajectory);
}

}  // namespace

std::complex<double> pulse_average(const ProtocolSpec& spec, std::span<const double> phi,
                                   const PulseAveraging& pulses, Rng& rng) {
  spec.validate();
  const auto layout = layout_for(spec);
  if (phi.size() + 1 != layout.boundaries.size())
    throw DomainError("pulse_average: one integral per interval expected");
  return average_with_chi(spec, layout.chi, phi, pulses, rng);
}

CoherenceResult ensemble_F(const ProtocolSpec& spec, const RtnParams& params,
                           const DisturbanceSpec& disturbance, const RtnEnsembleOptions& options) {
  spec.validate();
  params.validate();
  if (options.trajectories < 1) throw InvalidSpec("ensemble_F: need at least one trajectory");
  if (options.pulses.kind == PulseAveraging::Kind::kSample && options.pulses.per_trajectory < 1)
    throw InvalidSpec("ensemble_F: need at least one pulse draw per trajectory");
  const auto layout = layout_for(spec);
  const double t_begin = layout.boundaries.front();
  const double t_end = layout.boundaries.back();
  std::vector<double> free_phase(layout.boundaries.size() - 1, 0.0);
  if (options.frame == RtnFrame::kLogical) {
    for (std::size_t j = 0; j < free_phase.size(); ++j)
      free_phase[j] = options.omega0 * (layout.boundaries[j + 1] - layout.boundaries[j]);
  }
  const auto stats = chunked_reduce<RunningStats<std::complex<double>>>(
      options.trajectories, 256, options.workers, [&](std::size_t begin, std::size_t end) {
        RunningStats<std::complex<double>> s;
        for (std::size_t i = begin; i < end; ++i) {
          Rng traj_rng = make_rng(options.seed, 2 * i);
          Rng pulse_rng = make_rng(options.seed, 2 * i + 1);
          const auto traj = sample_trajectory(params, t_begin, t_end, traj_rng);
          auto phi = interval_noise_integrals(traj, layout.boundaries, disturbance);
          for (std::size_t j = 0; j < phi.size(); ++j) phi[j] += free_phase[j];
          s.push(average_with_chi(spec, layout.chi, phi, options.pulses, pulse_rng));
        }
        return s;
      });
  return CoherenceResult::sampled(stats);
}

std::vector<CoherenceResult> monte_carlo_Z(const RtnParams& params, double t0,
                                           std::span<const double> times, std::size_t trajectories,
                                           std::uint64_t seed, unsigned workers) {
  params.validate();
  if (times.empty()) return {};
  if (trajectories < 1) throw InvalidSpec("monte_carlo_Z: need at least one trajectory");
  std::vector<double> grid(times.begin(), times.end());
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < t0)
    throw DomainError("monte_carlo_Z: times must be sorted and >= t0");
  // Integrals from t0 to each grid time, accumulated over the sorted grid.
  std::vector<double> cuts{t0};
  for (double t : grid) {
    if (t > cuts.back()) cuts.push_back(t);
  }
  struct Acc {
    std::vector<RunningStats<std::complex<double>>> at;
    void merge(const Acc& o) {
      if (at.empty()) at.resize(o.at.size());
      for (std::size_t k = 0; k < o.at.size(); ++k) at[k].merge(o.at[k]);
    }
  };
  const DisturbanceSpec none;
  const double horizon = std::max(cuts.back(), t0 + 1e-300);
  const Acc acc = chunked_reduce<Acc>(
      trajectories, 512, workers, [&](std::size_t begin, std::size_t end) {
        Acc a;
        a.at.resize(grid.size());
        for (std::size_t i = begin; i < end; ++i) {
          Rng rng = make_rng(seed, i);
          const auto traj = sample_trajectory(params, t0, cuts.size() > 1 ? horizon : t0 + 1.0, rng);
          std::vector<double> cumulative{0.0};
          if (cuts.size() > 1) {
            const auto phi = interval_noise_integrals(traj, cuts, none);
            for (double p : phi) cumulative.push_back(cumulative.back() + p);
          }
          std::size_t c = 0;
          for (std::size_t k = 0; k < grid.size(); ++k) {
            while (cuts[c] < grid[k]) ++c;
            a.at[k].push(unit_phase(cumulative[c]));
          }
        }
        return a;
      });
  std::vector<CoherenceResult> out;
  out.reserve(grid.size());
  for (const auto& s : acc.at) out.push_back(CoherenceResult::sampled(s));
  return out;
}

std::complex<double> physical_frame_F(const ProtocolSpec& spec, const RtnParams& params,
                                      double omega0, const QubitState& state0,
                                      CoherenceFrame frame, std::size_t trajectories,
                                      std::uint64_t seed, unsigned workers) {
  spec.validate();
  params.validate();
  state0.validate();
  if (!(omega0 >= 0.0)) throw DomainError("physical_frame_F: omega0 must be >= 0");
  if (trajectories < 1) throw InvalidSpec("physical_frame_F: need at least one trajectory");

  std::vector<WeightedRealization> pulses;
  if (is_randomized(spec.kind)) {
    RealizationEnumerator en(spec, EnumerationOptions{.include_final_flip = true});
    while (auto wr = en.next()) pulses.push_back(std::move(*wr));
  } else {
    pulses.push_back({deterministic_realization(spec), 1.0});
  }
  const auto grid = pulses.front().realization.boundaries();
  std::vector<double> free_phase(grid.size() - 1);
  for (std::size_t j = 0; j < free_phase.size(); ++j) free_phase[j] = omega0 * (grid[j + 1] - grid[j]);
  std::vector<bool> even(pulses.size());
  for (std::size_t k = 0; k < pulses.size(); ++k)
    even[k] = total_flip_parity(pulses[k].realization) == Parity::kEven;

  const DisturbanceSpec none;
  const auto acc = chunked_reduce<WeightedSum>(
      trajectories, 64, workers, [&](std::size_t begin, std::size_t end) {
        WeightedSum s;
        for (std::size_t i = begin; i < end; ++i) {
          Rng rng = make_rng(seed, 2 * i);
          const auto traj = sample_trajectory(params, grid.front(), grid.back(), rng);
          auto phi = interval_noise_integrals(traj, grid, none);
          for (std::size_t j = 0; j < phi.size(); ++j) phi[j] += free_phase[j];
          for (std::size_t k = 0; k < pulses.size(); ++k) {
            const auto z = signed_exp(pulses[k].realization.chi(), phi);
            std::complex<double> value;
            if (frame == CoherenceFrame::kLogical || even[k]) {
              value = state0.rho01 * z;
            } else {
              value = state0.rho10() * std::conj(z);
            }
            s.add(value, pulses[k].weight);
          }
        }
        return s;
      });
  return acc.sum() / acc.weight();
}

}  // namespace bbdd
