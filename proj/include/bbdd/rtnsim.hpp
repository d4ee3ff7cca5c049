#ifndef BBDD_RTNSIM_HPP_
#define BBDD_RTNSIM_HPP_

// Single bistable fluctuator (random telegraph noise) coupled to the qubit
// frequency: trajectory sampling, the analytic free decay Z(t, t0), and
// controlled coherence averaged over noise and pulse realizations.

#include <complex>
#include <vector>

#include "bbdd/coherence.hpp"
#include "bbdd/driftsim.hpp"
#include "bbdd/pulsekit.hpp"

namespace bbdd {

/// Noise takes the values +-v/2. The rate of leaving +v/2 is gamma_minus and
/// the rate of leaving -v/2 is gamma_plus.
struct RtnParams {
  double v = 1.0;
  double gamma_plus = 0.5;
  double gamma_minus = 0.5;
  int initial_sign = 1;

  static RtnParams symmetric(double v, double gamma, int initial_sign = 1) {
    return {v, gamma / 2, gamma / 2, initial_sign};
  }

  double gamma() const { return gamma_plus + gamma_minus; }
  double g() const { return v / gamma(); }
  double bias() const { return (gamma_minus - gamma_plus) / gamma(); }
  void validate() const;
};

struct RtnTrajectory {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> switch_times;  // strictly increasing, inside (t_start, t_end]
  int initial_sign = 1;
  double amplitude = 0.5;  // v/2

  /// initial_sign (-1)^(#switches <= u) v/2
  double value(double u) const;
};

/// D(t) multiplying the noise. kBurst: (-1)^(floor(4 gamma t/25) floor(4 gamma t/5)).
struct DisturbanceSpec {
  enum class Kind { kNone, kBurst };
  Kind kind = Kind::kNone;
  double rate = 1.0;  // gamma of the burst formula

  static DisturbanceSpec none() { return {}; }
  static DisturbanceSpec burst(double gamma) { return {Kind::kBurst, gamma}; }

  int sign_at(double t) const;
  /// Spacing of the grid that contains every sign change (5 / (4 gamma)).
  double breakpoint_spacing() const { return 5.0 / (4.0 * rate); }
};

RtnTrajectory sample_trajectory(const RtnParams& params, double t_start, double t_end, Rng& rng);
RtnTrajectory sample_trajectory(const RtnParams& params, double t_start, double t_end,
                                std::uint64_t seed);

/// E exp(-i int_t0^t RTN du) for the semirandom telegraph process.
std::complex<double> analytic_Z(const RtnParams& params, double t, double t0);

/// Phi_j = int over interval j of D(u) RTN(u) du, exact for the piecewise
/// constant integrand.
std::vector<double> interval_noise_integrals(const RtnTrajectory& traj,
                                             std::span<const double> boundaries,
                                             const DisturbanceSpec& disturbance);

/// sum_j chi_j Phi_j; the logical-IP ratio for the pair is exp(-i phase).
double trajectory_phase(const RtnTrajectory& traj, const ControlRealization& r,
                        const DisturbanceSpec& disturbance);

/// Logical-IP drops the free omega0 sigma_z/2 part; logical keeps it.
enum class RtnFrame { kLogicalIP, kLogical };

struct PulseAveraging {
  enum class Kind { kEnumerate, kSample };
  Kind kind = Kind::kEnumerate;
  std::size_t per_trajectory = 1000;  // fresh pulse draws per trajectory

  static PulseAveraging enumerate() { return {}; }
  static PulseAveraging sample(std::size_t k) { return {Kind::kSample, k}; }
};

struct RtnEnsembleOptions {
  std::size_t trajectories = 10000;
  PulseAveraging pulses;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  RtnFrame frame = RtnFrame::kLogicalIP;
  double omega0 = 0.0;  // kLogical only
};

/// Pulse-averaged exp(-i sum_j chi_j Phi_j) for one set of interval integrals.
/// Enumeration of R uses a two-state transfer product and is exact for any M.
std::complex<double> pulse_average(const ProtocolSpec& spec, std::span<const double> phi,
                                   const PulseAveraging& pulses, Rng& rng);

/// F(t_M, t0) averaged over trajectories and pulse realizations. Trajectory i
/// draws from stream 2i of the seed, its pulse samples from stream 2i+1.
CoherenceResult ensemble_F(const ProtocolSpec& spec, const RtnParams& params,
                           const DisturbanceSpec& disturbance, const RtnEnsembleOptions& options);

/// Monte Carlo estimate of Z(t_i, t0) on a time grid from shared trajectories.
std::vector<CoherenceResult> monte_carlo_Z(const RtnParams& params, double t0,
                                           std::span<const double> times, std::size_t trajectories,
                                           std::uint64_t seed, unsigned workers = 1);

enum class CoherenceFrame { kLogical, kPhysical };

/// Expected rho01(t_M) over the joint (trajectory, pulse realization)
/// ensemble including the final flip, every pulse realization enumerated per
/// trajectory. The free precession omega0 is kept.
std::complex<double> physical_frame_F(const ProtocolSpec& spec, const RtnParams& params,
                                      double omega0, const QubitState& state0,
                                      CoherenceFrame frame, std::size_t trajectories,
                                      std::uint64_t seed, unsigned workers = 1);

}  // namespace bbdd

#endif  // BBDD_RTNSIM_HPP_
