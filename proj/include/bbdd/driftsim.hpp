#ifndef BBDD_DRIFTSIM_HPP_
#define BBDD_DRIFTSIM_HPP_

// Closed-qubit phase evolution under a commuting sigma_z drift
// omega0 (1 + G(t)) D(t): per-realization phases, logical and physical
// ensemble averages, and the closed forms for the randomized protocols.

#include <complex>
#include <vector>

#include "bbdd/coherence.hpp"
#include "bbdd/pulsekit.hpp"

namespace bbdd {

/// G(t): additive relative modulation of the qubit frequency.
struct Modulation {
  enum class Kind { kNone, kSinusoid, kTable };
  Kind kind = Kind::kNone;
  double multiple = 1.0;       // sinusoid: G(t) = sin(multiple * omega0 * t)
  std::vector<double> times;   // table knots, strictly increasing
  std::vector<double> values;  // linear interpolation, held constant outside

  static Modulation none() { return {}; }
  static Modulation sinusoid(double multiple) { return {Kind::kSinusoid, multiple, {}, {}}; }
  static Modulation table(std::vector<double> times, std::vector<double> values) {
    return {Kind::kTable, 1.0, std::move(times), std::move(values)};
  }
};

/// D(t): sign schedule, (-1)^floor(num * omega0 * t / den) for kFloorSign.
struct SignSchedule {
  enum class Kind { kOne, kFloorSign };
  Kind kind = Kind::kOne;
  double num = 1.0;
  double den = 1.0;

  static SignSchedule one() { return {}; }
  static SignSchedule floor_sign(double num, double den) { return {Kind::kFloorSign, num, den}; }
};

struct DriftSpec {
  double omega0 = 1.0;
  Modulation g;
  SignSchedule d;

  void validate() const;
  double modulation_at(double t) const;
  int sign_at(double t) const;
  /// omega0 (1 + G(t)) D(t)
  double frequency(double t) const;
};

struct QubitState {
  double rho00 = 0.5;
  std::complex<double> rho01{0.5, 0.0};

  double rho11() const { return 1.0 - rho00; }
  std::complex<double> rho10() const { return std::conj(rho01); }
  /// Throws InvalidSpec for populations outside [0,1] or |rho01|^2 > rho00 rho11.
  void validate() const;
  bool is_pure(double tol = 1e-12) const;
};

/// omega0 * int_a^b (1 + G) D du. Closed form for sinusoid, exact piecewise
/// integration of the linear table, split at every sign change of D.
double interval_phase(const DriftSpec& drift, double a, double b);

/// Interval phases theta_j of every interval of the realization grid.
std::vector<double> interval_phases(const DriftSpec& drift, std::span<const double> boundaries);

/// sum_j chi_j theta_j; the single-realization coherence ratio is exp(-i phase).
double realization_phase(const ControlRealization& r, const DriftSpec& drift);

CoherenceResult ensemble_coherence_logical(const ProtocolSpec& spec, const DriftSpec& drift,
                                           const EnsembleMode& mode = EnsembleMode::enumerate(),
                                           unsigned workers = 1);

/// cos(omega0 dt)^M
double closed_form_R_expectation(double omega0, double dt, int intervals);

/// prod_j cos(theta_j). Needs the unbiased R protocol.
double closed_form_R_dephasing_timedep(const DriftSpec& drift, const ProtocolSpec& spec);

/// prod_k cos(theta_2k - theta_2k+1). M must be even.
double closed_form_H_dephasing(const DriftSpec& drift, const ProtocolSpec& spec);

enum class Conditioning { kNone, kEvenParity };

/// Ensemble average of the physical-frame coherence rho01(t_M). The final
/// flip lambda_M is part of the ensemble: an odd total number of flips swaps
/// rho01 and rho10.
std::complex<double> physical_frame_expectation(const QubitState& state0, const ProtocolSpec& spec,
                                                const DriftSpec& drift,
                                                Conditioning conditioning = Conditioning::kNone,
                                                const EnsembleMode& mode = EnsembleMode::enumerate());

struct ErrorProbability {
  double state = 0.0;  // 2 (rho00 rho11 - |rho01|^2 cos^M)
  double worst = 0.0;  // value at rho00 = 1/2, |rho01| = 1/2
  bool pure_input = true;
};

ErrorProbability error_probability(const QubitState& state0, double omega0, double dt,
                                   int intervals);

}  // namespace bbdd

#endif  // BBDD_DRIFTSIM_HPP_
