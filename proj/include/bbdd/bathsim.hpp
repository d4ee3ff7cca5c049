#ifndef BBDD_BATHSIM_HPP_
#define BBDD_BATHSIM_HPP_

// Pure dephasing by a thermal bosonic bath under bang-bang control. Every
// decoherence exponent is a spectral integral of I(w) coth(w/2T) against a
// filter set by the pulse history.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bbdd/coherence.hpp"
#include "bbdd/pulsekit.hpp"
#include "bbdd/spectral_quadrature.hpp"

namespace bbdd {

/// Time dependence f(t) of every mode coupling, g_k(t) = g_k f(t).
struct CouplingModulation {
  enum class Kind { kConstant, kFloorSign, kCosSin };
  Kind kind = Kind::kConstant;
  double rate = 10.0 / 3.0;  // floor sign: (-1)^floor(rate wc t)
  double p = 2.95;           // cos sin: cos(p pi wc t) sin(q pi wc t)
  double q = 3.25;
  double sign = 1.0;         // overall sign, invisible in every Gamma

  static CouplingModulation constant(double sign = 1.0) { return {Kind::kConstant, 10.0 / 3.0, 2.95, 3.25, sign}; }
  static CouplingModulation floor_sign(double rate = 10.0 / 3.0) { return {Kind::kFloorSign, rate, 2.95, 3.25, 1.0}; }
  static CouplingModulation cos_sin(double p = 2.95, double q = 3.25) { return {Kind::kCosSin, 10.0 / 3.0, p, q, 1.0}; }

  double at(double t, double omega_c) const;
};

/// int_a^b f(u) exp(i w u) du in closed form.
std::complex<double> interval_response(const CouplingModulation& f, double omega_c, double a,
                                       double b, double w);

/// c_d = sum_l chi_l chi_{l+d}, d = 0..M-1.
std::vector<double> chi_correlations(std::span<const Sign> chi);

double gamma_free(const BathSpec& bath, double t, double t0 = 0.0);
double gamma_free(const SpectralQuadrature& quad, double tau);

/// Gamma of the A protocol, tan^2 form with the alternating bracket used
/// within 1e-3 of each pole of tan. M must be even.
double gamma_deterministic(const BathSpec& bath, int intervals, double dt, double t0 = 0.0);
double gamma_deterministic(const SpectralQuadrature& quad, int intervals, double dt);

/// Gamma of one realization on a uniform grid, bracket form.
double gamma_random(const BathSpec& bath, const ControlRealization& r);
double gamma_random(const SpectralQuadrature& quad, const ControlRealization& r);

/// 2 int I coth |sum_j chi_j int_{t_j}^{t_j+1} f(u) e^{iwu} du|^2 dw.
double gamma_modulated(const BathSpec& bath, const ControlRealization& r,
                       const CouplingModulation& f);
double gamma_modulated(const SpectralQuadrature& quad, const ControlRealization& r,
                       const CouplingModulation& f);

/// Gamma = chi^T K chi for every sign sequence on one grid.
class DecoherenceKernel {
 public:
  /// Toeplitz kernel of a uniform grid with constant coupling.
  static DecoherenceKernel uniform(const SpectralQuadrature& quad, int intervals, double dt);
  /// Dense kernel K = 2 Re(A^H A), A_ij = sqrt(W_i) w_j(w_i).
  static DecoherenceKernel modulated(const SpectralQuadrature& quad,
                                     std::span<const double> boundaries,
                                     const CouplingModulation& f);

  int intervals() const { return static_cast<int>(k_.rows()); }
  const Eigen::MatrixXd& matrix() const { return k_; }
  double gamma(std::span<const Sign> chi) const;
  /// Expected Gamma over unbiased random signs.
  double trace() const { return k_.trace(); }

 private:
  explicit DecoherenceKernel(Eigen::MatrixXd k) : k_(std::move(k)) {}
  Eigen::MatrixXd k_;
};

struct GammaExpectation {
  double expected = 0.0;  // M Gamma_free(dt)
  double bound = 1.0;     // exp(-expected) <= E exp(-Gamma_R)
};
GammaExpectation expected_gamma_and_bound(const BathSpec& bath, int intervals, double dt);

enum class LimitRegime { kRandom, kDeterministic };

/// Second-order small-dt forms: 2 t dt int I coth (random) and
/// dt^2 int I coth (1 - cos w t) (deterministic), t = M dt.
double small_dt_limits(const BathSpec& bath, int intervals, double dt, LimitRegime regime);

/// Discrete bath, g_k^2 = I(w_k) dw on the midpoints of a uniform grid.
struct ModeSet {
  std::vector<double> omega;
  std::vector<double> coupling;

  static ModeSet uniform(const BathSpec& bath, std::size_t count, double omega_max);
};

/// Finite mode sum sum_k |eta_k|^2 / 2 coth(w_k/2T), uniform grid only.
double discrete_mode_gamma(const ModeSet& modes, double temperature, const ControlRealization& r);

struct BathEnsembleResult {
  double mean_exp_neg_gamma = 1.0;
  double stddev = 0.0;  // spread of exp(-Gamma) over the ensemble
  double std_error = 0.0;  // stddev/sqrt(K) when sampled, 0 when exact
  double mean_gamma = 0.0;
  double lower_bound = 1.0;  // exp(-E Gamma) of the unbiased R ensemble on the same grid
  std::int64_t count = 0;
  bool exact = true;
};

/// Average of exp(-Gamma) over a protocol's realizations.
BathEnsembleResult bath_ensemble(const SpectralQuadrature& quad, const ProtocolSpec& spec,
                                 const CouplingModulation& f = CouplingModulation::constant(),
                                 const EnsembleMode& mode = EnsembleMode::enumerate(),
                                 unsigned workers = 1);

struct FrameRatios {
  double f1 = 1.0;  // logical frame, free precession kept
  double f2 = 1.0;  // logical-IP frame
};

/// F2 = E exp(-Gamma), F1 = E cos(omega0 sum_j chi_j dt_j) exp(-Gamma). The
/// physical-frame coherence is (rho01 + rho10)/2 times F1.
FrameRatios physical_frame_ratios(const SpectralQuadrature& quad, const ProtocolSpec& spec,
                                  double omega0,
                                  const EnsembleMode& mode = EnsembleMode::enumerate());

/// Quadrature sized for a control horizon, refined to the default tolerance.
SpectralQuadrature quadrature_for(const BathSpec& bath, double horizon);

}  // namespace bbdd

#endif  // BBDD_BATHSIM_HPP_
