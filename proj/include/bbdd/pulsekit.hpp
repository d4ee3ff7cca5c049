#ifndef BBDD_PULSEKIT_HPP_
#define BBDD_PULSEKIT_HPP_

// Bang-bang pi-pulse sequences: the five decoupling protocols, their
// realizations (flip flags and toggling-frame signs), enumeration and sampling,
// and the instantaneous pulse propagators of the two carrier-phase conventions.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bbdd/statkit.hpp"

namespace bbdd {

enum class Protocol {
  kNone,           // free evolution
  kAsymmetric,     // A: repeated spin echo
  kSymmetric,      // S: Carr-Purcell style, half interval first
  kLongSymmetric,  // LS: pulse at odd multiples of dt only
  kRandom,         // R: each slot flips with flip_probability
  kHybrid,         // H: random choice between the two orderings of a cycle
};

std::string_view to_string(Protocol p);
/// Accepts NONE, A, S, LS, R, H (case-insensitive).
Protocol parse_protocol(std::string_view name);
bool is_randomized(Protocol p);

struct ProtocolSpec {
  Protocol kind = Protocol::kNone;
  int intervals = 2;  // M, number of base intervals
  double dt = 1.0;
  double t0 = 0.0;
  double flip_probability = 0.5;  // R only

  double horizon() const { return t0 + intervals * dt; }
  /// Throws InvalidSpec.
  void validate() const;
};

using Flip = std::uint8_t;
using Sign = int;

/// One concrete pulse history. boundaries t_0 < ... < t_M delimit M
/// free-evolution intervals, flips lambda_0..lambda_M mark pi pulses at each
/// boundary (lambda_0 is the pulse at t_0) and chi_j = (-1)^(lambda_0+...+lambda_j)
/// is the toggling-frame sign of interval j. lambda_M never enters chi.
class ControlRealization {
 public:
  ControlRealization(std::vector<double> boundaries, std::vector<Flip> flips);

  /// Uniform grid t_j = t0 + j dt.
  static ControlRealization uniform(double t0, double dt, std::vector<Flip> flips);

  int intervals() const noexcept { return static_cast<int>(chi_.size()); }
  double t0() const noexcept { return boundaries_.front(); }
  double horizon() const noexcept { return boundaries_.back(); }
  std::span<const double> boundaries() const noexcept { return boundaries_; }
  std::span<const Flip> flips() const noexcept { return flips_; }
  std::span<const Sign> chi() const noexcept { return chi_; }
  double interval_length(int j) const { return boundaries_[j + 1] - boundaries_[j]; }

  /// Common spacing if the grid is uniform (relative tolerance 1e-12).
  std::optional<double> uniform_dt() const;

  /// Chi as a dense vector, for kernel quadratic forms.
  Eigen::VectorXd chi_vector() const;

  bool operator==(const ControlRealization&) const = default;

 private:
  std::vector<double> boundaries_;
  std::vector<Flip> flips_;
  std::vector<Sign> chi_;
};

/// chi_j = (-1)^(lambda_0 + ... + lambda_j) for j < flips.size() - 1.
std::vector<Sign> chi_from_flips(std::span<const Flip> flips);

struct WeightedRealization {
  ControlRealization realization;
  double weight;
};

struct EnumerationOptions {
  /// Also enumerate lambda_M (R only); needed for physical-frame parity.
  bool include_final_flip = false;
  /// Largest number of free binary choices that may be enumerated.
  int cap = 20;
};

/// Deterministic stream over every realization of an R or H protocol.
class RealizationEnumerator {
 public:
  RealizationEnumerator(ProtocolSpec spec, EnumerationOptions options = {});

  std::uint64_t size() const noexcept { return size_; }
  std::optional<WeightedRealization> next();
  void reset() noexcept { index_ = 0; }

  /// Realization number `index` in stream order.
  WeightedRealization at(std::uint64_t index) const;

 private:
  ProtocolSpec spec_;
  EnumerationOptions options_;
  int bits_ = 0;
  std::uint64_t size_ = 0;
  std::uint64_t index_ = 0;
};

/// R or H protocol as a probability distribution over realizations.
class RealizationDistribution {
 public:
  explicit RealizationDistribution(ProtocolSpec spec);
  const ProtocolSpec& spec() const noexcept { return spec_; }
  std::vector<ControlRealization> sample(std::size_t count, std::uint64_t seed) const;
  RealizationEnumerator enumerate(EnumerationOptions options = {}) const;

 private:
  ProtocolSpec spec_;
};

using BuiltProtocol = std::variant<ControlRealization, RealizationDistribution>;

/// Single realization for NONE/A/S/LS, a distribution for R/H.
BuiltProtocol build_protocol(const ProtocolSpec& spec);

/// The unique realization of a deterministic protocol (throws for R/H).
ControlRealization deterministic_realization(const ProtocolSpec& spec);

RealizationEnumerator enumerate_realizations(const ProtocolSpec& spec,
                                             EnumerationOptions options = {});

std::vector<ControlRealization> sample_realizations(const ProtocolSpec& spec,
                                                    std::size_t count, std::uint64_t seed);

/// One draw from an R/H distribution using the caller's generator.
ControlRealization sample_realization(const ProtocolSpec& spec, Rng& rng);

/// Xi_{M-1} = 1 + sum_{j=1}^{M-1} (-1)^(lambda_1 + ... + lambda_j).
long xi_parity(const ControlRealization& r);

enum class Parity { kEven, kOdd };
Parity total_flip_parity(const ControlRealization& r);

// ---------------------------------------------------------------------------
// Line format for audit logs: "t0 M dt | l_0 ... l_M". Realizations on a
// non-uniform grid append "| t_1 ... t_{M-1}" with the interior boundaries.

std::string to_line(const ControlRealization& r);
ControlRealization parse_line(std::string_view line);

// ---------------------------------------------------------------------------
// Pulse propagators

using UnitaryMatrix = Eigen::Matrix2cd;

enum class PulseConvention {
  kIdenticalPhysical,  // (i)  carrier phase -omega0 t_j
  kFixedPhase,         // (ii) carrier phase 0
};
enum class Picture { kPhysical, kInteraction };

UnitaryMatrix pauli_x();
UnitaryMatrix pauli_z();
/// exp(-i angle sigma_z / 2)
UnitaryMatrix rotation_z(double angle);
/// exp(-i angle sigma_x / 2)
UnitaryMatrix rotation_x(double angle);

/// Free propagator exp(-i omega0 (b - a) sigma_z / 2).
UnitaryMatrix free_propagator(double omega0, double a, double b);

/// Instantaneous pi pulse at t_j in the requested convention and picture.
UnitaryMatrix pulse_propagator(PulseConvention convention, Picture picture, double t_j,
                               double omega0);

/// P_2 U_0(t2, t1) P_1 U_0(t1, t0), physical frame.
UnitaryMatrix two_pulse_cycle_propagator(PulseConvention convention, double omega0,
                                         double t0, double t1, double t2);

/// Frobenius distance after the optimal global phase.
double projective_distance(const UnitaryMatrix& a, const UnitaryMatrix& b);

/// Largest entry of |U^dagger U - 1|.
double unitarity_defect(const UnitaryMatrix& u);

}  // namespace bbdd

#endif  // BBDD_PULSEKIT_HPP_
