#ifndef BBDD_SPECTRAL_QUADRATURE_HPP_
#define BBDD_SPECTRAL_QUADRATURE_HPP_

// Frequency quadrature for integrals of I(w) coth(w/2T) f(w) over (0, inf).

#include <span>
#include <vector>

namespace bbdd {

/// Spectral density I(w) = (alpha/4) w^s exp(-w/wc) at temperature T.
struct BathSpec {
  double alpha = 0.25;
  double s = 1.0;
  double omega_c = 100.0;
  double temperature = 0.0;

  void validate() const;
  double spectral_density(double w) const;
  /// coth(w/2T), 1 at T = 0, two-term series for tiny arguments.
  double thermal_factor(double w) const;
};

struct QuadratureOptions {
  int max_level = 6;
  double target_rel = 1e-10;  // stop refining below this change
  double accept_rel = 1e-8;   // otherwise fail with QuadratureError
  double low_cut = 1e-6;      // times omega_c, start of the graded region
  double high_cut = 50.0;     // times omega_c
};

/// Composite 20-point Gauss-Legendre rule on [0, high_cut wc] with I coth
/// folded into the weights. Panels are graded geometrically from low_cut wc
/// up to the base width min(pi/horizon, wc/2), uniform above, and each is
/// split into 2^level pieces. The head [0, low_cut wc] uses the substitution
/// w = w_lo y^(1/s), which removes the w^(s-1) endpoint behaviour.
class SpectralQuadrature {
 public:
  SpectralQuadrature(const BathSpec& bath, double horizon, int level,
                     const QuadratureOptions& options = {});

  /// Doubles the level until the probe integrals settle.
  static SpectralQuadrature refined(const BathSpec& bath, double horizon,
                                    const QuadratureOptions& options = {});

  const BathSpec& bath() const noexcept { return bath_; }
  double horizon() const noexcept { return horizon_; }
  int level() const noexcept { return level_; }
  /// Relative change seen at the last refinement (0 if never refined).
  double achieved() const noexcept { return achieved_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  /// Quadrature weights times I(w) coth(w/2T).
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double y = weights_[i] * f(nodes_[i]) - carry;
      const double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
    return sum;
  }

 private:
  BathSpec bath_;
  double horizon_;
  int level_;
  double achieved_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// 4 (1 - cos w tau) / w^2, written as 8 sin^2(w tau/2) / w^2.
double free_filter(double w, double tau);

}  // namespace bbdd

#endif  // BBDD_SPECTRAL_QUADRATURE_HPP_
