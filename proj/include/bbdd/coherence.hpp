#ifndef BBDD_COHERENCE_HPP_
#define BBDD_COHERENCE_HPP_

#include <complex>
#include <cstdint>
#include <optional>

#include "bbdd/statkit.hpp"

namespace bbdd {

/// Ensemble coherence ratio rho01(t_M)/rho01(t_0) = exp(i phase) exp(-damping).
struct CoherenceResult {
  std::complex<double> ratio{1.0, 0.0};
  double phase = 0.0;    // principal value in (-pi, pi]
  double damping = 0.0;  // -ln|ratio|, +inf when ratio == 0
  std::int64_t ensemble_size = 0;
  std::optional<double> std_error;        // of the complex mean; absent when exact
  std::optional<double> abs_std_error;    // of |ratio|
  std::optional<double> phase_std_error;  // of arg(ratio)

  static CoherenceResult exact(std::complex<double> ratio, std::int64_t size);
  static CoherenceResult sampled(const RunningStats<std::complex<double>>& stats);
};

/// Principal argument mapped into (-pi, pi].
double principal_arg(std::complex<double> z);

/// Damping exponent -ln|z| with +inf for z == 0.
double damping_of(std::complex<double> z);

/// Weighted complex sum with Kahan compensation; mergeable for chunked_reduce.
class WeightedSum {
 public:
  void add(std::complex<double> value, double weight) {
    add_compensated(value * weight);
    weight_ += weight;
    ++count_;
  }
  void merge(const WeightedSum& other) {
    add_compensated(other.sum_);
    add_compensated(-other.carry_);
    weight_ += other.weight_;
    count_ += other.count_;
  }
  std::complex<double> sum() const { return sum_ - carry_; }
  double weight() const { return weight_; }
  std::int64_t count() const { return count_; }

 private:
  void add_compensated(std::complex<double> x) {
    const std::complex<double> y = x - carry_;
    const std::complex<double> t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  std::complex<double> sum_{};
  std::complex<double> carry_{};
  double weight_ = 0.0;
  std::int64_t count_ = 0;
};

/// How an R/H ensemble is averaged.
struct EnsembleMode {
  enum class Kind { kEnumerate, kSample };
  Kind kind = Kind::kEnumerate;
  std::size_t count = 1000;  // sample only
  std::uint64_t seed = 0;

  static EnsembleMode enumerate() { return {}; }
  static EnsembleMode sample(std::size_t count, std::uint64_t seed) {
    return {Kind::kSample, count, seed};
  }
};

}  // namespace bbdd

#endif  // BBDD_COHERENCE_HPP_
