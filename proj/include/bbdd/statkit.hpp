#ifndef BBDD_STATKIT_HPP_
#define BBDD_STATKIT_HPP_

// Ensemble statistics shared by every Monte Carlo module: mergeable streaming
// moments, sample-size planning and the seeded RNG contract.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace bbdd {

namespace detail {
template <typename T>
struct StatsTraits {
  static_assert(std::is_floating_point_v<T>, "RunningStats needs a real or complex scalar");
  static constexpr int dim = 1;
  static Eigen::Matrix<T, 1, 1> to_vec(T x) { return Eigen::Matrix<T, 1, 1>(x); }
  static T from_vec(const Eigen::Matrix<T, 1, 1>& v) { return v(0); }
};
template <typename T>
struct StatsTraits<std::complex<T>> {
  static constexpr int dim = 2;
  static Eigen::Matrix<T, 2, 1> to_vec(const std::complex<T>& z) {
    return Eigen::Matrix<T, 2, 1>(z.real(), z.imag());
  }
  static std::complex<T> from_vec(const Eigen::Matrix<T, 2, 1>& v) { return {v(0), v(1)}; }
};
template <typename T>
struct RealOf {
  using type = T;
};
template <typename T>
struct RealOf<std::complex<T>> {
  using type = T;
};
}  // namespace detail

/// Streaming mean and (co)variance, Welford update with Kahan-compensated
/// mean, Chan merge. For complex samples the 2x2 covariance of (Re, Im) is
/// tracked so that errors along any direction of the complex plane can be
/// reported.
template <typename T>
class RunningStats {
  using Traits = detail::StatsTraits<T>;
  using Real = typename detail::RealOf<T>::type;
  static constexpr int kDim = Traits::dim;

 public:
  using Vector = Eigen::Matrix<Real, kDim, 1>;
  using Matrix = Eigen::Matrix<Real, kDim, kDim>;

  RunningStats() = default;

  void push(const T& x) {
    const Vector v = Traits::to_vec(x);
    ++count_;
    const Vector delta = v - mean_;
    // Compensated mean += delta / n.
    const Vector y = delta / static_cast<Real>(count_) - carry_;
    const Vector t = mean_ + y;
    carry_ = (t - mean_) - y;
    mean_ = t;
    m2_.noalias() += delta * (v - mean_).transpose();
  }

  void merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const Real na = static_cast<Real>(count_);
    const Real nb = static_cast<Real>(other.count_);
    const Real n = na + nb;
    const Vector delta = other.mean_ - mean_;
    mean_ += delta * (nb / n);
    carry_.setZero();
    m2_ += other.m2_ + delta * delta.transpose() * (na * nb / n);
    count_ += other.count_;
  }

  std::int64_t count() const noexcept { return count_; }
  T mean() const { return Traits::from_vec(mean_); }

  /// Sample covariance (n-1 normalisation); zero for fewer than two samples.
  Matrix covariance() const {
    if (count_ < 2) return Matrix::Zero();
    Matrix c = m2_ / static_cast<Real>(count_ - 1);
    return (c + c.transpose()) / Real(2);
  }

  /// Total variance E|x - mean|^2 (trace of the covariance).
  Real variance() const { return std::max(Real(0), covariance().trace()); }
  Real stddev() const { return std::sqrt(variance()); }
  Real std_error() const {
    return count_ > 0 ? std::sqrt(variance() / static_cast<Real>(count_)) : Real(0);
  }

  /// Standard error of the projection of the mean onto a unit direction.
  Real std_error_along(const Vector& direction) const {
    if (count_ == 0) return Real(0);
    const Real var = direction.dot(covariance() * direction);
    return std::sqrt(std::max(Real(0), var) / static_cast<Real>(count_));
  }

 private:
  std::int64_t count_ = 0;
  Vector mean_ = Vector::Zero();
  Vector carry_ = Vector::Zero();
  Matrix m2_ = Matrix::Zero();
};

/// Standard errors of |m| and arg(m) for a complex mean, by the delta method.
struct PolarErrors {
  double abs = 0.0;
  double arg = 0.0;
};
PolarErrors polar_errors(const RunningStats<std::complex<double>>& stats);

// ---------------------------------------------------------------------------
// Sample-size planning

/// Upper-tail standard normal quantile z_p with P(Z > z_p) = p.
double normal_upper_quantile(double p);

/// Inverse of the standard normal CDF. Rational approximation refined by one
/// Halley step against std::erfc.
double normal_quantile(double p);

struct SampleSizePlan {
  double margin = 0.0;      // delta
  double confidence = 0.0;  // epsilon, the allowed miss probability
  double sigma = 0.0;
  double z = 0.0;
  std::int64_t min_samples = 1;
};

/// K_min = ceil((z_{eps/2} sigma / delta)^2), never below 1.
SampleSizePlan plan_samples(double delta, double epsilon, double sigma_est);
std::int64_t required_samples(double delta, double epsilon, double sigma_est);

struct SigmaEstimate {
  double value = 0.0;
  bool in_regime = true;  // omega0^2 t dt <= 0.1
};

/// Order-of-magnitude spread of single-realization coherence under the R
/// protocol: omega0 * sqrt(t * dt).
SigmaEstimate sigma_estimate_drift(double omega0, double t_horizon, double dt);

// ---------------------------------------------------------------------------
// RNG contract

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of stream `stream` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

// ---------------------------------------------------------------------------
// Deterministic parallel reduction

/// Splits [0, n) into fixed chunks, reduces each with `fn(begin, end)` on a
/// pool of `workers` threads and merges chunk results in index order. The
/// result does not depend on the worker count.
template <typename Acc, typename Fn>
Acc chunked_reduce(std::size_t n, std::size_t chunk, unsigned workers, Fn&& fn) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<Acc> parts(n_chunks);
  auto work = [&](std::atomic<std::size_t>& next) {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      const std::size_t begin = c * chunk;
      parts[c] = fn(begin, std::min(n, begin + chunk));
    }
  };
  std::atomic<std::size_t> next{0};
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
  if (workers <= 1) {
    work(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back([&] { work(next); });
    for (auto& t : pool) t.join();
  }
  Acc total{};
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace bbdd

#endif  // BBDD_STATKIT_HPP_
