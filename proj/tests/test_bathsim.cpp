#include <cmath>
#include <complex>
#include <vector>

#include "bbdd/bathsim.hpp"
#include "bbdd/errors.hpp"
#include "doctest.h"

using namespace bbdd;
using cd = std::complex<double>;

namespace {

BathSpec ohmic(double temperature) { return BathSpec{0.25, 1.0, 100.0, temperature}; }

ProtocolSpec spec(Protocol k, int m, double dt) { return ProtocolSpec{k, m, dt, 0.0, 0.5}; }

// 2 int I coth |sum_j chi_j int_{t_j}^{t_j+1} e^{iwu} du|^2 dw, trapezoid on a log grid.
double gamma_oracle(const BathSpec& bath, std::span<const double> t, std::span<const Sign> chi) {
  const double x0 = std::log(1e-16 * bath.omega_c);
  const double x1 = std::log(60.0 * bath.omega_c);
  const int n = 400000;
  const double h = (x1 - x0) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = std::exp(x0 + i * h);
    cd a = 0.0;
    for (std::size_t j = 0; j < chi.size(); ++j)
      a += static_cast<double>(chi[j]) * (std::polar(1.0, w * t[j + 1]) - std::polar(1.0, w * t[j]));
    const double coth = bath.temperature > 0.0 ? 1.0 / std::tanh(w / (2.0 * bath.temperature)) : 1.0;
    const double f = 2.0 * bath.spectral_density(w) * coth * std::norm(a) / (w * w) * w;
    sum += (i == 0 || i == n ? 0.5 : 1.0) * f;
  }
  return sum * h;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("free decay at zero temperature") {
  const auto bath = ohmic(0.0);
  for (double t : {0.001, 0.01, 0.1}) {
    CAPTURE(t);
    const double closed = 0.125 * std::log(1.0 + 1e4 * t * t);
    CHECK(rel(gamma_free(bath, t), closed) < 1e-8);
  }
  CHECK(gamma_free(bath, 0.3, 0.3) == 0.0);
}

TEST_CASE("free decay at finite temperature matches the log-grid oracle") {
  for (double temp : {1.0, 1e4}) {
    const auto bath = ohmic(temp);
    const std::vector<double> t{0.0, 0.01};
    const std::vector<Sign> chi{1};
    CHECK(rel(gamma_free(bath, 0.01), gamma_oracle(bath, t, chi)) < 1e-7);
  }
  // Sub-ohmic head.
  BathSpec sub{0.25, 0.5, 100.0, 1.0};
  const std::vector<double> t{0.0, 0.02};
  const std::vector<Sign> chi{1};
  CHECK(rel(gamma_free(sub, 0.02), gamma_oracle(sub, t, chi)) < 1e-6);
}

TEST_CASE("controlled exponents agree across formulas and with the oracle") {
  for (double temp : {1.0, 1e4}) {
    CAPTURE(temp);
    const auto bath = ohmic(temp);
    const int m = 8;
    const double dt = 0.002;
    const auto quad = quadrature_for(bath, m * dt);
    const auto a = deterministic_realization(spec(Protocol::kAsymmetric, m, dt));
    const double det = gamma_deterministic(quad, m, dt);
    CHECK(rel(gamma_random(quad, a), det) < 1e-9);
    CHECK(rel(det, gamma_oracle(bath, a.boundaries(), a.chi())) < 1e-6);

    const auto kernel = DecoherenceKernel::uniform(quad, m, dt);
    const auto dense = DecoherenceKernel::modulated(quad, a.boundaries(), CouplingModulation::constant(-1.0));
    for (const auto& r : sample_realizations(spec(Protocol::kRandom, m, dt), 5, 9)) {
      const double g = gamma_random(quad, r);
      CHECK(rel(kernel.gamma(r.chi()), g) < 1e-10);
      CHECK(rel(dense.gamma(r.chi()), g) < 1e-9);
      CHECK(rel(gamma_modulated(quad, r, CouplingModulation::constant()), g) < 1e-9);
      CHECK(rel(g, gamma_oracle(bath, r.boundaries(), r.chi())) < 1e-6);
    }
    CHECK(rel(kernel.trace(), m * gamma_free(quad, dt)) < 1e-10);
  }
}

TEST_CASE("random ensemble mean and Jensen bound") {
  const auto bath = ohmic(1e4);
  const int m = 10;
  const double dt = 0.001;
  const auto quad = quadrature_for(bath, m * dt);
  const auto ens = bath_ensemble(quad, spec(Protocol::kRandom, m, dt));
  CHECK(ens.exact);
  CHECK(ens.count == 1024);
  CHECK(ens.std_error == 0.0);
  const auto expected = expected_gamma_and_bound(bath, m, dt);
  CHECK(rel(ens.mean_gamma, expected.expected) < 1e-8);
  CHECK(ens.mean_exp_neg_gamma >= expected.bound);
  CHECK(rel(ens.lower_bound, expected.bound) < 1e-8);

  const auto sampled = bath_ensemble(quad, spec(Protocol::kRandom, m, dt), CouplingModulation::constant(),
                                     EnsembleMode::sample(4000, 3));
  CHECK_FALSE(sampled.exact);
  CHECK(sampled.std_error == doctest::Approx(sampled.stddev / std::sqrt(4000.0)));
  CHECK(std::abs(sampled.mean_exp_neg_gamma - ens.mean_exp_neg_gamma) < 4.0 * sampled.std_error);
}

TEST_CASE("small interval limits") {
  const auto bath = ohmic(1.0);
  const int m = 20;
  const double dt = 1e-5;
  const auto quad = quadrature_for(bath, m * dt);
  CHECK(rel(DecoherenceKernel::uniform(quad, m, dt).trace(),
            small_dt_limits(bath, m, dt, LimitRegime::kRandom)) < 1e-3);
  CHECK(rel(gamma_deterministic(quad, m, dt), small_dt_limits(bath, m, dt, LimitRegime::kDeterministic)) <
        1e-2);
}

TEST_CASE("finite mode sum converges to the continuum exponent") {
  const auto bath = ohmic(1.0);
  const int m = 6;
  const double dt = 0.003;
  const auto quad = quadrature_for(bath, m * dt);
  const auto modes = ModeSet::uniform(bath, 400000, 40.0 * bath.omega_c);
  for (const auto& r : sample_realizations(spec(Protocol::kRandom, m, dt), 3, 4))
    CHECK(rel(discrete_mode_gamma(modes, bath.temperature, r), gamma_random(quad, r)) < 1e-5);
}

TEST_CASE("frame ratios") {
  const auto bath = ohmic(1e4);
  const int m = 6;
  const double dt = 0.001;
  const auto quad = quadrature_for(bath, m * dt);
  const auto none = physical_frame_ratios(quad, spec(Protocol::kNone, m, dt), 300.0);
  const double decay = std::exp(-gamma_free(quad, m * dt));
  CHECK(none.f2 == doctest::Approx(decay).epsilon(1e-10));
  CHECK(none.f1 == doctest::Approx(std::cos(300.0 * m * dt) * decay).epsilon(1e-10));
  const auto a = physical_frame_ratios(quad, spec(Protocol::kAsymmetric, m, dt), 300.0);
  CHECK(a.f1 == doctest::Approx(a.f2).epsilon(1e-12));
  const auto r = physical_frame_ratios(quad, spec(Protocol::kRandom, m, dt), 0.0);
  CHECK(r.f1 == doctest::Approx(r.f2).epsilon(1e-12));
}

TEST_CASE("coupling modulation") {
  const auto f = CouplingModulation::floor_sign(10.0 / 3.0);
  CHECK(f.at(0.001, 100.0) == 1.0);
  CHECK(f.at(0.004, 100.0) == -1.0);
  // interval_response against a midpoint sum.
  for (const auto& g : {CouplingModulation::cos_sin(), f}) {
    const double a = 0.0012;
    const double b = 0.0071;
    const double w = 850.0;
    const int n = 2000000;
    cd sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = a + (i + 0.5) * (b - a) / n;
      sum += g.at(u, 100.0) * std::polar(1.0, w * u);
    }
    sum *= (b - a) / n;
    CHECK(std::abs(interval_response(g, 100.0, a, b, w) - sum) < 1e-8);
  }
}

TEST_CASE("bath validation") {
  CHECK_THROWS_AS((BathSpec{-0.1, 1.0, 100.0, 0.0}.validate()), InvalidSpec);
  CHECK_THROWS_AS((BathSpec{0.25, 0.0, 100.0, 0.0}.validate()), InvalidSpec);
  CHECK_THROWS_AS((BathSpec{0.25, 1.0, 0.0, 0.0}.validate()), InvalidSpec);
  CHECK_THROWS_AS((BathSpec{0.25, 1.0, 100.0, -1.0}.validate()), InvalidSpec);
  const auto quad = quadrature_for(ohmic(0.0), 0.01);
  CHECK_THROWS(gamma_deterministic(quad, 5, 0.001));
}
