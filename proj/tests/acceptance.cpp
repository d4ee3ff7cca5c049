// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bbdd/bathsim.hpp"
#include "bbdd/driftsim.hpp"
#include "bbdd/pulsekit.hpp"
#include "bbdd/rtnsim.hpp"
#include "bbdd/statkit.hpp"

using namespace bbdd;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. Enumerated R coherence equals cos(w0 dt)^M.
Outcome closed_form_equivalence() {
  double worst = 0.0;
  for (int m = 1; m <= 16; ++m) {
    for (int k = 0; k <= 31; ++k) {
      const double x = 0.1 * k;
      ProtocolSpec spec{Protocol::kRandom, m, 1.0};
      DriftSpec drift;
      drift.omega0 = x;
      const auto res = ensemble_coherence_logical(spec, drift);
      worst = std::max(worst, std::abs(res.ratio - cd(std::pow(std::cos(x), m), 0.0)));
    }
  }
  return {worst <= 1e-12, fmt("max |ratio - cos^M| = %.3g over M<=16, 32 angles", worst)};
}

// 2. Every H realization refocuses constant drift exactly.
Outcome h_optimality() {
  long nonzero = 0;
  long total = 0;
  bool gamma_zero = true;
  for (int m = 2; m <= 16; m += 2) {
    for (double w : {0.3, 1.0, 2.7}) {
      ProtocolSpec spec{Protocol::kHybrid, m, 0.37};
      DriftSpec drift;
      drift.omega0 = w;
      RealizationEnumerator en(spec);
      while (auto wr = en.next()) {
        ++total;
        if (realization_phase(wr->realization, drift) != 0.0) ++nonzero;
      }
      const auto res = ensemble_coherence_logical(spec, drift);
      gamma_zero = gamma_zero && res.damping == 0.0 && res.ratio == cd(1.0, 0.0);
    }
  }
  return {nonzero == 0 && gamma_zero,
          fmt("%ld of %ld realizations with nonzero phase, ensemble damping exactly 0: %s", nonzero,
              total, gamma_zero ? "yes" : "no")};
}

// 3. Two-pulse cycle in both carrier conventions.
Outcome appendix_refocusing() {
  double worst = 0.0;
  for (double w : {0.0, 0.5, 1.0, 2.3, 7.0}) {
    for (double t0 : {0.0, 0.4, -1.2}) {
      for (double step : {1.0, 0.25, 3.5}) {
        const double t1 = t0 + step;
        const double t2 = t1 + step;
        Eigen::Matrix2cd expect_ii = Eigen::Matrix2cd::Zero();
        expect_ii(0, 0) = -std::exp(cd(0.0, -w * (t2 - t1)));
        expect_ii(1, 1) = -std::exp(cd(0.0, w * (t2 - t1)));
        const auto ui = two_pulse_cycle_propagator(PulseConvention::kIdenticalPhysical, w, t0, t1, t2);
        const auto uii = two_pulse_cycle_propagator(PulseConvention::kFixedPhase, w, t0, t1, t2);
        worst = std::max(worst, projective_distance(ui, Eigen::Matrix2cd::Identity()));
        worst = std::max(worst, projective_distance(uii, expect_ii));
      }
    }
  }
  return {worst <= 1e-12, fmt("max projective distance %.3g", worst)};
}

// 4. Monte Carlo |Z(t)| against the analytic decay.
Outcome rtn_benchmark() {
  std::vector<double> times;
  for (int i = 1; i <= 50; ++i) times.push_back(10.0 * i / 50.0);
  int misses = 0;
  double worst = 0.0;
  std::string where;
  for (double g : {0.1, 0.8, 1.1, 2.0, 3.0, 5.0}) {
    const auto params = RtnParams::symmetric(g, 1.0);
    const auto mc = monte_carlo_Z(params, 0.0, times, 100000, 20240611);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double exact = std::abs(analytic_Z(params, times[i], 0.0));
      const double z = std::abs(mc[i].ratio);
      const double se = std::max(*mc[i].abs_std_error, 1e-300);
      const double dev = std::abs(z - exact) / se;
      if (dev > worst) {
        worst = dev;
        where = fmt("g=%.1f t=%.1f", g, times[i]);
      }
      if (dev > 3.0) ++misses;
    }
  }
  return {misses == 0, fmt("%d of 300 points beyond 3 SE, largest %.2f SE at %s", misses, worst, where.c_str())};
}

struct Gap {
  int fails = 0;
  int ties = 0;
  int resolved = 0;
};

void compare(double hi, double se_hi, double lo, double se_lo, Gap& gap) {
  const double comb = 3.0 * std::hypot(se_hi, se_lo);
  if (hi - lo < -comb) {
    ++gap.fails;
  } else if (std::abs(hi - lo) <= comb) {
    ++gap.ties;
  } else {
    ++gap.resolved;
  }
}

// 5. |F_A| >= |F_H| >= |F_R| >= |F_none| under RTN, g = 1.1, t_f = 10/gamma.
Outcome rtn_ordering() {
  const auto params = RtnParams::symmetric(1.1, 1.0);
  RtnEnsembleOptions opt;
  opt.trajectories = 10000;
  opt.seed = 77;
  Gap gap;
  std::string table;
  for (int m = 2; m <= 14; m += 2) {
    const double dt = 10.0 / m;
    double f[4], se[4];
    const Protocol order[4] = {Protocol::kAsymmetric, Protocol::kHybrid, Protocol::kRandom, Protocol::kNone};
    for (int p = 0; p < 4; ++p) {
      const auto r = ensemble_F(ProtocolSpec{order[p], m, dt}, params, DisturbanceSpec::none(), opt);
      f[p] = std::abs(r.ratio);
      se[p] = *r.abs_std_error;
    }
    for (int p = 0; p < 3; ++p) compare(f[p], se[p], f[p + 1], se[p + 1], gap);
    table += fmt(" M=%d:%.3f/%.3f/%.3f/%.3f", m, f[0], f[1], f[2], f[3]);
  }
  return {gap.fails == 0, fmt("%d reversed, %d ties, %d resolved;%s", gap.fails, gap.ties,
                              gap.resolved, table.c_str())};
}

// 6. Burst recoil of the A protocol at dt = 5/(4 gamma).
Outcome burst_recoil() {
  const auto params = RtnParams::symmetric(1.1, 1.0);
  const auto burst = DisturbanceSpec::burst(1.0);
  RtnEnsembleOptions opt;
  opt.trajectories = 10000;
  opt.seed = 88;
  std::vector<int> grid;
  for (int m = 2; m <= 20; m += 2) grid.push_back(m);
  std::vector<double> fa, fr, ser;
  for (int m : grid) {
    const double dt = 10.0 / m;
    fa.push_back(std::abs(ensemble_F({Protocol::kAsymmetric, m, dt}, params, burst, opt).ratio));
    const auto r = ensemble_F({Protocol::kRandom, m, dt}, params, burst, opt);
    fr.push_back(std::abs(r.ratio));
    ser.push_back(*r.abs_std_error);
  }
  const std::size_t at8 = 3;  // M = 8
  const bool recoil = fa[at8] < fa[at8 - 1] && fa[at8] < fa[at8 + 1];
  int drops = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (fr[i] < fr[i - 1] - 3.0 * std::hypot(ser[i], ser[i - 1])) ++drops;
  }
  std::string rs;
  for (std::size_t i = 0; i < grid.size(); ++i) rs += fmt(" %.4f(%.4f)", fr[i], ser[i]);
  return {recoil && drops == 0,
          fmt("A at M=6,8,10: %.4f %.4f %.4f; R drops beyond 3 SE: %d; R:%s", fa[at8 - 1], fa[at8],
              fa[at8 + 1], drops, rs.c_str())};
}

BathSpec bath(double temperature) { return BathSpec{0.25, 1.0, 100.0, temperature}; }

// 7. Gamma_R at chi = (-1)^j equals Gamma_D.
Outcome cross_formula() {
  double worst = 0.0;
  for (double temperature : {1e4, 1.0}) {
    for (int m : {2, 4, 8, 16}) {
      for (double x : {0.05, 0.1, 0.5}) {
        const double dt = x / 100.0;
        const auto a = deterministic_realization({Protocol::kAsymmetric, m, dt});
        const double gr = gamma_random(bath(temperature), a);
        const double gd = gamma_deterministic(bath(temperature), m, dt);
        worst = std::max(worst, std::abs(gr - gd) / gd);
      }
    }
  }
  return {worst <= 1e-6, fmt("max relative difference %.3g", worst)};
}

// 8. Mean identity and Jensen bound over the full R ensemble.
Outcome jensen() {
  double worst = 0.0;
  int violations = 0;
  int points = 0;
  for (double temperature : {1e4, 1.0}) {
    for (double x : {0.1, 0.5, 2.5}) {
      for (int m = 1; m <= 12; ++m) {
        const double dt = x / 100.0;
        const auto quad = quadrature_for(bath(temperature), m * dt);
        const auto kernel = DecoherenceKernel::uniform(quad, m, dt);
        RealizationEnumerator en({Protocol::kRandom, m, dt});
        double mean_gamma = 0.0;
        double mean_decay = 0.0;
        while (auto wr = en.next()) {
          const double g = kernel.gamma(wr->realization.chi());
          mean_gamma += wr->weight * g;
          mean_decay += wr->weight * std::exp(-g);
        }
        const double expected = m * gamma_free(bath(temperature), dt);
        worst = std::max(worst, std::abs(mean_gamma - expected) / expected);
        if (mean_decay < std::exp(-mean_gamma)) ++violations;
        ++points;
      }
    }
  }
  return {worst <= 1e-9 && violations == 0,
          fmt("max relative mean error %.3g, Jensen violations %d of %d", worst, violations, points)};
}

// Mode-sum Gamma of a modulated coupling with a midpoint time rule.
double mode_sum_modulated(const ModeSet& modes, double temperature, const ControlRealization& r,
                          const CouplingModulation& f, double omega_c, int steps) {
  BathSpec thermal;
  thermal.temperature = temperature;
  const auto b = r.boundaries();
  double total = 0.0;
  for (std::size_t k = 0; k < modes.omega.size(); ++k) {
    const double w = modes.omega[k];
    cd resp = 0.0;
    for (int j = 0; j < r.intervals(); ++j) {
      const double h = (b[j + 1] - b[j]) / steps;
      cd seg = 0.0;
      for (int i = 0; i < steps; ++i) {
        const double u = b[j] + (i + 0.5) * h;
        seg += f.at(u, omega_c) * std::polar(1.0, w * u);
      }
      resp += static_cast<double>(r.chi()[j]) * seg * h;
    }
    total += 2.0 * modes.coupling[k] * modes.coupling[k] * std::norm(resp) * thermal.thermal_factor(w);
  }
  return total;
}

// 9. Quadrature against the Ohmic closed form and a 2e4-mode sum.
Outcome quadrature_oracle() {
  double closed = 0.0;
  for (double t : {1e-3, 0.01, 0.05, 0.3, 2.0}) {
    const double ref = 0.5 * 0.25 * std::log1p(1e4 * t * t);
    closed = std::max(closed, std::abs(gamma_free(bath(0.0), t) - ref) / ref);
  }
  double modes_worst = 0.0;
  std::string where;
  auto track = [&](double a, double b, const std::string& what) {
    const double rel = std::abs(a - b) / std::abs(b);
    if (rel > modes_worst) {
      modes_worst = rel;
      where = what;
    }
  };
  Rng rng(5);
  for (double temperature : {1e4, 1.0, 0.0}) {
    const auto spec = bath(temperature);
    const auto modes = ModeSet::uniform(spec, 20000, 50.0 * spec.omega_c);
    const std::string tag = fmt("T=%g", temperature);
    for (double x : {0.5, 5.0}) {
      const double tau = x / 100.0;
      const auto one = ControlRealization::uniform(0.0, tau, {0, 0});
      track(gamma_free(spec, tau), discrete_mode_gamma(modes, temperature, one), "free " + tag);
    }
    const double dt = 0.5 / 100.0;
    track(gamma_deterministic(spec, 8, dt),
          discrete_mode_gamma(modes, temperature, deterministic_realization({Protocol::kAsymmetric, 8, dt})),
          "deterministic " + tag);
    const auto r = sample_realization({Protocol::kRandom, 8, dt}, rng);
    track(gamma_random(spec, r), discrete_mode_gamma(modes, temperature, r), "random " + tag);
    const auto e = expected_gamma_and_bound(spec, 8, dt);
    track(e.expected, 8 * discrete_mode_gamma(modes, temperature, ControlRealization::uniform(0.0, dt, {0, 0})),
          "expected " + tag);
    for (const auto& f : {CouplingModulation::floor_sign(), CouplingModulation::cos_sin()}) {
      track(gamma_modulated(spec, r, f), mode_sum_modulated(modes, temperature, r, f, spec.omega_c, 400),
            "modulated " + tag);
    }
  }
  return {closed <= 1e-6 && modes_worst <= 0.01,
          fmt("closed form max rel %.3g; mode sum max rel %.3g (%s)", closed, modes_worst, where.c_str())};
}

// 10. Acceleration at low T and wide spacing; A beats the Jensen bound at high T.
Outcome acceleration() {
  int accel_miss = 0;
  int bound_miss = 0;
  double min_ratio = 1e300;
  for (int m = 2; m <= 20; m += 2) {
    const double dt = 2.5 / 100.0;
    const double gd = gamma_deterministic(bath(1.0), m, dt);
    const double gf = gamma_free(bath(1.0), m * dt);
    min_ratio = std::min(min_ratio, gd / gf);
    if (!(gd > gf)) ++accel_miss;
    const double dt_fast = 0.1 / 100.0;
    const double gd_fast = gamma_deterministic(bath(1e4), m, dt_fast);
    const double bound = expected_gamma_and_bound(bath(1e4), m, dt_fast).expected;
    if (gd_fast > bound) ++bound_miss;
  }
  return {accel_miss == 0 && bound_miss == 0,
          fmt("low T: min Gamma_D/Gamma_free %.3f (%d misses); high T: %d points above the bound",
              min_ratio, accel_miss, bound_miss)};
}

// 11. Log-log slopes at fixed horizon.
Outcome scaling() {
  std::string text;
  bool ok = true;
  for (double temperature : {1.0, 1e4}) {
    std::vector<double> lx, le, ld;
    const double horizon = 1.6 / 100.0;
    for (int m = 8; m <= 128; m *= 2) {
      const double dt = horizon / m;
      lx.push_back(std::log(dt));
      le.push_back(std::log(expected_gamma_and_bound(bath(temperature), m, dt).expected));
      ld.push_back(std::log(gamma_deterministic(bath(temperature), m, dt)));
    }
    const double sr = slope_fit(lx, le);
    const double sd = slope_fit(lx, ld);
    ok = ok && std::abs(sr - 1.0) <= 0.05 && std::abs(sd - 2.0) <= 0.05;
    text += fmt(" T=%g: random %.3f, deterministic %.3f;", temperature, sr, sd);
  }
  return {ok, "slopes for wc dt in [0.0125, 0.2]:" + text};
}

// 12. Frame interference for the R protocol at low T.
Outcome frame_interference() {
  const double dt = 1e-3;
  const int m = 16;
  const ProtocolSpec spec{Protocol::kRandom, m, dt};
  const auto quad = quadrature_for(bath(1.0), m * dt);
  const auto bad = physical_frame_ratios(quad, spec, std::numbers::pi / 2.0 / dt);
  const auto good = physical_frame_ratios(quad, spec, 1e-3 / dt);
  const double rel = std::abs(good.f1 - good.f2) / good.f2;
  return {bad.f1 < 0.5 * bad.f2 && rel <= 0.01,
          fmt("w0 dt = pi/2: F1 = %.3g, F2 = %.4f; w0 dt = 1e-3: |F1-F2|/F2 = %.3g", bad.f1, bad.f2, rel)};
}

// 13. Planned sample size hits the exact value within delta.
Outcome planned_sampling() {
  const int m = 16;
  const double x = 0.3;
  const ProtocolSpec spec{Protocol::kRandom, m, 1.0};
  DriftSpec drift;
  drift.omega0 = x;
  const double exact = std::pow(std::cos(x), m);
  const auto pilot = ensemble_coherence_logical(spec, drift, EnsembleMode::sample(2000, 1));
  const double sigma = *pilot.std_error * std::sqrt(2000.0);
  const double delta = 0.01;
  const auto k = required_samples(delta, 0.05, sigma);
  int hits = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto res = ensemble_coherence_logical(spec, drift,
                                                EnsembleMode::sample(static_cast<std::size_t>(k), derive_seed(99, rep)));
    if (std::abs(res.ratio - exact) <= delta) ++hits;
  }
  return {hits >= 186, fmt("sigma_hat %.4f, K = %lld, %d of 200 within delta", sigma,
                           static_cast<long long>(k), hits)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form equivalence", closed_form_equivalence},
      {"H optimality", h_optimality},
      {"two-pulse refocusing", appendix_refocusing},
      {"RTN analytic benchmark", rtn_benchmark},
      {"protocol ordering under RTN", rtn_ordering},
      {"burst recoil", burst_recoil},
      {"bosonic cross-formula identity", cross_formula},
      {"Jensen bound and mean identity", jensen},
      {"quadrature oracle", quadrature_oracle},
      {"decoherence acceleration", acceleration},
      {"scaling laws", scaling},
      {"physical-frame interference", frame_interference},
      {"planned sampling", planned_sampling},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
