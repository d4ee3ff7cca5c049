#include "bbdd/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bbdd/errors.hpp"

namespace bbdd::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> notes_of(const ExperimentConfig& cfg) {
  std::vector<std::string> notes;
  for (const auto& [k, v] : cfg.settings) notes.push_back(k + " = " + v);
  return notes;
}

Cell protocol_cell(Protocol p) { return std::string(to_string(p)); }

Table run_closed(const ExperimentConfig& cfg) {
  Table t;
  t.columns = {{"protocol", "-"}, {"M", "count"},    {"dt", "time"},     {"phase", "rad"},
               {"gamma", "1"},    {"ratio_re", "1"}, {"ratio_im", "1"}, {"stderr", "1"}};
  for (auto p : cfg.protocols) {
    for (const auto& pt : cfg.points) {
      const auto spec = cfg.protocol_spec(p, pt);
      const auto res = ensemble_coherence_logical(spec, cfg.drift, cfg.ensemble_mode(), cfg.workers);
      // A single realization keeps its unwrapped phase.
      const double phase = is_randomized(p)
                               ? -res.phase
                               : realization_phase(deterministic_realization(spec), cfg.drift);
      t.add_row({protocol_cell(p), std::int64_t{pt.intervals}, pt.dt, phase, res.damping,
                 res.ratio.real(), res.ratio.imag(), res.std_error.value_or(0.0)});
    }
  }
  return t;
}

RtnEnsembleOptions rtn_options(const ExperimentConfig& cfg) {
  RtnEnsembleOptions o;
  o.trajectories = cfg.rtn.trajectories;
  o.pulses = cfg.averaging == Averaging::kSample ? PulseAveraging::sample(cfg.rtn.pulse_samples)
                                                 : PulseAveraging::enumerate();
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  o.frame = cfg.rtn.frame;
  o.omega0 = cfg.rtn.omega0;
  return o;
}

Table run_rtn(const ExperimentConfig& cfg) {
  Table t;
  t.columns = {{"protocol", "-"},   {"g", "1"},       {"gamma", "1/time"},   {"M", "count"},
               {"dt", "time"},      {"absF", "1"},    {"argF", "rad"},       {"stderr_abs", "1"},
               {"stderr_arg", "rad"}};
  const auto options = rtn_options(cfg);
  for (double g : cfg.rtn.g) {
    const auto params = RtnParams::symmetric(g * cfg.rtn.gamma, cfg.rtn.gamma, cfg.rtn.initial_sign);
    for (auto p : cfg.protocols) {
      for (const auto& pt : cfg.points) {
        const auto spec = cfg.protocol_spec(p, pt);
        if (cfg.averaging == Averaging::kAnalytic) {
          const auto z = analytic_Z(params, spec.horizon(), spec.t0);
          t.add_row({protocol_cell(p), g, cfg.rtn.gamma, std::int64_t{pt.intervals}, pt.dt,
                     std::abs(z), principal_arg(z), 0.0, 0.0});
          continue;
        }
        const auto res = ensemble_F(spec, params, cfg.rtn.disturbance, options);
        t.add_row({protocol_cell(p), g, cfg.rtn.gamma, std::int64_t{pt.intervals}, pt.dt,
                   std::abs(res.ratio), res.phase, res.abs_std_error.value_or(0.0),
                   res.phase_std_error.value_or(0.0)});
      }
    }
  }
  return t;
}

BathSpec bath_at(const ExperimentConfig& cfg, double temperature) {
  BathSpec b;
  b.alpha = cfg.bath.alpha;
  b.s = cfg.bath.s;
  b.omega_c = cfg.bath.omega_c;
  b.temperature = temperature;
  return b;
}

double longest_horizon(const ExperimentConfig& cfg) {
  double h = 0.0;
  for (const auto& pt : cfg.points) h = std::max(h, pt.intervals * pt.dt);
  return h;
}

Table run_bath(const ExperimentConfig& cfg) {
  Table t;
  const bool frames = cfg.bath.report == BathReport::kFrames;
  if (frames) {
    t.columns = {{"protocol", "-"}, {"M", "count"},   {"dt", "time"}, {"T", "energy"},
                 {"omega0_dt", "rad"}, {"F1", "1"}, {"F2", "1"}};
  } else {
    t.columns = {{"protocol", "-"},
                 {"M", "count"},
                 {"dt", "time"},
                 {"T", "energy"},
                 {"s", "1"},
                 {"alpha", "1"},
                 {"omega_c", "1/time"},
                 {"mean_exp_neg_gamma", "1"},
                 {"stderr", "1"},
                 {"lower_bound", "1"},
                 {"stddev", "1"}};
  }
  const double horizon = longest_horizon(cfg);
  for (double temperature : cfg.bath.temperature) {
    const auto quad = quadrature_for(bath_at(cfg, temperature), horizon);
    if (frames) {
      for (double w0dt : cfg.bath.omega0_dt) {
        for (auto p : cfg.protocols) {
          for (const auto& pt : cfg.points) {
            const auto r = physical_frame_ratios(quad, cfg.protocol_spec(p, pt), w0dt / pt.dt,
                                                 cfg.ensemble_mode());
            t.add_row({protocol_cell(p), std::int64_t{pt.intervals}, pt.dt, temperature, w0dt, r.f1, r.f2});
          }
        }
      }
      continue;
    }
    for (auto p : cfg.protocols) {
      for (const auto& pt : cfg.points) {
        const auto r = bath_ensemble(quad, cfg.protocol_spec(p, pt), cfg.bath.coupling,
                                     cfg.ensemble_mode(), cfg.workers);
        t.add_row({protocol_cell(p), std::int64_t{pt.intervals}, pt.dt, temperature, cfg.bath.s,
                   cfg.bath.alpha, cfg.bath.omega_c, r.mean_exp_neg_gamma, r.std_error,
                   r.lower_bound, r.stddev});
      }
    }
  }
  return t;
}

}  // namespace

Table run(const ExperimentConfig& config) {
  Table t;
  switch (config.scenario) {
    case Scenario::kClosed:
      t = run_closed(config);
      break;
    case Scenario::kRtn:
      t = run_rtn(config);
      break;
    case Scenario::kBath:
      t = run_bath(config);
      break;
  }
  t.notes = notes_of(config);
  return t;
}

Table plan(const ExperimentConfig& config, const PlanRequest& request) {
  if (request.pilot < 2) throw ConfigError("pilot", "needs at least 2 pilot draws");
  required_samples(request.delta, request.epsilon, 0.0);  // throws on bad delta or epsilon
  Table t;
  t.columns = {{"protocol", "-"},      {"M", "count"},       {"dt", "time"},
               {"sigma_estimate", "1"}, {"in_regime", "-"}, {"sigma_pilot", "1"},
               {"K_min", "count"}};
  const bool rtn = config.scenario == Scenario::kRtn;
  const bool bath = config.scenario == Scenario::kBath;
  if (rtn) t.columns.insert(t.columns.begin() + 1, Column{"g", "1"});
  if (bath) t.columns.insert(t.columns.begin() + 1, Column{"T", "energy"});

  const std::vector<double> outer = rtn ? config.rtn.g : bath ? config.bath.temperature : std::vector<double>{kNaN};
  const double horizon = longest_horizon(config);
  for (double x : outer) {
    std::optional<SpectralQuadrature> quad;
    if (bath) quad.emplace(quadrature_for(bath_at(config, x), horizon));
    for (auto p : config.protocols) {
      if (!is_randomized(p)) continue;
      for (const auto& pt : config.points) {
        const auto spec = config.protocol_spec(p, pt);
        Cell sigma_formula = std::string();  // only known for constant drift
        std::string regime = "-";
        double sigma = 0.0;
        if (config.scenario == Scenario::kClosed) {
          if (config.drift.g.kind == Modulation::Kind::kNone &&
              config.drift.d.kind == SignSchedule::Kind::kOne) {
            const auto est = sigma_estimate_drift(config.drift.omega0, pt.intervals * pt.dt, pt.dt);
            sigma_formula = est.value;
            regime = est.in_regime ? "yes" : "no";
          }
          const auto res = ensemble_coherence_logical(
              spec, config.drift, EnsembleMode::sample(request.pilot, config.seed), config.workers);
          sigma = res.std_error.value_or(0.0) * std::sqrt(static_cast<double>(res.ensemble_size));
        } else if (rtn) {
          auto options = rtn_options(config);
          options.trajectories = request.pilot;
          const auto params = RtnParams::symmetric(x * config.rtn.gamma, config.rtn.gamma,
                                                   config.rtn.initial_sign);
          const auto res = ensemble_F(spec, params, config.rtn.disturbance, options);
          sigma = res.std_error.value_or(0.0) * std::sqrt(static_cast<double>(res.ensemble_size));
        } else {
          const auto res = bath_ensemble(*quad, spec, config.bath.coupling,
                                         EnsembleMode::sample(request.pilot, config.seed), config.workers);
          sigma = res.stddev;
        }
        std::vector<Cell> row{protocol_cell(p), std::int64_t{pt.intervals}, pt.dt, sigma_formula,
                              regime, sigma,
                              std::int64_t{required_samples(request.delta, request.epsilon, sigma)}};
        if (rtn || bath) row.insert(row.begin() + 1, x);
        t.add_row(std::move(row));
      }
    }
  }
  t.notes = notes_of(config);
  t.notes.push_back("delta = " + format_real(request.delta));
  t.notes.push_back("epsilon = " + format_real(request.epsilon));
  t.notes.push_back("pilot = " + std::to_string(request.pilot));
  return t;
}

}  // namespace bbdd::cli
