// bbdd: run decoupling experiments from config files and regenerate figure
// curve sets as CSV.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bbdd/cli/config.hpp"
#include "bbdd/cli/csv.hpp"
#include "bbdd/cli/presets.hpp"
#include "bbdd/cli/runner.hpp"
#include "bbdd/errors.hpp"

namespace {

using namespace bbdd;
using namespace bbdd::cli;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::int64_t> seed;
  std::optional<int> workers;
  std::string out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--workers", f.workers, "Worker threads (0: all cores)")->check(CLI::Range(0, 1024));
  app->add_option("--out", f.out, "Output CSV path (default: stdout)");
  app->add_option("--set", f.sets, "Override a config key, key=value (repeatable)");
}

void emit(const Table& table, const std::string& path) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, table);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, table);
  if (!out) throw std::runtime_error("error while writing " + path);
}

KeyValues gather(const CommonFlags& f) {
  KeyValues kv = f.config_path.empty() ? KeyValues{} : KeyValues::load(f.config_path);
  for (const auto& s : f.sets) kv.set_assignment(s);
  if (f.seed) kv.set("seed", std::to_string(*f.seed));
  if (f.workers) kv.set("workers", std::to_string(*f.workers));
  if (!f.out.empty()) kv.set("out", f.out);
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bang-bang decoupling simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  bool want_plan = false;
  PlanRequest plan_request;
  std::vector<std::pair<Scenario, CLI::App*>> scenario_cmds;
  for (auto [scenario, help] : {std::pair{Scenario::kClosed, "Closed qubit under time-dependent drift"},
                                std::pair{Scenario::kRtn, "Qubit coupled to a random telegraph fluctuator"},
                                std::pair{Scenario::kBath, "Qubit coupled to a bosonic thermal bath"}}) {
    auto* cmd = app.add_subcommand(std::string(to_string(scenario)), help);
    cmd->add_option("--config", run_flags.config_path, "Key-value config file")->check(CLI::ExistingFile);
    add_common(cmd, run_flags);
    cmd->add_flag("--plan", want_plan, "Print the sample-size plan instead of running");
    cmd->add_option("--delta", plan_request.delta, "Plan margin of error");
    cmd->add_option("--epsilon", plan_request.epsilon, "Plan miss probability");
    cmd->add_option("--pilot", plan_request.pilot, "Plan pilot draws");
    scenario_cmds.emplace_back(scenario, cmd);
  }

  CommonFlags fig_flags;
  std::string figure_id;
  bool full = false;
  auto* figure = app.add_subcommand("figure", "Regenerate the curves of one figure preset");
  figure->add_option("id", figure_id, "Preset id, fig2 ... fig15")->required();
  figure->add_flag("--full", full, "Use the full ensemble sizes");
  add_common(figure, fig_flags);

  auto* list = app.add_subcommand("list", "List figure presets");

  double delta = 0.01;
  double epsilon = 0.05;
  std::optional<double> sigma;
  std::optional<double> omega0;
  std::optional<double> horizon;
  std::optional<double> dt;
  auto* plan_cmd = app.add_subcommand("plan", "Minimum sample size for a margin of error");
  plan_cmd->add_option("--delta", delta, "Margin of error");
  plan_cmd->add_option("--epsilon", epsilon, "Miss probability");
  plan_cmd->add_option("--sigma", sigma, "Spread of one realization");
  plan_cmd->add_option("--omega0", omega0, "Drift frequency, to estimate sigma");
  plan_cmd->add_option("--horizon", horizon, "Control horizon, to estimate sigma");
  plan_cmd->add_option("--dt", dt, "Pulse interval, to estimate sigma");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [scenario, cmd] : scenario_cmds) {
      if (!cmd->parsed()) continue;
      const auto config = parse_experiment(gather(run_flags), scenario);
      emit(want_plan ? plan(config, plan_request) : run(config), config.output);
      return 0;
    }
    if (figure->parsed()) {
      PresetOptions options;
      options.full = full;
      if (fig_flags.seed) {
        if (*fig_flags.seed < 0) throw ConfigError("seed", "must be >= 0");
        options.seed = static_cast<std::uint64_t>(*fig_flags.seed);
      }
      options.workers = fig_flags.workers.value_or(1);
      if (options.workers == 0) options.workers = std::max(1u, std::thread::hardware_concurrency());
      for (const auto& s : fig_flags.sets) options.overrides.set_assignment(s);
      emit(run_preset(find_preset(figure_id), options), fig_flags.out);
      return 0;
    }
    if (list->parsed()) {
      emit(list_presets(), "");
      return 0;
    }
    if (plan_cmd->parsed()) {
      double s = 0.0;
      std::string source = "given";
      if (sigma) {
        s = *sigma;
      } else if (omega0 && horizon && dt) {
        const auto est = sigma_estimate_drift(*omega0, *horizon, *dt);
        s = est.value;
        source = est.in_regime ? "estimate" : "estimate (outside omega0^2 t dt <= 0.1)";
      } else {
        throw ConfigError("sigma", "give --sigma or all of --omega0, --horizon, --dt");
      }
      const auto p = plan_samples(delta, epsilon, s);
      std::cout << "delta = " << format_real(delta) << "\nepsilon = " << format_real(epsilon)
                << "\nsigma = " << format_real(s) << " (" << source << ")\nz = " << format_real(p.z)
                << "\nK_min = " << p.min_samples << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "bbdd: config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bbdd: %s\n", e.what());
    return 1;
  }
  return 1;
}
