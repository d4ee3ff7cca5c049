#ifndef BBDD_CLI_CONFIG_HPP_
#define BBDD_CLI_CONFIG_HPP_

// Experiment descriptions: a flat "key = value" text format (docs/config.md)
// and its typed form for the three scenarios.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbdd/bathsim.hpp"
#include "bbdd/driftsim.hpp"
#include "bbdd/rtnsim.hpp"

namespace bbdd::cli {

/// Parsed key-value text. Later set() calls override earlier values, but a
/// key may appear only once within one parsed text.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::string& path);

  /// Override from "key=value" (command line --set).
  void set_assignment(std::string_view assignment);
  void set(const std::string& key, std::string value);
  void merge(const KeyValues& overrides);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, std::string fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  /// Comma-separated numbers; an item "a:step:b" expands to a, a+step, ... <= b.
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;

  /// ConfigError naming the first key outside `known`.
  void require_known(const std::vector<std::string_view>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

enum class Scenario { kClosed, kRtn, kBath };
std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

enum class SweepAxis { kIntervals, kStep, kTime };

enum class Averaging { kEnumerate, kSample, kAnalytic };

struct SweepPoint {
  int intervals = 1;
  double dt = 1.0;
};

struct RtnBlock {
  std::vector<double> g{1.1};
  double gamma = 1.0;
  int initial_sign = 1;
  std::size_t trajectories = 10000;
  std::size_t pulse_samples = 1000;  // sample mode only
  RtnFrame frame = RtnFrame::kLogicalIP;
  double omega0 = 0.0;
  DisturbanceSpec disturbance;
};

enum class BathReport { kEnsemble, kFrames };

struct BathBlock {
  double alpha = 0.25;
  double s = 1.0;
  double omega_c = 100.0;
  std::vector<double> temperature{1.0};
  CouplingModulation coupling;
  BathReport report = BathReport::kEnsemble;
  std::vector<double> omega0_dt;  // frames only
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kClosed;
  std::vector<Protocol> protocols{Protocol::kRandom};
  double t0 = 0.0;
  double flip_probability = 0.5;
  SweepAxis axis = SweepAxis::kIntervals;
  std::vector<SweepPoint> points;
  Averaging averaging = Averaging::kEnumerate;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output;  // empty: stdout

  DriftSpec drift;
  RtnBlock rtn;
  BathBlock bath;

  /// Source keys that shape the result (not workers or out), echoed into CSV.
  std::map<std::string, std::string> settings;

  ProtocolSpec protocol_spec(Protocol p, const SweepPoint& point) const;
  EnsembleMode ensemble_mode() const;
};

/// Typed config. `scenario` fixes the scenario when the text has no
/// "scenario" key; a conflicting key is an error. Throws ConfigError.
ExperimentConfig parse_experiment(const KeyValues& kv, std::optional<Scenario> scenario = {});

}  // namespace bbdd::cli

#endif  // BBDD_CLI_CONFIG_HPP_
