#include "bbdd/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "bbdd/errors.hpp"

namespace bbdd::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_'))
    return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::optional<double> plain_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return x;
}

// number | [number '*'] pi ['/' number]
std::optional<double> scalar(std::string_view s) {
  s = trim(s);
  if (auto x = plain_number(s)) return x;
  const auto at = s.find("pi");
  if (at == std::string_view::npos) return std::nullopt;
  double value = std::numbers::pi;
  const auto head = trim(s.substr(0, at));
  if (!head.empty()) {
    if (head.back() != '*') return std::nullopt;
    const auto k = plain_number(head.substr(0, head.size() - 1));
    if (!k) return std::nullopt;
    value *= *k;
  }
  const auto tail = trim(s.substr(at + 2));
  if (!tail.empty()) {
    if (tail.front() != '/') return std::nullopt;
    const auto d = plain_number(tail.substr(1));
    if (!d || *d == 0.0) return std::nullopt;
    value /= *d;
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError("", where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError(key, where + ": malformed key");
    if (kv.has(key)) throw ConfigError(key, where + ": duplicate key");
    kv.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void KeyValues::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const std::string key(trim(assignment.substr(0, eq)));
  if (eq == std::string_view::npos || !valid_key(key))
    throw ConfigError(key, "override must look like key=value");
  set(key, std::string(trim(assignment.substr(eq + 1))));
}

void KeyValues::set(const std::string& key, std::string value) { values_[key] = std::move(value); }

void KeyValues::merge(const KeyValues& overrides) {
  for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

std::string KeyValues::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing required key");
  if (it->second.empty()) throw ConfigError(key, "empty value");
  return it->second;
}

std::string KeyValues::text_or(const std::string& key, std::string fallback) const {
  return has(key) ? text(key) : std::move(fallback);
}

double KeyValues::number(const std::string& key) const {
  const auto v = scalar(text(key));
  if (!v || !std::isfinite(*v)) throw ConfigError(key, "expected a number, got '" + text(key) + "'");
  return *v;
}

double KeyValues::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::int64_t KeyValues::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    throw ConfigError(key, "expected an integer, got '" + text(key) + "'");
  return static_cast<std::int64_t>(v);
}

std::int64_t KeyValues::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<double> KeyValues::numbers(const std::string& key) const {
  const std::string raw = text(key);
  std::vector<double> out;
  for (const auto item : split(raw, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      const auto v = scalar(item);
      if (!v || !std::isfinite(*v)) throw ConfigError(key, "bad number '" + std::string(item) + "'");
      out.push_back(*v);
      continue;
    }
    if (parts.size() != 3) throw ConfigError(key, "range must be start:step:stop");
    const auto a = scalar(parts[0]);
    const auto step = scalar(parts[1]);
    const auto b = scalar(parts[2]);
    if (!a || !step || !b || !(*step > 0.0) || *b < *a)
      throw ConfigError(key, "bad range '" + std::string(item) + "'");
    const auto n = static_cast<std::int64_t>(std::floor((*b - *a) / *step + 1e-9));
    if (n > 1000000) throw ConfigError(key, "range too long");
    for (std::int64_t k = 0; k <= n; ++k) out.push_back(*a + static_cast<double>(k) * *step);
  }
  return out;
}

std::vector<std::string> KeyValues::words(const std::string& key) const {
  const std::string raw = text(key);
  std::vector<std::string> out;
  for (const auto item : split(raw, ',')) {
    if (item.empty()) throw ConfigError(key, "empty list item");
    out.emplace_back(item);
  }
  return out;
}

void KeyValues::require_known(const std::vector<std::string_view>& known) const {
  for (const auto& [k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError(k, "unknown key for this scenario");
  }
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kClosed:
      return "closed";
    case Scenario::kRtn:
      return "rtn";
    case Scenario::kBath:
      return "bath";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  const auto n = lower(trim(name));
  if (n == "closed") return Scenario::kClosed;
  if (n == "rtn") return Scenario::kRtn;
  if (n == "bath") return Scenario::kBath;
  throw ConfigError("scenario", "expected closed, rtn or bath, got '" + std::string(name) + "'");
}

ProtocolSpec ExperimentConfig::protocol_spec(Protocol p, const SweepPoint& point) const {
  ProtocolSpec spec;
  spec.kind = p;
  spec.intervals = point.intervals;
  spec.dt = point.dt;
  spec.t0 = t0;
  spec.flip_probability = flip_probability;
  return spec;
}

EnsembleMode ExperimentConfig::ensemble_mode() const {
  return averaging == Averaging::kSample ? EnsembleMode::sample(samples, seed)
                                         : EnsembleMode::enumerate();
}

namespace {

const std::vector<std::string_view> kCommonKeys = {
    "scenario", "protocol", "sweep", "grid", "M",    "dt",      "tf",
    "t0",       "p_flip",   "mode",  "samples", "seed", "workers", "out"};
const std::vector<std::string_view> kClosedKeys = {"omega0", "G",     "G.multiple", "G.times",
                                                   "G.values", "D",   "D.num",      "D.den"};
const std::vector<std::string_view> kRtnKeys = {"g",             "gamma", "initial_sign",
                                                "trajectories",  "pulse_samples", "frame",
                                                "omega0",        "disturbance"};
const std::vector<std::string_view> kBathKeys = {"alpha",         "s",          "omega_c",
                                                 "T",             "coupling",   "coupling.rate",
                                                 "coupling.p",    "coupling.q", "report",
                                                 "omega0_dt"};

int as_intervals(const std::string& key, double x) {
  const double r = std::round(x);
  if (!(r >= 1.0) || std::abs(x - r) > 1e-9 * std::max(1.0, r) || r > 1e7)
    throw ConfigError(key, "pulse interval counts must be positive integers");
  return static_cast<int>(r);
}

double positive(const KeyValues& kv, const std::string& key) {
  const double v = kv.number(key);
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  return v;
}

// Two of (M, dt, tf) fix the third; the sweep axis supplies one of them.
std::vector<SweepPoint> sweep_points(const KeyValues& kv, SweepAxis axis) {
  const auto grid = kv.numbers("grid");
  if (grid.empty()) throw ConfigError("grid", "empty grid");
  auto only_one = [&](const char* a, const char* b) {
    if (kv.has(a) == kv.has(b))
      throw ConfigError(kv.has(a) ? b : a, std::string("give exactly one of ") + a + " and " + b);
  };
  auto consistent = [](const std::string& key, double want, int m, double dt) {
    if (std::abs(m * dt - want) > 1e-9 * std::abs(want))
      throw ConfigError(key, "grid value is not a whole number of intervals");
  };
  std::vector<SweepPoint> points;
  for (double x : grid) {
    SweepPoint p;
    switch (axis) {
      case SweepAxis::kIntervals:
        only_one("dt", "tf");
        p.intervals = as_intervals("grid", x);
        p.dt = kv.has("dt") ? positive(kv, "dt") : positive(kv, "tf") / p.intervals;
        break;
      case SweepAxis::kStep:
        only_one("M", "tf");
        if (!(x > 0.0)) throw ConfigError("grid", "dt values must be > 0");
        p.dt = x;
        if (kv.has("M")) {
          p.intervals = as_intervals("M", kv.number("M"));
        } else {
          const double tf = positive(kv, "tf");
          p.intervals = as_intervals("grid", tf / x);
          consistent("grid", tf, p.intervals, x);
        }
        break;
      case SweepAxis::kTime:
        only_one("dt", "M");
        if (!(x > 0.0)) throw ConfigError("grid", "times must be > 0");
        if (kv.has("M")) {
          p.intervals = as_intervals("M", kv.number("M"));
          p.dt = x / p.intervals;
        } else {
          p.dt = positive(kv, "dt");
          p.intervals = as_intervals("grid", x / p.dt);
          consistent("grid", x, p.intervals, p.dt);
        }
        break;
    }
    points.push_back(p);
  }
  return points;
}

void parse_drift(const KeyValues& kv, DriftSpec& drift) {
  drift.omega0 = kv.number_or("omega0", 1.0);
  const auto g = lower(kv.text_or("G", "none"));
  if (g == "none") {
    drift.g = Modulation::none();
  } else if (g == "sin") {
    drift.g = Modulation::sinusoid(kv.number("G.multiple"));
  } else if (g == "table") {
    drift.g = Modulation::table(kv.numbers("G.times"), kv.numbers("G.values"));
  } else {
    throw ConfigError("G", "expected none, sin or table");
  }
  const auto d = lower(kv.text_or("D", "one"));
  if (d == "one") {
    drift.d = SignSchedule::one();
  } else if (d == "floor") {
    drift.d = SignSchedule::floor_sign(kv.number("D.num"), kv.number("D.den"));
  } else {
    throw ConfigError("D", "expected one or floor");
  }
  try {
    drift.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(g == "table" ? "G.times" : (d == "floor" ? "D" : "omega0"), e.what());
  }
}

void parse_rtn(const KeyValues& kv, RtnBlock& rtn) {
  rtn.g = kv.numbers("g");
  for (double g : rtn.g)
    if (!(g > 0.0)) throw ConfigError("g", "must be > 0");
  rtn.gamma = kv.has("gamma") ? positive(kv, "gamma") : 1.0;
  rtn.initial_sign = static_cast<int>(kv.integer_or("initial_sign", 1));
  if (rtn.initial_sign != 1 && rtn.initial_sign != -1) throw ConfigError("initial_sign", "must be 1 or -1");
  const auto traj = kv.integer_or("trajectories", 10000);
  if (traj < 1) throw ConfigError("trajectories", "must be >= 1");
  rtn.trajectories = static_cast<std::size_t>(traj);
  const auto pulses = kv.integer_or("pulse_samples", 1000);
  if (pulses < 1) throw ConfigError("pulse_samples", "must be >= 1");
  rtn.pulse_samples = static_cast<std::size_t>(pulses);
  const auto frame = lower(kv.text_or("frame", "logical_ip"));
  if (frame == "logical_ip") {
    rtn.frame = RtnFrame::kLogicalIP;
  } else if (frame == "logical") {
    rtn.frame = RtnFrame::kLogical;
  } else {
    throw ConfigError("frame", "expected logical_ip or logical");
  }
  rtn.omega0 = kv.number_or("omega0", 0.0);
  if (rtn.frame == RtnFrame::kLogicalIP && kv.has("omega0"))
    throw ConfigError("omega0", "only used with frame = logical");
  const auto dist = lower(kv.text_or("disturbance", "none"));
  if (dist == "none") {
    rtn.disturbance = DisturbanceSpec::none();
  } else if (dist == "burst") {
    rtn.disturbance = DisturbanceSpec::burst(rtn.gamma);
  } else {
    throw ConfigError("disturbance", "expected none or burst");
  }
}

void parse_bath(const KeyValues& kv, BathBlock& bath) {
  bath.alpha = kv.has("alpha") ? positive(kv, "alpha") : 0.25;
  bath.s = kv.has("s") ? positive(kv, "s") : 1.0;
  bath.omega_c = kv.has("omega_c") ? positive(kv, "omega_c") : 100.0;
  bath.temperature = kv.has("T") ? kv.numbers("T") : std::vector<double>{1.0};
  for (double t : bath.temperature)
    if (!(t >= 0.0)) throw ConfigError("T", "must be >= 0");
  const auto c = lower(kv.text_or("coupling", "constant"));
  if (c == "constant") {
    bath.coupling = CouplingModulation::constant();
  } else if (c == "floor") {
    bath.coupling = CouplingModulation::floor_sign(kv.number_or("coupling.rate", 10.0 / 3.0));
  } else if (c == "cossin") {
    bath.coupling = CouplingModulation::cos_sin(kv.number_or("coupling.p", 2.95),
                                                kv.number_or("coupling.q", 3.25));
  } else {
    throw ConfigError("coupling", "expected constant, floor or cossin");
  }
  const auto report = lower(kv.text_or("report", "ensemble"));
  if (report == "ensemble") {
    bath.report = BathReport::kEnsemble;
    if (kv.has("omega0_dt")) throw ConfigError("omega0_dt", "only used with report = frames");
  } else if (report == "frames") {
    bath.report = BathReport::kFrames;
    bath.omega0_dt = kv.numbers("omega0_dt");
    if (bath.coupling.kind != CouplingModulation::Kind::kConstant)
      throw ConfigError("coupling", "report = frames needs constant coupling");
  } else {
    throw ConfigError("report", "expected ensemble or frames");
  }
}

}  // namespace

ExperimentConfig parse_experiment(const KeyValues& kv, std::optional<Scenario> scenario) {
  ExperimentConfig cfg;
  if (kv.has("scenario")) {
    cfg.scenario = parse_scenario(kv.text("scenario"));
    if (scenario && *scenario != cfg.scenario)
      throw ConfigError("scenario", "config is for '" + std::string(to_string(cfg.scenario)) +
                                        "', command is '" + std::string(to_string(*scenario)) + "'");
  } else if (scenario) {
    cfg.scenario = *scenario;
  } else {
    throw ConfigError("scenario", "missing required key");
  }

  std::vector<std::string_view> known = kCommonKeys;
  const auto& extra = cfg.scenario == Scenario::kClosed ? kClosedKeys
                      : cfg.scenario == Scenario::kRtn  ? kRtnKeys
                                                        : kBathKeys;
  known.insert(known.end(), extra.begin(), extra.end());
  kv.require_known(known);

  cfg.protocols.clear();
  for (const auto& name : kv.words("protocol")) {
    try {
      cfg.protocols.push_back(parse_protocol(name));
    } catch (const std::exception&) {
      throw ConfigError("protocol", "unknown protocol '" + name + "'");
    }
  }
  cfg.t0 = kv.number_or("t0", 0.0);
  cfg.flip_probability = kv.number_or("p_flip", 0.5);
  if (!(cfg.flip_probability >= 0.0 && cfg.flip_probability <= 1.0))
    throw ConfigError("p_flip", "must lie in [0, 1]");

  const auto axis = kv.text("sweep");
  if (axis == "M") {
    cfg.axis = SweepAxis::kIntervals;
  } else if (axis == "dt") {
    cfg.axis = SweepAxis::kStep;
  } else if (axis == "t") {
    cfg.axis = SweepAxis::kTime;
  } else {
    throw ConfigError("sweep", "expected M, dt or t");
  }
  cfg.points = sweep_points(kv, cfg.axis);

  const auto mode = lower(kv.text_or("mode", "enumerate"));
  if (mode == "enumerate") {
    cfg.averaging = Averaging::kEnumerate;
  } else if (mode == "sample") {
    cfg.averaging = Averaging::kSample;
  } else if (mode == "analytic" && cfg.scenario == Scenario::kRtn) {
    cfg.averaging = Averaging::kAnalytic;
  } else {
    throw ConfigError("mode", "unsupported mode '" + mode + "'");
  }
  const auto samples = kv.integer_or("samples", 1000);
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  cfg.samples = static_cast<std::size_t>(samples);
  const auto seed = kv.integer_or("seed", 1);
  if (seed < 0) throw ConfigError("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const auto workers = kv.integer_or("workers", 1);
  if (workers < 0 || workers > 1024) throw ConfigError("workers", "must lie in [0, 1024]");
  cfg.workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                             : static_cast<unsigned>(workers);
  cfg.output = kv.text_or("out", "");

  switch (cfg.scenario) {
    case Scenario::kClosed:
      parse_drift(kv, cfg.drift);
      break;
    case Scenario::kRtn:
      parse_rtn(kv, cfg.rtn);
      if (cfg.averaging == Averaging::kAnalytic) {
        for (auto p : cfg.protocols)
          if (p != Protocol::kNone) throw ConfigError("mode", "analytic needs protocol = NONE");
        if (cfg.rtn.disturbance.kind != DisturbanceSpec::Kind::kNone || cfg.rtn.frame != RtnFrame::kLogicalIP)
          throw ConfigError("mode", "analytic needs no disturbance and the logical_ip frame");
      }
      break;
    case Scenario::kBath:
      parse_bath(kv, cfg.bath);
      break;
  }

  for (const auto& [k, v] : kv.entries())
    if (k != "workers" && k != "out") cfg.settings[k] = v;
  cfg.settings["scenario"] = std::string(to_string(cfg.scenario));
  cfg.settings["seed"] = std::to_string(cfg.seed);
  return cfg;
}

}  // namespace bbdd::cli
