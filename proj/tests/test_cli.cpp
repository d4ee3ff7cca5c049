#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "bbdd/cli/config.hpp"
#include "bbdd/cli/csv.hpp"
#include "bbdd/cli/presets.hpp"
#include "bbdd/cli/runner.hpp"
#include "bbdd/errors.hpp"
#include "doctest.h"

using namespace bbdd;
using namespace bbdd::cli;

TEST_CASE("key-value grammar") {
  const auto kv = KeyValues::parse(
      "# comment\n"
      "scenario = closed   # trailing\n"
      "  protocol=NONE, A ,R\n"
      "\n"
      "G.multiple = 2.5\n");
  CHECK(kv.text("scenario") == "closed");
  CHECK(kv.words("protocol") == std::vector<std::string>{"NONE", "A", "R"});
  CHECK(kv.number("G.multiple") == 2.5);
  CHECK(kv.number_or("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(KeyValues::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse("1a = 1\n"), ConfigError);
  CHECK_THROWS_AS(KeyValues::parse("no equals sign\n"), ConfigError);

  auto over = kv;
  over.set_assignment("scenario=rtn");
  CHECK(over.text("scenario") == "rtn");
  CHECK_THROWS_AS(over.set_assignment("novalue"), ConfigError);
  CHECK_THROWS_AS(kv.integer("G.multiple"), ConfigError);
}

TEST_CASE("number lists, ranges and pi scalars") {
  const auto kv = KeyValues::parse("a = 2:2:10\nb = pi, 10*pi, pi/2, -1e-3\nc = 0.1:0.1:0.3\nd = 1:0:3\n");
  CHECK(kv.numbers("a") == std::vector<double>{2, 4, 6, 8, 10});
  const auto b = kv.numbers("b");
  REQUIRE(b.size() == 4);
  CHECK(b[0] == std::numbers::pi);
  CHECK(b[1] == 10 * std::numbers::pi);
  CHECK(b[2] == std::numbers::pi / 2);
  CHECK(b[3] == -1e-3);
  const auto c = kv.numbers("c");
  REQUIRE(c.size() == 3);
  CHECK(c[2] == doctest::Approx(0.3));
  CHECK_THROWS_AS(kv.numbers("d"), ConfigError);
}

TEST_CASE("experiment parsing") {
  const auto cfg = parse_experiment(
      KeyValues::parse("scenario = closed\nprotocol = NONE, H\nsweep = M\ngrid = 2:2:6\ndt = 0.1\nomega0 = 3\n"));
  CHECK(cfg.scenario == Scenario::kClosed);
  REQUIRE(cfg.points.size() == 3);
  CHECK(cfg.points[1].intervals == 4);
  CHECK(cfg.points[1].dt == 0.1);
  CHECK(cfg.drift.omega0 == 3.0);

  SUBCASE("unknown keys are named") {
    try {
      parse_experiment(KeyValues::parse("scenario = closed\nsweep = M\ngrid = 2\ndt = 1\nbogus = 3\n"));
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "bogus");
      CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
  }
  SUBCASE("sweep needs exactly one companion") {
    CHECK_THROWS_AS(parse_experiment(KeyValues::parse("scenario = closed\nsweep = M\ngrid = 2\n")), ConfigError);
    CHECK_THROWS_AS(parse_experiment(KeyValues::parse("scenario = closed\nsweep = M\ngrid = 2\ndt = 1\ntf = 2\n")),
                    ConfigError);
  }
  SUBCASE("tf divides by M") {
    const auto c = parse_experiment(KeyValues::parse("scenario = rtn\nprotocol = NONE\ng = 1.1\nsweep = M\ngrid = 2:2:4\ntf = 10\n"));
    CHECK(c.points[0].dt == 5.0);
    CHECK(c.points[1].dt == 2.5);
  }
  SUBCASE("analytic mode is restricted") {
    CHECK_THROWS_AS(parse_experiment(KeyValues::parse(
                        "scenario = rtn\nprotocol = R\nmode = analytic\nsweep = t\nM = 1\ngrid = 1\n")),
                    ConfigError);
  }
}

TEST_CASE("csv round trip is exact") {
  Table t;
  t.columns = {{"name", ""}, {"n", "1"}, {"x", "1/gamma"}};
  t.notes = {"seed = 3"};
  t.add_row({std::string("plain"), std::int64_t{4}, 0.1});
  t.add_row({std::string("with, comma \"q\""), std::int64_t{-2}, 1.0 / 3.0});
  t.add_row({std::string("z"), std::int64_t{0}, -0.0});
  t.add_row({std::string("big"), std::int64_t{1}, 6.02214076e23 * std::numbers::pi});
  std::istringstream in(to_csv(t));
  const auto doc = read_csv(in);
  CHECK(doc.notes == std::vector<std::string>{"seed = 3"});
  CHECK(doc.units == std::vector<std::string>{"", "1", "1/gamma"});
  CHECK(doc.header == std::vector<std::string>{"name", "n", "x"});
  REQUIRE(doc.rows.size() == 4);
  CHECK(doc.rows[1][0] == "with, comma \"q\"");
  CHECK(doc.real(0, "x") == 0.1);
  CHECK(doc.real(1, "x") == 1.0 / 3.0);
  CHECK(doc.rows[2][2] == "0");
  CHECK(doc.real(3, "x") == 6.02214076e23 * std::numbers::pi);
  CHECK_THROWS_AS(doc.column("missing"), NotFound);
}

TEST_CASE("preset registry") {
  CHECK(presets().size() == 14);
  std::set<std::string> ids;
  for (const auto& p : presets()) ids.insert(p.id);
  CHECK(ids.size() == 14);
  for (int n = 2; n <= 15; ++n) CHECK(ids.count("fig" + std::to_string(n)) == 1);
  const auto& fig8 = find_preset("fig8");
  CHECK(fig8.description.find("g = 1.1") != std::string::npos);
  CHECK(fig8.description.find("disturbance") != std::string::npos);
  CHECK_THROWS_AS(find_preset("fig99"), NotFound);
  CHECK(list_presets().rows.size() == 14);
  // Every panel parses, in both sizes.
  for (const auto& p : presets())
    for (const auto& panel : p.panels)
      for (bool full : {false, true}) {
        PresetOptions o;
        o.full = full;
        CHECK_NOTHROW(panel_config(panel, o));
      }
}

TEST_CASE("closed run: free phase is omega0 t") {
  const auto cfg = parse_experiment(
      KeyValues::parse("scenario = closed\nprotocol = NONE\nsweep = t\ngrid = 0.5:0.5:2\ndt = 0.5\nomega0 = 1.7\n"));
  const auto table = run(cfg);
  std::istringstream in(to_csv(table));
  const auto doc = read_csv(in);
  REQUIRE(doc.rows.size() == 4);
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const double t = doc.real(i, "M") * doc.real(i, "dt");
    CHECK(doc.real(i, "phase") == doctest::Approx(1.7 * t).epsilon(1e-14));
    CHECK(doc.real(i, "gamma") == 0.0);
  }
}

TEST_CASE("fig4 analytic panel has six g curves") {
  PresetOptions o;
  o.overrides.set("grid", "1:1:3");
  const auto& fig4 = find_preset("fig4");
  const auto cfg = panel_config(fig4.panels.front(), o);
  const auto table = run(cfg);
  std::istringstream in(to_csv(table));
  const auto doc = read_csv(in);
  std::set<double> g;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    g.insert(doc.real(i, "g"));
    CHECK(doc.real(i, "absF") <= 1.0 + 1e-12);
  }
  CHECK(g.size() == 6);
  CHECK(doc.rows.size() == 18);
}

TEST_CASE("preset runs are reproducible and independent of workers") {
  PresetOptions o;
  o.overrides.set("grid", "2:2:4");
  o.overrides.set("trajectories", "300");
  o.overrides.set("g", "1.1");
  o.seed = 99;
  const auto& fig5 = find_preset("fig5");
  const auto first = to_csv(run_preset(fig5, o));
  CHECK(first == to_csv(run_preset(fig5, o)));
  o.workers = 3;
  CHECK(first == to_csv(run_preset(fig5, o)));
  CHECK(first.find("# preset = fig5 v1") != std::string::npos);
  CHECK(first.find("seed = 99") != std::string::npos);
}

TEST_CASE("plan table") {
  const auto cfg = parse_experiment(
      KeyValues::parse("scenario = closed\nprotocol = NONE, R\nsweep = M\ngrid = 100\ndt = 0.01\nomega0 = 1\n"));
  PlanRequest req;
  req.pilot = 500;
  const auto table = plan(cfg, req);
  std::istringstream in(to_csv(table));
  const auto doc = read_csv(in);
  REQUIRE(doc.rows.size() == 1);
  CHECK(doc.rows[0][doc.column("protocol")] == "R");
  CHECK(doc.rows[0][doc.column("in_regime")] == "yes");
  const double sigma = doc.real(0, "sigma_estimate");
  CHECK(sigma == doctest::Approx(sigma_estimate_drift(1.0, 1.0, 0.01).value));
  CHECK(doc.real(0, "K_min") >= 1.0);
}
