#include "bbdd/cli/presets.hpp"

#include "bbdd/cli/runner.hpp"
#include "bbdd/errors.hpp"

namespace bbdd::cli {

namespace {

const char* const kRtnGs = "0.1, 0.8, 1.1, 2, 3, 5";

std::vector<FigurePreset> build() {
  std::vector<FigurePreset> out;

  // Closed qubit, omega0 = 1.
  const std::string sinusoid_fixed_dt =
      "scenario = closed\nprotocol = NONE, A, R, H\nomega0 = 1\nG = sin\n"
      "sweep = t\ndt = 0.1\ngrid = 0.2:0.2:6\nmode = sample\nsamples = 1000\nseed = 2\n";
  out.push_back({"fig2", "Fig. 2",
                 "sinusoidal drift G = sin(p w0 t), dt = 1/(10 w0); NONE, A, R, H; "
                 "p = 20 sqrt2 and 10 pi; 1e3 sampled realizations",
                 1,
                 {{"p=20sqrt2", sinusoid_fixed_dt + "G.multiple = 28.284271247461902\n", ""},
                  {"p=10pi", sinusoid_fixed_dt + "G.multiple = 10*pi\n", ""}}});

  const std::string sinusoid_fixed_tf =
      "scenario = closed\nprotocol = NONE, A, R, H\nomega0 = 1\nG = sin\nG.multiple = 10\n"
      "sweep = M\ntf = 2\ngrid = 2:2:20\nmode = enumerate\n";
  out.push_back({"fig3", "Fig. 3",
                 "sinusoidal drift p = 10 at t_f = 2/w0, with and without D = (-1)^floor(10 w0 t/3); "
                 "all realizations",
                 1,
                 {{"D=1", sinusoid_fixed_tf, ""},
                  {"D=floor", sinusoid_fixed_tf + "D = floor\nD.num = 10\nD.den = 3\n", ""}}});

  // Random telegraph noise, gamma = 1.
  const std::string rtn_free = std::string("scenario = rtn\nprotocol = NONE\ngamma = 1\ng = ") + kRtnGs +
                               "\nsweep = t\nM = 1\ngrid = 0.2:0.2:10\nseed = 4\n";
  out.push_back({"fig4", "Fig. 4",
                 "free decay |Z(t)| of a symmetric fluctuator for g = 0.1, 0.8, 1.1, 2, 3, 5; "
                 "analytic and 1e4 trajectories (--full: 1e5)",
                 1,
                 {{"analytic", rtn_free + "mode = analytic\n", ""},
                  {"monte_carlo", rtn_free + "mode = enumerate\ntrajectories = 10000\n",
                   "trajectories = 100000\n"}}});

  const std::string rtn_fixed_tf = std::string("scenario = rtn\nprotocol = NONE, A, R, H\ngamma = 1\ng = ") +
                                   kRtnGs +
                                   "\nsweep = M\ntf = 10\ngrid = 2:2:20\nmode = enumerate\n"
                                   "trajectories = 10000\nseed = 5\n";
  out.push_back({"fig5", "Fig. 5",
                 "controlled decay |F| at t_f = 10/gamma vs M; NONE, A, R, H; 1e4 trajectories "
                 "(--full: 1e5), all pulse realizations",
                 1,
                 {{"all", rtn_fixed_tf, "trajectories = 100000\n"}}});
  out.push_back({"fig6", "Fig. 6",
                 "phase offset arg F at t_f = 10/gamma vs M; NONE, A, R, H; 1e4 trajectories "
                 "(--full: 1e5), all pulse realizations",
                 1,
                 {{"all", rtn_fixed_tf, "trajectories = 100000\n"}}});

  const std::string rtn_sampled =
      "scenario = rtn\nprotocol = NONE, A, R, H\ngamma = 1\ng = 1.1\nmode = sample\n"
      "trajectories = 10000\npulse_samples = 1000\nseed = 7\n";
  out.push_back({"fig7", "Fig. 7",
                 "g = 1.1: M = 10 and M = 30 vs dt, and dt = 1/gamma vs M; 1e4 trajectories x 1e3 "
                 "pulse draws",
                 1,
                 {{"M=10", rtn_sampled + "sweep = dt\nM = 10\ngrid = 0.1:0.1:2\n", ""},
                  {"M=30", rtn_sampled + "sweep = dt\nM = 30\ngrid = 0.1:0.1:2\n", ""},
                  {"dt=1", rtn_sampled + "sweep = M\ndt = 1\ngrid = 2:2:30\n", ""}}});

  out.push_back(
      {"fig8", "Fig. 8",
       "g = 1.1 with the burst disturbance D(t): t_f = 10/gamma vs M (1e4 trajectories, --full: "
       "1e5) and dt = 5/(4 gamma) vs M (1e3 x 1e2 sampled, --full: 1e4 x 1e3)",
       1,
       {{"tf=10",
         "scenario = rtn\nprotocol = NONE, A, R, H\ngamma = 1\ng = 1.1\ndisturbance = burst\n"
         "sweep = M\ntf = 10\ngrid = 2:2:20\nmode = enumerate\ntrajectories = 10000\nseed = 8\n",
         "trajectories = 100000\n"},
        {"dt=5/4",
         "scenario = rtn\nprotocol = NONE, A, R, H\ngamma = 1\ng = 1.1\ndisturbance = burst\n"
         "sweep = M\ndt = 1.25\ngrid = 2:2:20\nmode = sample\ntrajectories = 1000\n"
         "pulse_samples = 100\nseed = 8\n",
         "trajectories = 10000\npulse_samples = 1000\n"}}});

  // Ohmic bath, alpha = 0.25, omega_c = 100; T = 1e4 is high, T = 1 low temperature.
  const std::string ohmic = "scenario = bath\nalpha = 0.25\ns = 1\nomega_c = 100\n";
  out.push_back({"fig9", "Fig. 9",
                 "Ohmic bath: NONE and A against the lower bound; T = 1e4 with wc dt = 0.1, "
                 "T = 1 with wc dt = 0.1 and 2.5",
                 1,
                 {{"T=1e4 wc_dt=0.1", ohmic + "T = 1e4\nprotocol = NONE, A\nsweep = M\ndt = 0.001\ngrid = 2:2:40\n", ""},
                  {"T=1 wc_dt=0.1", ohmic + "T = 1\nprotocol = NONE, A\nsweep = M\ndt = 0.001\ngrid = 2:2:40\n", ""},
                  {"T=1 wc_dt=2.5", ohmic + "T = 1\nprotocol = NONE, A\nsweep = M\ndt = 0.025\ngrid = 2:2:40\n", ""}}});

  auto ar_panels = [&](const std::string& temp, const std::string& tf_label, const std::string& tf,
                       const std::string& deterministic) {
    const std::string head = ohmic + "T = " + temp + "\nsweep = M\ntf = " + tf + "\ngrid = 2:2:16\n";
    return std::vector<FigurePanel>{
        {tf_label + " exact", head + "protocol = " + deterministic + "R\nmode = enumerate\n", ""},
        {tf_label + " sampled", head + "protocol = R\nmode = sample\nsamples = 1000\nseed = 10\n", ""}};
  };
  {
    auto p = ar_panels("1e4", "wc_tf=0.5", "0.005", "A, ");
    auto q = ar_panels("1e4", "wc_tf=1", "0.01", "A, ");
    p.insert(p.end(), q.begin(), q.end());
    out.push_back({"fig10", "Fig. 10",
                   "high temperature T = 1e4, wc t_f = 0.5 and 1: A, exact R and 1e3 sampled R "
                   "with standard deviations",
                   1, p});
  }
  {
    auto p = ar_panels("1", "wc_tf=1", "0.01", "NONE, A, ");
    auto q = ar_panels("1", "wc_tf=10", "0.1", "NONE, A, ");
    p.insert(p.end(), q.begin(), q.end());
    out.push_back({"fig11", "Fig. 11",
                   "low temperature T = 1, wc t_f = 1 and 10: NONE, A, exact R and 1e3 sampled R "
                   "with standard deviations",
                   1, p});
  }
  const std::string sym = "protocol = NONE, A, H, LS, S\nsweep = M\ngrid = 2:2:20\nmode = sample\n"
                          "samples = 1000\nseed = 12\n";
  out.push_back({"fig12", "Fig. 12",
                 "NONE, A, H, LS, S: T = 1e4 at wc t_f = 1 and T = 1 at wc t_f = 10; H over 1e3 "
                 "sampled realizations",
                 1,
                 {{"T=1e4 wc_tf=1", ohmic + "T = 1e4\ntf = 0.01\n" + sym, ""},
                  {"T=1 wc_tf=10", ohmic + "T = 1\ntf = 0.1\n" + sym, ""}}});

  const std::string frames = "protocol = NONE, A, H, R\nreport = frames\nomega0_dt = 0.001, pi/2\n"
                             "sweep = M\ndt = 0.001\ngrid = 2:2:16\nmode = enumerate\n";
  out.push_back({"fig13", "Fig. 13",
                 "frame ratios F1 (logical) and F2 (logical-IP) at wc dt = 0.1 for w0 dt = 1e-3 "
                 "and pi/2; T = 1e4 and T = 1",
                 1,
                 {{"T=1e4", ohmic + "T = 1e4\n" + frames, ""}, {"T=1", ohmic + "T = 1\n" + frames, ""}}});

  out.push_back({"fig14", "Fig. 14",
                 "alternating coupling (-1)^floor(10 wc t/3) at T = 1e4, wc t_f = 1: A, R, H over "
                 "all realizations",
                 1,
                 {{"all", ohmic + "T = 1e4\ncoupling = floor\ncoupling.rate = 3.3333333333333335\nprotocol = A, R, H\n"
                          "sweep = M\ntf = 0.01\ngrid = 2:2:16\nmode = enumerate\n",
                   ""}}});

  out.push_back({"fig15", "Fig. 15",
                 "periodic coupling cos(2.95 pi wc t) sin(3.25 pi wc t) at T = 1e4: free decay vs t, "
                 "and NONE, A, R, H at wc t_f = 1 over 1e3 sampled realizations",
                 1,
                 {{"free", ohmic + "T = 1e4\ncoupling = cossin\nprotocol = NONE\nsweep = t\nM = 1\n"
                           "grid = 0.0005:0.0005:0.03\n",
                   ""},
                  {"controlled", ohmic + "T = 1e4\ncoupling = cossin\nprotocol = NONE, A, R, H\nsweep = M\n"
                                 "tf = 0.01\ngrid = 2:2:20\nmode = sample\nsamples = 1000\nseed = 15\n",
                   ""}}});
  return out;
}

}  // namespace

const std::vector<FigurePreset>& presets() {
  static const std::vector<FigurePreset> all = build();
  return all;
}

const FigurePreset& find_preset(std::string_view id) {
  for (const auto& p : presets())
    if (p.id == id) return p;
  throw NotFound("no figure preset named '" + std::string(id) + "'");
}

Table list_presets() {
  Table t;
  t.columns = {{"id", "-"}, {"description", "-"}, {"figure", "-"}};
  for (const auto& p : presets()) t.add_row({p.id, p.description, p.figure});
  return t;
}

ExperimentConfig panel_config(const FigurePanel& panel, const PresetOptions& options) {
  auto kv = KeyValues::parse(panel.config);
  if (options.full && !panel.full.empty()) kv.merge(KeyValues::parse(panel.full));
  kv.merge(options.overrides);
  if (options.seed) kv.set("seed", std::to_string(*options.seed));
  kv.set("workers", std::to_string(options.workers));
  return parse_experiment(kv);
}

Table run_preset(const FigurePreset& preset, const PresetOptions& options) {
  Table all;
  for (const auto& panel : preset.panels) {
    Table t = run(panel_config(panel, options));
    t.prepend_column({"panel", "-"}, panel.name);
    all.append(t);
    for (const auto& n : t.notes) all.notes.push_back("[" + panel.name + "] " + n);
  }
  all.notes.insert(all.notes.begin(), "preset = " + preset.id + " v" + std::to_string(preset.version) +
                                          (options.full ? " full" : ""));
  return all;
}

}  // namespace bbdd::cli
