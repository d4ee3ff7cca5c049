#ifndef BBDD_CLI_PRESETS_HPP_
#define BBDD_CLI_PRESETS_HPP_

// Frozen experiment configs that regenerate the curve sets of Figs. 2-15.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbdd/cli/config.hpp"
#include "bbdd/cli/csv.hpp"

namespace bbdd::cli {

struct FigurePanel {
  std::string name;
  std::string config;  // key = value text
  std::string full;    // overrides applied by --full
};

struct FigurePreset {
  std::string id;  // fig2 ... fig15
  std::string figure;
  std::string description;
  int version = 1;
  std::vector<FigurePanel> panels;
};

const std::vector<FigurePreset>& presets();

/// Throws NotFound for an unknown id.
const FigurePreset& find_preset(std::string_view id);

/// Table of (id, description, figure).
Table list_presets();

struct PresetOptions {
  bool full = false;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  KeyValues overrides;  // applied to every panel, after --full
};

/// Config of one panel with --full and the overrides applied.
ExperimentConfig panel_config(const FigurePanel& panel, const PresetOptions& options);

/// All panels stacked, with a leading `panel` column.
Table run_preset(const FigurePreset& preset, const PresetOptions& options);

}  // namespace bbdd::cli

#endif  // BBDD_CLI_PRESETS_HPP_
