#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wolbopt/grid.hpp"
#include "wolbopt/model.hpp"
#include "wolbopt/optimize.hpp"
#include "wolbopt/pde.hpp"

namespace wolbopt {

struct SimulateSettings {
  std::string release = "constant:0.03";  // constant:V | csv:PATH | bump:ALPHA,CENTER
  std::vector<double> snapshots{0.0, 10.0, 20.0, 30.0, 40.0};
};

struct OptimizeSettings {
  std::string method = "both";  // uzawa | multistart | both
  OptimOptions options;
  bool parallel = true;
};

struct Table3Settings {
  GridLayout multistart_layout = GridLayout::vertex;
};

struct AsymptoticsSettings {
  std::vector<double> eps{0.2, 0.1, 0.05};
  AsymptoticInit init = AsymptoticInit::well_prepared;
  double control_amplitude = 0.004;
  double control_center = 10.0;
  double control_width = 4.0;
  double init_amplitude = 0.3;
  double init_center = 20.0;
  double init_width = 3.0;
};

struct AnalyzeSettings {
  double level = 0.0;  // constant release level; 0 means C / L
  int modes = 50;
  std::string spectral = "continuous";
  double alpha = 0.65;
  double center = 0.0;  // 0 means L / 2
  std::vector<double> alpha_sweep{0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9};
};

struct ExperimentConfig {
  ModelParams params;
  double L = 30.0;
  int nx = 20;
  GridLayout layout = GridLayout::vertex;
  double T = 40.0;
  int nt = 200;
  ReleaseBudget budget{0.8, 0.04};
  SimulateSettings simulate;
  OptimizeSettings optimize;
  Table3Settings table3;
  AsymptoticsSettings asymptotics;
  AnalyzeSettings analyze;

  Grid1D grid() const { return Grid1D(L, nx, layout); }
  Grid1D grid(GridLayout other) const { return Grid1D(L, nx, other); }
  // "section.key = value" lines for every key, in registry order.
  std::string canonical() const;
  // FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

// Reference parameters and discretization; every key has its documented default.
ExperimentConfig default_config();

// INI text with [section] headers. Keys of [model], [grid] and [time] are
// required; unknown sections or keys are errors. Overrides are
// "section.key=value" and apply after the file.
ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});
// Range checks on numeric fields and enumerations; InputError naming the field.
void check_config(const ExperimentConfig& cfg);
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Documented key list "section.key" for help output.
std::vector<std::string> config_keys();

}  // namespace wolbopt
