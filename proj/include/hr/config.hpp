#pragma once
// Run configuration: a small INI-style text format (sections in brackets,
// key = value lines, '#' comments), fully validated with first-error line
// reporting, plus the inverse writer used for reproducibility manifests.

#include <cstdint>
#include <string>
#include <vector>

#include "hr/grid.hpp"
#include "hr/model.hpp"
#include "hr/solver.hpp"

namespace hr {

struct NoiseSpec {
  std::uint64_t seed = 1;
  double t_min = -40.0;
  double t_max = 5.0;
  double dt = 0.01;
};

enum class ExperimentKind { simulate, diagnose, pullback, convergence };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::simulate;
  // pullback
  std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  int cloud_members = 8;
  double cloud_rho = 0.0;  // 0 = derive as 10 R_H from the constants
  std::uint64_t cloud_seed = 7;
  int cloud_max_mode = 3;
  double quad_horizon = 0.0;  // 0 = use the whole available past of the path
  // convergence
  std::vector<double> dt_list = {1e-2, 5e-3, 2.5e-3};
  double probe_t = 1.0;  // composition split Phi(t+s) vs Phi(t) o Phi(s)
  double probe_s = 1.0;
};

struct RunConfig {
  GridSpec grid = GridSpec::rectangle(1.0, 1.0, 33, 33);
  Params params;
  NoiseSpec noise;
  SolveSpec solve;
  ExperimentSpec experiment;

  void validate() const;  // cross-field constraints; throws std::invalid_argument
};

// Parses and fully validates; the first problem raises std::invalid_argument
// with the line number ("config line 12: unknown key ...").
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Normalized echo: every key explicit, fixed order, 17 significant digits.
// write_config(parse_config(x)) is a fixed point, and the output parses back
// to an identical configuration.
std::string write_config(const RunConfig& cfg);

const char* experiment_name(ExperimentKind kind);

}  // namespace hr
