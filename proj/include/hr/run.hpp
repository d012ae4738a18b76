#pragma once
// Experiment orchestration: build every object from a RunConfig, execute the
// requested experiment, and lay out the artifact directory (manifest.txt,
// summary.txt, energy.csv, fields/*.bin, pullback/*.csv).

#include <string>

#include "hr/config.hpp"

namespace hr {

struct RunOptions {
  std::string out_dir;
  std::string noise_file;  // optional pre-sampled path; empty = sample from seed
  int threads = 1;
};

struct RunResult {
  std::string out_dir;
  std::string summary;  // exact content of summary.txt
};

// Runs the configured experiment and writes the artifact tree.  All results
// land in summary.txt as key=value lines with 17 significant digits, so two
// runs of the same config can be compared byte for byte.
RunResult run_experiment(const RunConfig& cfg, const RunOptions& opt);

}  // namespace hr
