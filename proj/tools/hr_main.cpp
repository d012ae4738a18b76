// Command-line front end: four experiment subcommands sharing one config
// format.  Exit codes: 0 success, 1 run failure, 2 malformed flags.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hr/run.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::string noise_file;
  int threads = 1;
  std::string horizons_csv;
  int cloud_members = 0;
};

void add_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--noise-file", args.noise_file,
                  "pre-sampled noise path file (default: sample from the config seed)");
  cmd->add_option("--threads", args.threads, "worker threads for cloud experiments")
      ->check(CLI::Range(1, 256));
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string item = text.substr(pos, next - pos);
    if (!item.empty()) {
      char* end = nullptr;
      const double x = std::strtod(item.c_str(), &end);
      if (end == item.c_str() || *end != '\0')
        throw std::invalid_argument("--horizons: '" + item + "' is not a number");
      out.push_back(x);
    }
    pos = next + 1;
  }
  if (out.empty()) throw std::invalid_argument("--horizons: empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathwise simulator and attractor toolkit for a stochastic "
               "three-component neuron field model"};
  app.require_subcommand(1);
  CliArgs args;

  CLI::App* sim = app.add_subcommand("simulate", "integrate one trajectory, write energy data");
  add_common(sim, args);
  CLI::App* diag = app.add_subcommand(
      "diagnose", "simulate plus dissipativity constants and absorbing radii");
  add_common(diag, args);
  CLI::App* pull = app.add_subcommand(
      "pullback", "pullback cloud experiment: absorption and semi-distance decay");
  add_common(pull, args);
  pull->add_option("--horizons", args.horizons_csv,
                   "comma-separated pullback horizons (overrides the config)");
  pull->add_option("--cloud", args.cloud_members, "cloud size (overrides the config)")
      ->check(CLI::Range(2, 4096));
  CLI::App* conv = app.add_subcommand(
      "convergence", "cocycle composition defect under time-step refinement");
  add_common(conv, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    hr::RunConfig cfg = hr::parse_config_file(args.config_path);
    if (sim->parsed()) cfg.experiment.kind = hr::ExperimentKind::simulate;
    if (diag->parsed()) cfg.experiment.kind = hr::ExperimentKind::diagnose;
    if (conv->parsed()) cfg.experiment.kind = hr::ExperimentKind::convergence;
    if (pull->parsed()) {
      cfg.experiment.kind = hr::ExperimentKind::pullback;
      if (!args.horizons_csv.empty())
        cfg.experiment.horizons = parse_csv_doubles(args.horizons_csv);
      if (args.cloud_members > 0) cfg.experiment.cloud_members = args.cloud_members;
    }
    cfg.validate();

    hr::RunOptions opt;
    opt.out_dir = args.out_dir;
    opt.noise_file = args.noise_file;
    opt.threads = args.threads;
    const hr::RunResult result = hr::run_experiment(cfg, opt);
    std::cout << result.summary;
    std::cout << "# artifacts in " << result.out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
