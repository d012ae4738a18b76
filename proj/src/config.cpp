#include "hr/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
    fail(line, "key '" + key + "' needs a finite number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    fail(line, "key '" + key + "' needs an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& v, int line, const std::string& key) {
  if (v.empty() || v[0] == '-')
    fail(line, "key '" + key + "' needs a non-negative integer, got '" + v + "'");
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    fail(line, "key '" + key + "' needs a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

std::vector<double> to_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double(item, line, key));
  }
  if (out.empty()) fail(line, "key '" + key + "' needs at least one value");
  return out;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::diagnose: return "diagnose";
    case ExperimentKind::pullback: return "pullback";
    case ExperimentKind::convergence: return "convergence";
  }
  return "?";
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "grid" && section != "params" && section != "noise" &&
          section != "solve" && section != "experiment")
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (val.empty()) fail(line, "key '" + key + "' has no value");
    if (section.empty()) fail(line, "key '" + key + "' appears before any [section]");

    if (section == "grid") {
      if (key == "dimension") {
        const long long d = to_int(val, line, key);
        if (d != 1 && d != 2)
          fail(line, "dimension must be 1 or 2 (the analysis covers dim <= 2 only), got " + val);
        cfg.grid.dimension = static_cast<int>(d);
      } else if (key == "lx") {
        cfg.grid.extent[0] = to_double(val, line, key);
      } else if (key == "ly") {
        cfg.grid.extent[1] = to_double(val, line, key);
      } else if (key == "nx") {
        cfg.grid.points[0] = static_cast<int>(to_int(val, line, key));
      } else if (key == "ny") {
        cfg.grid.points[1] = static_cast<int>(to_int(val, line, key));
      } else {
        fail(line, "unknown key '" + key + "' in section [grid]");
      }
    } else if (section == "params") {
      double* slot = nullptr;
      if (key == "d1") slot = &cfg.params.d1;
      else if (key == "d2") slot = &cfg.params.d2;
      else if (key == "d3") slot = &cfg.params.d3;
      else if (key == "a") slot = &cfg.params.a;
      else if (key == "b") slot = &cfg.params.b;
      else if (key == "alpha") slot = &cfg.params.alpha;
      else if (key == "beta") slot = &cfg.params.beta;
      else if (key == "q") slot = &cfg.params.q;
      else if (key == "r") slot = &cfg.params.r;
      else if (key == "j") slot = &cfg.params.J;
      else if (key == "c") slot = &cfg.params.c;
      else if (key == "kappa") slot = &cfg.params.kappa;
      if (slot) {
        *slot = to_double(val, line, key);
        continue;
      }
      bool matched = false;
      for (int ch = 0; ch < 3 && !matched; ++ch) {
        const std::string stem = "h" + std::to_string(ch + 1);
        if (key == stem + "_mode_x") {
          cfg.params.profiles[ch].modes[0] = static_cast<int>(to_int(val, line, key));
          matched = true;
        } else if (key == stem + "_mode_y") {
          cfg.params.profiles[ch].modes[1] = static_cast<int>(to_int(val, line, key));
          matched = true;
        } else if (key == stem + "_amplitude") {
          cfg.params.profiles[ch].amplitude = to_double(val, line, key);
          matched = true;
        }
      }
      if (!matched) fail(line, "unknown key '" + key + "' in section [params]");
    } else if (section == "noise") {
      if (key == "seed") cfg.noise.seed = to_u64(val, line, key);
      else if (key == "t_min") cfg.noise.t_min = to_double(val, line, key);
      else if (key == "t_max") cfg.noise.t_max = to_double(val, line, key);
      else if (key == "dt") cfg.noise.dt = to_double(val, line, key);
      else fail(line, "unknown key '" + key + "' in section [noise]");
    } else if (section == "solve") {
      if (key == "t_start") cfg.solve.t_start = to_double(val, line, key);
      else if (key == "t_end") cfg.solve.t_end = to_double(val, line, key);
      else if (key == "dt") cfg.solve.dt = to_double(val, line, key);
      else if (key == "stepper") {
        if (val == "imex1") cfg.solve.stepper = Stepper::imex1;
        else if (val == "rk2") cfg.solve.stepper = Stepper::rk2;
        else fail(line, "stepper must be 'imex1' or 'rk2', got '" + val + "'");
      } else if (key == "snapshot_stride") {
        cfg.solve.snapshot_stride = static_cast<int>(to_int(val, line, key));
      } else if (key == "cfl") {
        if (val == "hard_error") cfg.solve.cfl = CflPolicy::hard_error;
        else if (val == "substep") cfg.solve.cfl = CflPolicy::substep;
        else fail(line, "cfl must be 'hard_error' or 'substep', got '" + val + "'");
      } else if (key == "cg_tol") {
        cfg.solve.cg_tol = to_double(val, line, key);
      } else if (key == "blowup_threshold") {
        cfg.solve.blowup_threshold = to_double(val, line, key);
      } else if (key == "cfl_limit") {
        cfg.solve.cfl_limit = to_double(val, line, key);
      } else if (key == "cfl_safety") {
        cfg.solve.cfl_safety = to_double(val, line, key);
      } else {
        fail(line, "unknown key '" + key + "' in section [solve]");
      }
    } else {  // experiment
      if (key == "kind") {
        if (val == "simulate") cfg.experiment.kind = ExperimentKind::simulate;
        else if (val == "diagnose") cfg.experiment.kind = ExperimentKind::diagnose;
        else if (val == "pullback") cfg.experiment.kind = ExperimentKind::pullback;
        else if (val == "convergence") cfg.experiment.kind = ExperimentKind::convergence;
        else fail(line, "kind must be simulate|diagnose|pullback|convergence, got '" + val + "'");
      } else if (key == "horizons") {
        cfg.experiment.horizons = to_list(val, line, key);
      } else if (key == "cloud_members") {
        cfg.experiment.cloud_members = static_cast<int>(to_int(val, line, key));
      } else if (key == "cloud_rho") {
        cfg.experiment.cloud_rho = to_double(val, line, key);
      } else if (key == "cloud_seed") {
        cfg.experiment.cloud_seed = to_u64(val, line, key);
      } else if (key == "cloud_max_mode") {
        cfg.experiment.cloud_max_mode = static_cast<int>(to_int(val, line, key));
      } else if (key == "quad_horizon") {
        cfg.experiment.quad_horizon = to_double(val, line, key);
      } else if (key == "dt_list") {
        cfg.experiment.dt_list = to_list(val, line, key);
      } else if (key == "probe_t") {
        cfg.experiment.probe_t = to_double(val, line, key);
      } else if (key == "probe_s") {
        cfg.experiment.probe_s = to_double(val, line, key);
      } else {
        fail(line, "unknown key '" + key + "' in section [experiment]");
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void RunConfig::validate() const {
  grid.validate();
  params.validate();
  if (!(noise.dt > 0.0)) throw std::invalid_argument("noise dt must be positive");
  if (!(noise.t_min < noise.t_max))
    throw std::invalid_argument("noise t_min must be below t_max");
  // Raises unless the window is dt-aligned and contains 0.
  TimeGrid tg = TimeGrid::make(noise.t_min, noise.t_max, noise.dt);
  if (!(solve.dt > 0.0)) throw std::invalid_argument("solve dt must be positive");
  if (!(solve.t_end > solve.t_start))
    throw std::invalid_argument("solve t_end must exceed t_start");
  const double ratio = noise.dt / solve.dt;
  if (std::abs(ratio - std::nearbyint(ratio)) > 1e-9 * ratio || ratio < 1.0 - 1e-9)
    throw std::invalid_argument(
        "noise dt must be an integer multiple of solve dt (noise dt = " +
        std::to_string(noise.dt) + ", solve dt = " + std::to_string(solve.dt) + ")");
  if (!tg.covers(solve.t_start) || !tg.covers(solve.t_end))
    throw std::invalid_argument("noise window [t_min, t_max] must cover the solve interval");
  if (solve.snapshot_stride < 1)
    throw std::invalid_argument("solve snapshot_stride must be >= 1");
  if (!(solve.cg_tol > 0.0)) throw std::invalid_argument("solve cg_tol must be positive");
  if (!(solve.blowup_threshold > 0.0))
    throw std::invalid_argument("solve blowup_threshold must be positive");
  if (!(solve.cfl_limit > 0.0)) throw std::invalid_argument("solve cfl_limit must be positive");
  if (!(solve.cfl_safety > 0.0) || solve.cfl_safety > 1.0)
    throw std::invalid_argument("solve cfl_safety must lie in (0, 1]");

  if (experiment.kind == ExperimentKind::pullback) {
    if (experiment.cloud_members < 2)
      throw std::invalid_argument("experiment cloud_members must be >= 2");
    if (experiment.cloud_max_mode < 0)
      throw std::invalid_argument("experiment cloud_max_mode must be >= 0");
    if (experiment.cloud_rho < 0.0)
      throw std::invalid_argument("experiment cloud_rho must be >= 0 (0 = derive from R_H)");
    double prev = 0.0;
    for (double t : experiment.horizons) {
      if (!(t > prev))
        throw std::invalid_argument("experiment horizons must be positive and increasing");
      prev = t;
      if (t > -noise.t_min + 1e-12)
        throw std::invalid_argument("experiment horizon " + std::to_string(t) +
                                    " reaches beyond the noise window start t_min = " +
                                    std::to_string(noise.t_min));
    }
  }
  if (experiment.quad_horizon < 0.0)
    throw std::invalid_argument("experiment quad_horizon must be >= 0 (0 = whole past)");
  if (experiment.kind == ExperimentKind::convergence) {
    for (double dt : experiment.dt_list)
      if (!(dt > 0.0)) throw std::invalid_argument("experiment dt_list entries must be positive");
    if (!(experiment.probe_t > 0.0) || !(experiment.probe_s > 0.0))
      throw std::invalid_argument("experiment probe_t and probe_s must be positive");
  }
}

std::string write_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "dimension = " << cfg.grid.dimension << "\n";
  out << "lx = " << fmt17(cfg.grid.extent[0]) << "\n";
  if (cfg.grid.dimension == 2) out << "ly = " << fmt17(cfg.grid.extent[1]) << "\n";
  out << "nx = " << cfg.grid.points[0] << "\n";
  if (cfg.grid.dimension == 2) out << "ny = " << cfg.grid.points[1] << "\n";
  out << "\n[params]\n";
  out << "d1 = " << fmt17(cfg.params.d1) << "\n";
  out << "d2 = " << fmt17(cfg.params.d2) << "\n";
  out << "d3 = " << fmt17(cfg.params.d3) << "\n";
  out << "a = " << fmt17(cfg.params.a) << "\n";
  out << "b = " << fmt17(cfg.params.b) << "\n";
  out << "alpha = " << fmt17(cfg.params.alpha) << "\n";
  out << "beta = " << fmt17(cfg.params.beta) << "\n";
  out << "q = " << fmt17(cfg.params.q) << "\n";
  out << "r = " << fmt17(cfg.params.r) << "\n";
  out << "j = " << fmt17(cfg.params.J) << "\n";
  out << "c = " << fmt17(cfg.params.c) << "\n";
  out << "kappa = " << fmt17(cfg.params.kappa) << "\n";
  for (int ch = 0; ch < 3; ++ch) {
    const std::string stem = "h" + std::to_string(ch + 1);
    out << stem << "_mode_x = " << cfg.params.profiles[ch].modes[0] << "\n";
    out << stem << "_mode_y = " << cfg.params.profiles[ch].modes[1] << "\n";
    out << stem << "_amplitude = " << fmt17(cfg.params.profiles[ch].amplitude) << "\n";
  }
  out << "\n[noise]\n";
  out << "seed = " << cfg.noise.seed << "\n";
  out << "t_min = " << fmt17(cfg.noise.t_min) << "\n";
  out << "t_max = " << fmt17(cfg.noise.t_max) << "\n";
  out << "dt = " << fmt17(cfg.noise.dt) << "\n";
  out << "\n[solve]\n";
  out << "t_start = " << fmt17(cfg.solve.t_start) << "\n";
  out << "t_end = " << fmt17(cfg.solve.t_end) << "\n";
  out << "dt = " << fmt17(cfg.solve.dt) << "\n";
  out << "stepper = " << (cfg.solve.stepper == Stepper::imex1 ? "imex1" : "rk2") << "\n";
  out << "snapshot_stride = " << cfg.solve.snapshot_stride << "\n";
  out << "cfl = " << (cfg.solve.cfl == CflPolicy::hard_error ? "hard_error" : "substep") << "\n";
  out << "cg_tol = " << fmt17(cfg.solve.cg_tol) << "\n";
  out << "blowup_threshold = " << fmt17(cfg.solve.blowup_threshold) << "\n";
  out << "cfl_limit = " << fmt17(cfg.solve.cfl_limit) << "\n";
  out << "cfl_safety = " << fmt17(cfg.solve.cfl_safety) << "\n";
  out << "\n[experiment]\n";
  out << "kind = " << experiment_name(cfg.experiment.kind) << "\n";
  auto list = [&](const char* key, const std::vector<double>& xs) {
    out << key << " = ";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << fmt17(xs[i]);
    out << "\n";
  };
  list("horizons", cfg.experiment.horizons);
  out << "cloud_members = " << cfg.experiment.cloud_members << "\n";
  out << "cloud_rho = " << fmt17(cfg.experiment.cloud_rho) << "\n";
  out << "cloud_seed = " << cfg.experiment.cloud_seed << "\n";
  out << "cloud_max_mode = " << cfg.experiment.cloud_max_mode << "\n";
  out << "quad_horizon = " << fmt17(cfg.experiment.quad_horizon) << "\n";
  list("dt_list", cfg.experiment.dt_list);
  out << "probe_t = " << fmt17(cfg.experiment.probe_t) << "\n";
  out << "probe_s = " << fmt17(cfg.experiment.probe_s) << "\n";
  return out.str();
}

}  // namespace hr
