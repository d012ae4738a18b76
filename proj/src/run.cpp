#include "hr/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hr/attractor.hpp"
#include "hr/diagnostics.hpp"
#include "hr/parallel.hpp"

namespace hr {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// The largest grid-aligned quadrature horizon the path supports, or the
// configured one.
double pick_quad_horizon(const RunConfig& cfg, const TimeGrid& tg) {
  if (cfg.experiment.quad_horizon > 0.0) return cfg.experiment.quad_horizon;
  return -tg.time(0);  // whole available past
}

struct Context {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const OUPath> ou;
  ProfilePack pack;
  ConstantsBundle constants;
};

Context build_context(const RunConfig& cfg, const RunOptions& opt) {
  Context ctx;
  ctx.grid = std::make_shared<Grid>(cfg.grid);
  if (opt.noise_file.empty()) {
    const TimeGrid tg = TimeGrid::make(cfg.noise.t_min, cfg.noise.t_max, cfg.noise.dt);
    WienerPath w = sample_wiener(cfg.noise.seed, tg);
    ctx.ou = std::make_shared<OUPath>(ou_from_wiener(w, cfg.params.kappa));
  } else {
    auto loaded = read_noise(opt.noise_file);
    if (std::abs(loaded.second.kappa - cfg.params.kappa) >
        1e-12 * std::max(1.0, std::abs(cfg.params.kappa)))
      throw std::invalid_argument("noise file " + opt.noise_file + " was sampled with kappa = " +
                                  std::to_string(loaded.second.kappa) +
                                  " but the config requests kappa = " +
                                  std::to_string(cfg.params.kappa));
    if (!loaded.second.grid.covers(cfg.solve.t_start) || !loaded.second.grid.covers(cfg.solve.t_end))
      throw std::invalid_argument("noise file " + opt.noise_file +
                                  " does not cover the solve interval");
    ctx.ou = std::make_shared<OUPath>(std::move(loaded.second));
  }
  ctx.pack = make_profile_pack(cfg.params, ctx.grid);
  ctx.constants = compute_constants(cfg.params, ctx.pack, ctx.grid);
  return ctx;
}

StateTriple initial_state(const RunConfig& cfg, const Context& ctx) {
  const double rho = cfg.experiment.cloud_rho > 0.0 ? cfg.experiment.cloud_rho : 1.0;
  return sample_cloud(ctx.grid, 2, rho, cfg.experiment.cloud_seed,
                      cfg.experiment.cloud_max_mode)
      .front();
}

void append_constants(std::ostringstream& s, const ConstantsBundle& cb) {
  std::istringstream lines(constants_text(cb));
  std::string line;
  while (std::getline(lines, line)) s << line << "\n";
}

void append_energy_stats(std::ostringstream& s, const EnergyReport& rep) {
  double max_res = -std::numeric_limits<double>::infinity();
  double emin = std::numeric_limits<double>::infinity(), emax = -emin;
  std::size_t interior = 0, nonpos = 0;
  for (const EnergyRow& r : rep.rows) {
    emin = std::min(emin, r.energy);
    emax = std::max(emax, r.energy);
    if (!r.interior) continue;
    ++interior;
    max_res = std::max(max_res, r.residual);
    if (r.residual <= 0.0) ++nonpos;
  }
  s << "energy_min=" << fmt17(emin) << "\n";
  s << "energy_max=" << fmt17(emax) << "\n";
  s << "energy_final=" << fmt17(rep.rows.back().energy) << "\n";
  s << "residual_max_interior=" << fmt17(max_res) << "\n";
  s << "residual_nonpositive_fraction="
    << fmt17(interior ? static_cast<double>(nonpos) / static_cast<double>(interior) : 1.0)
    << "\n";
}

void run_simulate(const RunConfig& cfg, const Context& ctx,
                  const std::filesystem::path& dir, std::ostringstream& summary,
                  bool with_radii) {
  Integrator integ(ctx.grid, cfg.params, ctx.ou);
  const StateTriple g0 = initial_state(cfg, ctx);
  Trajectory traj = integ.integrate(cfg.solve, g0);
  EnergyReport energy = energy_series(traj, ctx.constants);
  write_energy_csv((dir / "energy.csv").string(), energy);

  std::filesystem::create_directories(dir / "fields");
  const StateTriple final_orig =
      to_original(traj.states.back(), ctx.pack, traj.gammas.back());
  const char* names[3] = {"u", "v", "z"};
  for (int ch = 0; ch < 3; ++ch) {
    write_field((dir / "fields" / (std::string(names[ch]) + "_initial.bin")).string(),
                g0.f[ch]);
    write_field((dir / "fields" / (std::string(names[ch]) + "_final.bin")).string(),
                final_orig.f[ch]);
  }

  summary << "snapshots=" << traj.states.size() << "\n";
  summary << "final_time=" << fmt17(traj.times.back()) << "\n";
  summary << "final_state_norm=" << fmt17(state_norm(final_orig)) << "\n";
  append_energy_stats(summary, energy);
  if (with_radii) {
    const double H = pick_quad_horizon(cfg, ctx.ou->grid);
    const ConstantsBundle radii = absorbing_radius(*ctx.ou, ctx.pack, ctx.constants, H);
    summary << "quad_horizon=" << fmt17(H) << "\n";
    summary << "r0=" << fmt17(radii.r0) << "\n";
    summary << "R0=" << fmt17(radii.R0) << "\n";
    summary << "R_H=" << fmt17(radii.R_H) << "\n";
  }
}

void run_pullback(const RunConfig& cfg, const RunOptions& opt, const Context& ctx,
                  const std::filesystem::path& dir, std::ostringstream& summary) {
  const double H = pick_quad_horizon(cfg, ctx.ou->grid);
  const ConstantsBundle radii = absorbing_radius(*ctx.ou, ctx.pack, ctx.constants, H);
  const double rho =
      cfg.experiment.cloud_rho > 0.0 ? cfg.experiment.cloud_rho : 10.0 * radii.R_H;
  std::vector<StateTriple> cloud0 =
      sample_cloud(ctx.grid, cfg.experiment.cloud_members, rho, cfg.experiment.cloud_seed,
                   cfg.experiment.cloud_max_mode);

  PullbackSpec ps;
  ps.horizons = cfg.experiment.horizons;
  ps.solve = cfg.solve;
  ps.threads = opt.threads;
  PullbackReport report =
      ps.horizons.size() >= 4
          ? attractor_estimate(ps, cfg.params, ctx.grid, ctx.ou, cloud0, radii.R_H)
          : pullback_cloud(ps, cfg.params, ctx.grid, ctx.ou, cloud0, radii.R_H);

  std::filesystem::create_directories(dir / "pullback");
  {
    std::ostringstream csv;
    csv << "horizon,member,norm\n";
    for (const HorizonResult& row : report.rows)
      for (std::size_t m = 0; m < row.member_norms.size(); ++m)
        csv << fmt17(row.horizon) << ',' << m << ',' << fmt17(row.member_norms[m]) << '\n';
    write_text(dir / "pullback" / "members.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "horizon,radius,absorbed,semidistance\n";
    for (const HorizonResult& row : report.rows)
      csv << fmt17(row.horizon) << ',' << fmt17(row.radius) << ',' << (row.absorbed ? 1 : 0)
          << ',' << fmt17(row.semidistance) << '\n';
    write_text(dir / "pullback" / "semidistance.csv", csv.str());
  }

  summary << "quad_horizon=" << fmt17(H) << "\n";
  summary << "r0=" << fmt17(radii.r0) << "\n";
  summary << "R0=" << fmt17(radii.R0) << "\n";
  summary << "R_H=" << fmt17(radii.R_H) << "\n";
  summary << "cloud_rho=" << fmt17(rho) << "\n";
  summary << "cloud_members=" << cloud0.size() << "\n";
  double t_absorbed = -1.0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    bool all_later = true;
    for (std::size_t j = i; j < report.rows.size(); ++j)
      all_later = all_later && report.rows[j].absorbed;
    if (all_later) {
      t_absorbed = report.rows[i].horizon;
      break;
    }
  }
  summary << "absorbed_from_horizon=" << fmt17(t_absorbed) << "\n";
  for (const HorizonResult& row : report.rows) {
    summary << "radius_t" << fmt17(row.horizon) << "=" << fmt17(row.radius) << "\n";
    if (std::isfinite(row.semidistance))
      summary << "semidistance_t" << fmt17(row.horizon) << "=" << fmt17(row.semidistance)
              << "\n";
  }
  if (report.rows.size() >= 4)
    summary << "resolution=" << fmt17(report.resolution) << "\n";
  summary << "warnings=" << report.warnings.size() << "\n";
}

void run_convergence(const RunConfig& cfg, const RunOptions&, const Context& ctx,
                     const std::filesystem::path&, std::ostringstream& summary) {
  Integrator integ(ctx.grid, cfg.params, ctx.ou);
  const StateTriple g0 = initial_state(cfg, ctx);
  const double t = cfg.experiment.probe_t, s = cfg.experiment.probe_s;
  std::vector<double> errs;
  for (double dt : cfg.experiment.dt_list) {
    SolveSpec how = cfg.solve;
    how.dt = dt;
    const StateTriple direct = integ.cocycle_apply(how, t + s, 0.0, g0);
    const StateTriple first = integ.cocycle_apply(how, s, 0.0, g0);
    const StateTriple composed = integ.cocycle_apply(how, t, s, first);
    errs.push_back(state_distance(direct, composed));
  }
  for (std::size_t i = 0; i < errs.size(); ++i) {
    summary << "dt" << i << "=" << fmt17(cfg.experiment.dt_list[i]) << "\n";
    summary << "cocycle_defect" << i << "=" << fmt17(errs[i]) << "\n";
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double num = std::log(errs[i] / errs[i + 1]);
    const double den = std::log(cfg.experiment.dt_list[i] / cfg.experiment.dt_list[i + 1]);
    summary << "observed_order" << i << "="
            << fmt17(errs[i + 1] > 0.0 && den != 0.0 ? num / den
                                                     : std::numeric_limits<double>::quiet_NaN())
            << "\n";
  }
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  if (opt.out_dir.empty()) throw std::invalid_argument("run: output directory is required");
  if (opt.threads < 1) throw std::invalid_argument("run: threads must be >= 1");
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  Context ctx = build_context(cfg, opt);

  // Manifest: a comment header plus the normalized config, so the manifest
  // itself is a valid config reproducing this run.
  {
    std::ostringstream m;
    m << "# hr " << kVersion << " run manifest\n";
    m << "# experiment: " << experiment_name(cfg.experiment.kind) << "\n";
    m << "# noise source: "
      << (opt.noise_file.empty() ? std::string("sampled from seed") : opt.noise_file) << "\n";
    std::istringstream cl(constants_text(ctx.constants));
    std::string line;
    while (std::getline(cl, line)) m << "# constants " << line << "\n";
    m << "\n" << write_config(cfg);
    write_text(dir / "manifest.txt", m.str());
  }

  std::ostringstream summary;
  summary << "version=" << kVersion << "\n";
  summary << "experiment=" << experiment_name(cfg.experiment.kind) << "\n";
  summary << "seed=" << cfg.noise.seed << "\n";
  append_constants(summary, ctx.constants);

  switch (cfg.experiment.kind) {
    case ExperimentKind::simulate:
      run_simulate(cfg, ctx, dir, summary, /*with_radii=*/false);
      break;
    case ExperimentKind::diagnose:
      run_simulate(cfg, ctx, dir, summary, /*with_radii=*/true);
      break;
    case ExperimentKind::pullback:
      run_pullback(cfg, opt, ctx, dir, summary);
      break;
    case ExperimentKind::convergence:
      run_convergence(cfg, opt, ctx, dir, summary);
      break;
  }

  RunResult result;
  result.out_dir = opt.out_dir;
  result.summary = summary.str();
  write_text(dir / "summary.txt", result.summary);
  return result;
}

}  // namespace hr
