#include "hr/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "hr/parallel.hpp"
#include "hr/rng.hpp"

namespace hr {

namespace {
constexpr std::uint64_t kPurposeCloud = 0x434c44;

const double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::vector<StateTriple> sample_cloud(std::shared_ptr<const Grid> grid, int members, double rho,
                                      std::uint64_t seed, int max_mode) {
  if (!grid) throw std::invalid_argument("sample_cloud: null grid");
  if (members < 2) throw std::invalid_argument("sample_cloud: need at least 2 members");
  if (!(rho > 0.0)) throw std::invalid_argument("sample_cloud: rho must be positive");
  if (max_mode < 0) throw std::invalid_argument("sample_cloud: max_mode must be >= 0");

  const int modes_y = grid->dimension() == 2 ? max_mode + 1 : 1;
  const int modes_per_comp = (max_mode + 1) * modes_y;
  const int dof = 3 * modes_per_comp;

  std::vector<StateTriple> cloud;
  cloud.reserve(static_cast<std::size_t>(members));
  for (int m = 0; m < members; ++m) {
    GaussianStream gs(seed, kPurposeCloud, static_cast<std::uint64_t>(m));
    StateTriple g = make_state(grid, Role::original);
    for (int ch = 0; ch < 3; ++ch) {
      for (int kx = 0; kx <= max_mode; ++kx) {
        for (int ky = 0; ky < modes_y; ++ky) {
          const double coef = gs.next();
          ProfileField mode = eval_profile(grid, NoiseProfile{{kx, ky}, coef});
          for (std::size_t j = 0; j < mode.h.v.size(); ++j) g.f[ch].v[j] += mode.h.v[j];
        }
      }
    }
    // Gaussian coefficients give a uniform direction in the mode subspace;
    // the radius factor u^{1/dof} makes the sample uniform in the ball.
    const double u = gs.uniform01();
    const double target = rho * std::pow(u, 1.0 / static_cast<double>(dof));
    const double nrm = state_norm(g);
    const double scale = nrm > 1e-300 ? target / nrm : 0.0;
    for (int ch = 0; ch < 3; ++ch)
      for (double& val : g.f[ch].v) val *= scale;
    cloud.push_back(std::move(g));
  }
  return cloud;
}

PullbackReport pullback_cloud(const PullbackSpec& spec, const Params& params,
                              std::shared_ptr<const Grid> grid,
                              std::shared_ptr<const OUPath> ou,
                              const std::vector<StateTriple>& cloud0, double R_H) {
  if (!grid) throw std::invalid_argument("pullback_cloud: null grid");
  if (!ou) throw std::invalid_argument("pullback_cloud: null noise path");
  if (cloud0.size() < 2) throw std::invalid_argument("pullback_cloud: need at least 2 members");
  if (spec.horizons.empty()) throw std::invalid_argument("pullback_cloud: no horizons");
  for (std::size_t i = 0; i < spec.horizons.size(); ++i) {
    if (!(spec.horizons[i] > 0.0))
      throw std::invalid_argument("pullback_cloud: horizons must be positive");
    if (i > 0 && !(spec.horizons[i] > spec.horizons[i - 1]))
      throw std::invalid_argument("pullback_cloud: horizons must be strictly increasing");
    // Raises if -t is off the master path: every horizon must lie on it.
    ou->grid.index(-spec.horizons[i]);
  }
  ou->grid.index(0.0);
  for (const StateTriple& g : cloud0)
    if (g.role != Role::original)
      throw std::invalid_argument("pullback_cloud: cloud members must be original-role states");

  const std::size_t members = cloud0.size();
  PullbackReport report;
  report.R_H = R_H;
  report.rows.resize(spec.horizons.size());

  for (std::size_t hi = 0; hi < spec.horizons.size(); ++hi) {
    const double t = spec.horizons[hi];
    HorizonResult& row = report.rows[hi];
    row.horizon = t;
    row.semidistance = kNaN;
    row.member_norms.assign(members, 0.0);
    row.cloud.assign(members, StateTriple{});

    const int nthreads = std::max(1, spec.threads);
    std::vector<std::unique_ptr<Integrator>> workers(
        static_cast<std::size_t>(std::min<std::size_t>(nthreads, members)));
    parallel_for_indexed(members, nthreads, [&](std::size_t m, std::size_t tid) {
      if (!workers[tid]) workers[tid] = std::make_unique<Integrator>(grid, params, ou);
      StateTriple at_zero = workers[tid]->cocycle_apply(spec.solve, t, -t, cloud0[m]);
      row.member_norms[m] = state_norm(at_zero);
      row.cloud[m] = std::move(at_zero);
    });

    row.radius = *std::max_element(row.member_norms.begin(), row.member_norms.end());
    row.absorbed = std::isfinite(R_H) && row.radius <= R_H;
  }
  return report;
}

double hausdorff_semidistance(const std::vector<StateTriple>& A,
                              const std::vector<StateTriple>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("hausdorff_semidistance: clouds must be nonempty");
  const Grid* ga = A.front().f[0].grid.get();
  for (const StateTriple& g : A)
    if (g.f[0].grid.get() != ga)
      throw std::invalid_argument("hausdorff_semidistance: mixed grids in cloud");
  for (const StateTriple& g : B)
    if (g.f[0].grid.get() != ga)
      throw std::invalid_argument("hausdorff_semidistance: clouds live on different grids");
  double worst = 0.0;
  for (const StateTriple& a : A) {
    double best = std::numeric_limits<double>::infinity();
    for (const StateTriple& b : B) best = std::min(best, state_distance(a, b));
    worst = std::max(worst, best);
  }
  return worst;
}

PullbackReport attractor_estimate(const PullbackSpec& spec, const Params& params,
                                  std::shared_ptr<const Grid> grid,
                                  std::shared_ptr<const OUPath> ou,
                                  const std::vector<StateTriple>& cloud0, double R_H) {
  if (spec.horizons.size() < 4)
    throw std::invalid_argument("attractor_estimate: need at least 4 horizons");
  PullbackReport report = pullback_cloud(spec, params, grid, ou, cloud0, R_H);
  const std::vector<StateTriple>& reference = report.rows.back().cloud;
  for (HorizonResult& row : report.rows)
    row.semidistance = hausdorff_semidistance(row.cloud, reference);
  report.resolution = report.rows[report.rows.size() - 2].semidistance;
  for (std::size_t i = 1; i + 1 < report.rows.size(); ++i) {
    const double prev = report.rows[i - 1].semidistance;
    const double cur = report.rows[i].semidistance;
    if (cur > 1.1 * prev && cur - prev > 1e-12)
      report.warnings.push_back(
          "semidistance grew from " + std::to_string(prev) + " at horizon " +
          std::to_string(report.rows[i - 1].horizon) + " to " + std::to_string(cur) +
          " at horizon " + std::to_string(report.rows[i].horizon) +
          " (cloud sampling noise)");
  }
  return report;
}

}  // namespace hr
