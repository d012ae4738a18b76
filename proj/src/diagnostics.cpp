#include "hr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hr {

namespace {
std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

ConstantsBundle compute_constants(const Params& params, const ProfilePack& pack,
                                  const std::shared_ptr<const Grid>& grid) {
  params.validate();
  if (!grid) throw std::invalid_argument("compute_constants: null grid");

  ConstantsBundle cb;
  const double a = params.a, b = params.b, beta = params.beta, alpha = params.alpha;
  const double q = params.q, r = params.r, J = params.J, c = params.c;
  const double kap = params.kappa;

  cb.c1 = (1.0 / b) * (2.0 * beta * beta + 11.0 / 8.0);
  cb.sigma = std::min(1.0, r);
  cb.d_min = std::min(params.d1, std::min(params.d2, params.d3));
  const double inner = 4.0 * cb.c1 * cb.c1 + 3.0 * cb.c1 * cb.c1 / (2.0 * r) + 3.0 * q * q / r;
  cb.Ncal = 2.0 * std::pow(cb.c1 * a, 4) + J * J / 2.0 + 3.0 * alpha * alpha +
            3.0 * q * q * c * c / r + inner * inner;
  cb.F = 2.0 * cb.Ncal + cb.c1 * cb.c1 / 16.0;
  cb.domain_volume = grid->extent(0) * (grid->dimension() == 2 ? grid->extent(1) : 1.0);

  // The lift-coupling terms of the energy balance are, with gamma = Gamma(t),
  //   T1 = int c1 U [d1 lap(h1) g1 + kappa g1 h1 + g2 h2 - g3 h3]
  //   T2 = int    V [d2 lap(h2) g2 + (kappa - 1) g2 h2]
  //   T3 = int    Z [d3 lap(h3) g3 + q g1 h1 + (kappa - r) g3 h3].
  // Cauchy-Schwarz in space and then over the channel vector (g1,g2,g3) gives
  //   T1 <= c1 |U| S_U |gamma|,  S_U^2 = (d1|lap h1| + kappa|h1|)^2 + |h2|^2 + |h3|^2,
  //   T2 <=    |V| S_V |g2|,     S_V   =  d2|lap h2| + |kappa-1| |h2|,
  //   T3 <=    |Z| S_Z |gamma|,  S_Z^2 = q^2 |h1|^2 + (d3|lap h3| + |kappa-r| |h3|)^2.
  // Young's inequality with the weights used by the dissipativity estimate
  // (c1^2/2 on |U|^2, 1/12 on |V|^2, r/6 on |Z|^2) yields
  //   T1 + T2 + T3 <= c(h)|gamma|^2 + (c1^2/2)|U|^2 + (1/12)|V|^2 + (r/6)|Z|^2
  // with c(h) = S_U^2/2 + 3 S_V^2 + (3/(2r)) S_Z^2.
  const double su2 = std::pow(params.d1 * pack.lap_h_l2[0] + kap * pack.h_l2[0], 2) +
                     pack.h_l2[1] * pack.h_l2[1] + pack.h_l2[2] * pack.h_l2[2];
  const double sv = params.d2 * pack.lap_h_l2[1] + std::abs(kap - 1.0) * pack.h_l2[1];
  const double sz2 = q * q * pack.h_l2[0] * pack.h_l2[0] +
                     std::pow(params.d3 * pack.lap_h_l2[2] + std::abs(kap - r) * pack.h_l2[2], 2);
  cb.c_h = 0.5 * su2 + 3.0 * sv * sv + (3.0 / (2.0 * r)) * sz2;

  // The assembled inequality majorizes the lift norms by powers of |gamma|:
  //   |Gamma^h|^2        = sum g_i^2 |h_i|^2       <= max_i |h_i|^2     |gamma|^2,
  //   |Gamma^h|_{L4}^4   = sum g_i^4 |h_i|_{L4}^4  <= max_i |h_i|_{L4}^4 |gamma|^4,
  // so the right-hand side 2c(h)|gamma|^2 + 4(c1 b)^4 |Gamma^h|_{L4}^4
  // + 2[2 beta^2 + (c1 a)^2 + 1/4] |Gamma^h|^2 + F|Omega| is bounded by
  // coeff_quad |gamma|^2 + coeff_quart |gamma|^4 + F|Omega|, and C_bound =
  // max of the two coefficients dominates both powers at once.
  const double h2max = std::max({pack.h_l2[0], pack.h_l2[1], pack.h_l2[2]});
  const double h4max = std::max({pack.h_l4[0], pack.h_l4[1], pack.h_l4[2]});
  cb.coeff_quad = 2.0 * cb.c_h +
                  2.0 * (2.0 * beta * beta + std::pow(cb.c1 * a, 2) + 0.25) * h2max * h2max;
  cb.coeff_quart = 4.0 * std::pow(cb.c1 * b, 4) * std::pow(h4max, 4);
  cb.C_bound = std::max(cb.coeff_quad, cb.coeff_quart);

  cb.r0 = std::numeric_limits<double>::quiet_NaN();
  cb.R0 = std::numeric_limits<double>::quiet_NaN();
  cb.R_H = std::numeric_limits<double>::quiet_NaN();
  return cb;
}

std::string constants_text(const ConstantsBundle& cb) {
  std::string out;
  auto kv = [&](const char* key, double val) {
    out += key;
    out += '=';
    out += fmt17(val);
    out += '\n';
  };
  kv("c1", cb.c1);
  kv("sigma", cb.sigma);
  kv("d_min", cb.d_min);
  kv("N", cb.Ncal);
  kv("F", cb.F);
  kv("c_h", cb.c_h);
  kv("coeff_quad", cb.coeff_quad);
  kv("coeff_quart", cb.coeff_quart);
  kv("C_bound", cb.C_bound);
  kv("domain_volume", cb.domain_volume);
  if (std::isfinite(cb.r0)) {
    kv("r0", cb.r0);
    kv("R0", cb.R0);
    kv("R_H", cb.R_H);
  }
  return out;
}

EnergyReport energy_series(const Trajectory& traj, const ConstantsBundle& constants,
                           double c_scale) {
  if (traj.states.size() < 3)
    throw std::invalid_argument("energy_series: need at least 3 snapshots");
  if (!(c_scale > 0.0)) throw std::invalid_argument("energy_series: c_scale must be positive");
  ProfilePack pack = make_profile_pack(traj.params, traj.grid);

  EnergyReport rep;
  rep.constants = constants;
  rep.c_scale = c_scale;
  const std::size_t n = traj.states.size();
  rep.rows.resize(n);
  const double c1 = constants.c1, sigma = constants.sigma;
  const double fvol = constants.F * constants.domain_volume;

  for (std::size_t k = 0; k < n; ++k) {
    const StateTriple& G = traj.states[k];
    if (G.role != Role::transformed)
      throw std::invalid_argument("energy_series: trajectory snapshots must be transformed");
    EnergyRow& row = rep.rows[k];
    row.t = traj.times[k];
    const double nu = norm_l2(G.f[0]), nv = norm_l2(G.f[1]), nz = norm_l2(G.f[2]);
    row.energy = c1 * nu * nu + nv * nv + nz * nz;
    const double gu = seminorm_h1(G.f[0]), gv = seminorm_h1(G.f[1]), gz = seminorm_h1(G.f[2]);
    row.grad_energy = c1 * gu * gu + gv * gv + gz * gz;
    row.u_l4_4 = std::pow(norm_l4(G.f[0]), 4);
    const std::array<double, 3>& g = traj.gammas[k];
    row.gamma_sq = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
    row.gamma_4 = row.gamma_sq * row.gamma_sq;
    row.lift_l2_sq = 0.0;
    row.lift_l4_4 = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      row.lift_l2_sq += g[ch] * g[ch] * pack.h_l2[ch] * pack.h_l2[ch];
      row.lift_l4_4 += std::pow(g[ch], 4) * std::pow(pack.h_l4[ch], 4);
    }
    row.bound = c_scale * constants.C_bound * (row.gamma_sq + row.gamma_4) + fvol;
  }

  for (std::size_t k = 0; k < n; ++k) {
    EnergyRow& row = rep.rows[k];
    if (k == 0) {
      row.dEdt = (rep.rows[1].energy - rep.rows[0].energy) / (rep.rows[1].t - rep.rows[0].t);
      row.interior = false;
    } else if (k == n - 1) {
      row.dEdt = (rep.rows[k].energy - rep.rows[k - 1].energy) /
                 (rep.rows[k].t - rep.rows[k - 1].t);
      row.interior = false;
    } else {
      // Divided-difference centered derivative, exact for parabolas even on
      // unevenly spaced snapshots.
      const double dl = rep.rows[k].t - rep.rows[k - 1].t;
      const double dr = rep.rows[k + 1].t - rep.rows[k].t;
      const double sl = (rep.rows[k].energy - rep.rows[k - 1].energy) / dl;
      const double sr = (rep.rows[k + 1].energy - rep.rows[k].energy) / dr;
      row.dEdt = (sl * dr + sr * dl) / (dl + dr);
      row.interior = true;
    }
    row.residual = row.dEdt + sigma * row.energy - row.bound;
  }
  return rep;
}

void write_energy_csv(const std::string& path, const EnergyReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_energy_csv: cannot open " + path);
  out << "t,energy,grad_energy,u_l4_4,gamma_sq,gamma_4,lift_l2_sq,lift_l4_4,"
         "dEdt,bound,residual,interior\n";
  for (const EnergyRow& r : report.rows) {
    out << fmt17(r.t) << ',' << fmt17(r.energy) << ',' << fmt17(r.grad_energy) << ','
        << fmt17(r.u_l4_4) << ',' << fmt17(r.gamma_sq) << ',' << fmt17(r.gamma_4) << ','
        << fmt17(r.lift_l2_sq) << ',' << fmt17(r.lift_l4_4) << ',' << fmt17(r.dEdt) << ','
        << fmt17(r.bound) << ',' << fmt17(r.residual) << ',' << (r.interior ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write_energy_csv: write failed for " + path);
}

ConstantsBundle absorbing_radius(const OUPath& ou, const ProfilePack& pack,
                                 const ConstantsBundle& constants, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("absorbing_radius: horizon must be positive and finite");
  const double sigma = constants.sigma;
  const double tail = std::exp(-sigma * horizon);
  if (tail > 1e-6)
    throw std::invalid_argument(
        "absorbing_radius: quadrature horizon too short (tail weight exp(-sigma*horizon) = " +
        std::to_string(tail) + " > 1e-6); need horizon >= 20/sigma");
  const TimeGrid& tg = ou.grid;
  const std::size_t i_far = tg.index(-horizon);
  const std::size_t i_one = tg.index(-1.0);
  const std::size_t i_zero = tg.index(0.0);

  auto integrand = [&](std::size_t k) {
    double m2 = 0.0;
    for (int ch = 0; ch < 3; ++ch) m2 += ou.gamma[ch][k] * ou.gamma[ch][k];
    return constants.C_bound * (m2 + m2 * m2) + constants.F * constants.domain_volume;
  };

  // Damped part over [-horizon, -1]: weight exp(sigma (1 + s)).
  double t1 = 0.0;
  for (std::size_t k = i_far; k <= i_one; ++k) {
    const double s = tg.time(k);
    const double w = std::exp(sigma * (1.0 + s)) * integrand(k);
    t1 += (k == i_far || k == i_one) ? 0.5 * w : w;
  }
  t1 *= tg.dt;
  // Undamped part over [-1, 0].
  double t2 = 0.0;
  for (std::size_t k = i_one; k <= i_zero; ++k) {
    const double w = integrand(k);
    t2 += (k == i_one || k == i_zero) ? 0.5 * w : w;
  }
  t2 *= tg.dt;

  ConstantsBundle cb = constants;
  const double cmin = std::min(1.0, cb.c1), cmax = std::max(1.0, cb.c1);
  cb.r0 = 1.0 + t1 / cmin;
  cb.R0 = (cmax * cb.r0 + t2) / (std::min(1.0, 2.0 * cb.d_min) * cmin);
  double lift_now = 0.0;
  const std::array<double, 3> g0 = ou.at(0.0);
  for (int ch = 0; ch < 3; ++ch)
    lift_now += g0[ch] * g0[ch] * pack.h_l2[ch] * pack.h_l2[ch];
  cb.R_H = std::sqrt(cb.R0 + lift_now);
  return cb;
}

std::vector<H1Row> h1_report(const Trajectory& traj) {
  std::vector<H1Row> rows;
  rows.reserve(traj.states.size());
  ScalarField lap = make_field(traj.grid);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StateTriple& G = traj.states[k];
    H1Row row;
    row.t = traj.times[k];
    for (int ch = 0; ch < 3; ++ch) {
      const double s = seminorm_h1(G.f[ch]);
      row.grad_sq += s * s;
      laplacian_neumann(G.f[ch], lap);
      const double l = norm_l2(lap);
      row.lap_sq[ch] = l * l;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hr
