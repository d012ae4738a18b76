#pragma once
// Energy functionals, the explicit dissipativity constants, residual checks of
// the Gronwall-type energy inequality, absorbing-set radii, and H1 norms.

#include <string>
#include <vector>

#include "hr/model.hpp"
#include "hr/noise.hpp"
#include "hr/solver.hpp"

namespace hr {

// Every constant of the dissipativity estimate, evaluated from the model
// parameters and the noise profiles.  The radii r0/R0/R_H depend on a noise
// path and a quadrature horizon; compute_constants leaves them NaN and
// absorbing_radius fills them in.
struct ConstantsBundle {
  double c1 = 0.0;             // (1/b)(2 beta^2 + 11/8)
  double sigma = 0.0;          // min{1, r}
  double d_min = 0.0;          // min{d1, d2, d3}
  double Ncal = 0.0;           // interior bracket of the constant forcing term
  double F = 0.0;              // 2 Ncal + c1^2/16
  double c_h = 0.0;            // lift-coupling trace (see compute_constants)
  double coeff_quad = 0.0;     // multiplies |Gamma|^2 in the bound
  double coeff_quart = 0.0;    // multiplies |Gamma|^4 in the bound
  double C_bound = 0.0;        // max(coeff_quad, coeff_quart)
  double domain_volume = 0.0;  // |Omega|, product of the extents
  double r0 = 0.0;             // path-dependent absorbing radii (NaN until
  double R0 = 0.0;             //   absorbing_radius has run)
  double R_H = 0.0;
};

ConstantsBundle compute_constants(const Params& params, const ProfilePack& pack,
                                  const std::shared_ptr<const Grid>& grid);

// Flat key=value block (17 significant digits) for manifests and diffing.
std::string constants_text(const ConstantsBundle& cb);

struct EnergyRow {
  double t = 0.0;
  double energy = 0.0;       // E = c1|U|^2 + |V|^2 + |Z|^2      (L2 squared)
  double grad_energy = 0.0;  // c1|grad U|^2 + |grad V|^2 + |grad Z|^2
  double u_l4_4 = 0.0;       // |U|_{L4}^4
  double gamma_sq = 0.0;     // |Gamma(t)|^2 over the three channels
  double gamma_4 = 0.0;      // |Gamma(t)|^4
  double lift_l2_sq = 0.0;   // |Gamma^h(t)|^2 = sum gamma_i^2 |h_i|^2
  double lift_l4_4 = 0.0;    // sum gamma_i^4 |h_i|_{L4}^4
  double dEdt = 0.0;         // divided difference (one-sided at the ends)
  double bound = 0.0;        // c_scale C_bound (|Gamma|^2 + |Gamma|^4) + F|Omega|
  double residual = 0.0;     // dEdt + sigma E - bound; expected <= 0 + tol
  bool interior = false;     // centered difference (endpoints are one-sided)
};

struct EnergyReport {
  std::vector<EnergyRow> rows;
  ConstantsBundle constants;
  double c_scale = 1.0;
};

// Evaluates the energy balance along a trajectory.  c_scale multiplies
// C_bound in the reported bound (the inequality must also hold, with margin,
// when the constant is enlarged).
EnergyReport energy_series(const Trajectory& traj, const ConstantsBundle& constants,
                           double c_scale = 1.0);

void write_energy_csv(const std::string& path, const EnergyReport& report);

// Quadrature of the two exponentially damped integrals behind the absorbing
// radii, on the noise grid over [-horizon, 0].  Returns a copy of `constants`
// with r0, R0, R_H filled in.  The integral tail beyond the horizon must be
// negligible: exp(-sigma horizon) <= 1e-6, which holds for horizon >= 20/sigma.
ConstantsBundle absorbing_radius(const OUPath& ou, const ProfilePack& pack,
                                 const ConstantsBundle& constants, double horizon);

struct H1Row {
  double t = 0.0;
  double grad_sq = 0.0;            // |grad U|^2 + |grad V|^2 + |grad Z|^2
  std::array<double, 3> lap_sq{};  // |lap U|^2, |lap V|^2, |lap Z|^2
};

// Gradient and discrete-Laplacian norms of the stored (transformed) snapshots;
// an empirical check that pullback orbits stay bounded in H1.
std::vector<H1Row> h1_report(const Trajectory& traj);

}  // namespace hr
