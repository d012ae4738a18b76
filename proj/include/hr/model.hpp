#pragma once
// Hindmarsh-Rose reaction-diffusion right-hand sides on a grid:
//   du = d1 lap(u) + phi(u) + v - z + J,   phi(u) = a u^2 - b u^3
//   dv = d2 lap(v) + psi(u) - v,           psi(u) = alpha - beta u^2
//   dz = d3 lap(z) + q (u - c) - r z
// plus the additive conversion u = U + Gamma_1^h etc. that turns the
// stochastically forced system into a pathwise (random) PDE, and the tendency
// of that transformed system.

#include <array>
#include <memory>

#include "hr/grid.hpp"
#include "hr/noise.hpp"

namespace hr {

struct Params {
  double d1 = 0.1, d2 = 0.1, d3 = 0.1;
  double a = 3.0, b = 1.0;
  double alpha = 1.0, beta = 5.0;
  double q = 0.01, r = 0.006;
  double J = 2.0;
  double c = -1.6;
  double kappa = 1.0;
  std::array<NoiseProfile, 3> profiles = {NoiseProfile{{1, 0}, 0.1},
                                          NoiseProfile{{2, 0}, 0.1},
                                          NoiseProfile{{0, 0}, 0.1}};

  void validate() const;  // throws std::invalid_argument naming the field
};

enum class Role { original, transformed };

struct StateTriple {
  std::array<ScalarField, 3> f;
  Role role = Role::original;
};

StateTriple make_state(std::shared_ptr<const Grid> grid, Role role, double fill = 0.0);

// Profiles evaluated once per run: h_i, analytic lap h_i, and their norms.
struct ProfilePack {
  std::array<ProfileField, 3> p;
  std::array<double, 3> h_l2 = {0, 0, 0};
  std::array<double, 3> h_l4 = {0, 0, 0};
  std::array<double, 3> lap_h_l2 = {0, 0, 0};
};

ProfilePack make_profile_pack(const Params& params, std::shared_ptr<const Grid> grid);

ScalarField phi(const Params& params, const ScalarField& u);
ScalarField psi(const Params& params, const ScalarField& u);

// Tendency of the original (unforced) system; requires an original-role state.
StateTriple drift_original(const Params& params, const StateTriple& g);

// Tendency of the transformed system at OU values gamma; requires a
// transformed-role state.  Uses the analytic lap h_i fields from the pack.
StateTriple tendency_transformed(const Params& params, const ProfilePack& pack,
                                 const StateTriple& G, const std::array<double, 3>& gamma);

// U = u - gamma_1 h_1 etc., and the inverse.
StateTriple to_transformed(const StateTriple& g, const ProfilePack& pack,
                           const std::array<double, 3>& gamma);
StateTriple to_original(const StateTriple& G, const ProfilePack& pack,
                        const std::array<double, 3>& gamma);

// Plain product-space norm sqrt(sum of component L2 norms squared), and the
// distance it induces.  Both states must share a grid and a role.
double state_norm(const StateTriple& g);
double state_distance(const StateTriple& a, const StateTriple& b);

}  // namespace hr
