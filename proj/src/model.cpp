#include "hr/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hr {

namespace {
void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0)
    throw std::invalid_argument(std::string("params: ") + name +
                                " must be a positive finite number, got " +
                                std::to_string(value));
}
}  // namespace

void Params::validate() const {
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(d3, "d3");
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(q, "q");
  require_positive(r, "r");
  require_positive(J, "J");
  require_positive(kappa, "kappa");
  if (!std::isfinite(c)) throw std::invalid_argument("params: c must be finite");
  for (int ch = 0; ch < 3; ++ch) {
    if (!std::isfinite(profiles[ch].amplitude))
      throw std::invalid_argument("params: profile amplitude for channel " +
                                  std::to_string(ch + 1) + " must be finite");
    for (int ax = 0; ax < 2; ++ax)
      if (profiles[ch].modes[ax] < 0)
        throw std::invalid_argument("params: profile mode for channel " +
                                    std::to_string(ch + 1) + " must be non-negative");
  }
}

StateTriple make_state(std::shared_ptr<const Grid> grid, Role role, double fill) {
  StateTriple s;
  s.role = role;
  for (int ch = 0; ch < 3; ++ch) s.f[ch] = make_field(grid, fill);
  return s;
}

ProfilePack make_profile_pack(const Params& params, std::shared_ptr<const Grid> grid) {
  params.validate();
  ProfilePack pack;
  for (int ch = 0; ch < 3; ++ch) {
    pack.p[ch] = eval_profile(grid, params.profiles[ch]);
    pack.h_l2[ch] = norm_l2(pack.p[ch].h);
    pack.h_l4[ch] = norm_l4(pack.p[ch].h);
    pack.lap_h_l2[ch] = norm_l2(pack.p[ch].lap_h);
  }
  return pack;
}

ScalarField phi(const Params& params, const ScalarField& u) {
  ScalarField out = make_field(u.grid);
  for (std::size_t k = 0; k < u.v.size(); ++k) {
    const double x = u.v[k];
    out.v[k] = (params.a - params.b * x) * x * x;
  }
  return out;
}

ScalarField psi(const Params& params, const ScalarField& u) {
  ScalarField out = make_field(u.grid);
  for (std::size_t k = 0; k < u.v.size(); ++k)
    out.v[k] = params.alpha - params.beta * u.v[k] * u.v[k];
  return out;
}

namespace {
void require_role(const StateTriple& s, Role want, const char* who) {
  if (s.role != want)
    throw std::invalid_argument(std::string(who) + ": state has the wrong role tag (" +
                                (s.role == Role::original ? "original" : "transformed") +
                                " passed where " +
                                (want == Role::original ? "original" : "transformed") +
                                " is required)");
}

std::shared_ptr<const Grid> state_grid(const StateTriple& s, const char* who) {
  for (int ch = 0; ch < 3; ++ch) {
    if (!s.f[ch].grid || s.f[ch].v.size() != s.f[ch].grid->size())
      throw std::invalid_argument(std::string(who) + ": malformed state component " +
                                  std::to_string(ch + 1));
    if (s.f[ch].grid.get() != s.f[0].grid.get())
      throw std::invalid_argument(std::string(who) + ": state components on different grids");
  }
  return s.f[0].grid;
}
}  // namespace

StateTriple drift_original(const Params& params, const StateTriple& g) {
  require_role(g, Role::original, "drift_original");
  auto grid = state_grid(g, "drift_original");
  StateTriple out = make_state(grid, Role::original);
  ScalarField lap;
  const std::size_t n = grid->size();

  laplacian_neumann(g.f[0], lap);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = g.f[0].v[k];
    out.f[0].v[k] = params.d1 * lap.v[k] + (params.a - params.b * u) * u * u +
                    g.f[1].v[k] - g.f[2].v[k] + params.J;
  }
  laplacian_neumann(g.f[1], lap);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = g.f[0].v[k];
    out.f[1].v[k] = params.d2 * lap.v[k] + params.alpha - params.beta * u * u - g.f[1].v[k];
  }
  laplacian_neumann(g.f[2], lap);
  for (std::size_t k = 0; k < n; ++k)
    out.f[2].v[k] = params.d3 * lap.v[k] + params.q * (g.f[0].v[k] - params.c) -
                    params.r * g.f[2].v[k];
  return out;
}

StateTriple tendency_transformed(const Params& params, const ProfilePack& pack,
                                 const StateTriple& G, const std::array<double, 3>& gamma) {
  require_role(G, Role::transformed, "tendency_transformed");
  auto grid = state_grid(G, "tendency_transformed");
  if (pack.p[0].h.grid.get() != grid.get())
    throw std::invalid_argument("tendency_transformed: profile pack built on a different grid");
  StateTriple out = make_state(grid, Role::transformed);
  ScalarField lap;
  const std::size_t n = grid->size();
  const double g1 = gamma[0], g2 = gamma[1], g3 = gamma[2];

  laplacian_neumann(G.f[0], lap);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = G.f[0].v[k] + g1 * pack.p[0].h.v[k];
    const double v = G.f[1].v[k] + g2 * pack.p[1].h.v[k];
    const double z = G.f[2].v[k] + g3 * pack.p[2].h.v[k];
    out.f[0].v[k] = params.d1 * (lap.v[k] + g1 * pack.p[0].lap_h.v[k]) +
                    (params.a - params.b * u) * u * u + v - z + params.J +
                    params.kappa * g1 * pack.p[0].h.v[k];
  }
  laplacian_neumann(G.f[1], lap);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = G.f[0].v[k] + g1 * pack.p[0].h.v[k];
    const double v = G.f[1].v[k] + g2 * pack.p[1].h.v[k];
    out.f[1].v[k] = params.d2 * (lap.v[k] + g2 * pack.p[1].lap_h.v[k]) + params.alpha -
                    params.beta * u * u - v + params.kappa * g2 * pack.p[1].h.v[k];
  }
  laplacian_neumann(G.f[2], lap);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = G.f[0].v[k] + g1 * pack.p[0].h.v[k];
    const double z = G.f[2].v[k] + g3 * pack.p[2].h.v[k];
    out.f[2].v[k] = params.d3 * (lap.v[k] + g3 * pack.p[2].lap_h.v[k]) +
                    params.q * (u - params.c) - params.r * z +
                    params.kappa * g3 * pack.p[2].h.v[k];
  }
  return out;
}

namespace {
StateTriple add_lift(const StateTriple& s, const ProfilePack& pack,
                     const std::array<double, 3>& gamma, double sign, Role out_role,
                     const char* who) {
  auto grid = state_grid(s, who);
  if (pack.p[0].h.grid.get() != grid.get())
    throw std::invalid_argument(std::string(who) + ": profile pack built on a different grid");
  StateTriple out = make_state(grid, out_role);
  for (int ch = 0; ch < 3; ++ch) {
    const double gs = sign * gamma[ch];
    for (std::size_t k = 0; k < s.f[ch].v.size(); ++k)
      out.f[ch].v[k] = s.f[ch].v[k] + gs * pack.p[ch].h.v[k];
  }
  return out;
}
}  // namespace

StateTriple to_transformed(const StateTriple& g, const ProfilePack& pack,
                           const std::array<double, 3>& gamma) {
  require_role(g, Role::original, "to_transformed");
  return add_lift(g, pack, gamma, -1.0, Role::transformed, "to_transformed");
}

StateTriple to_original(const StateTriple& G, const ProfilePack& pack,
                        const std::array<double, 3>& gamma) {
  require_role(G, Role::transformed, "to_original");
  return add_lift(G, pack, gamma, +1.0, Role::original, "to_original");
}

double state_norm(const StateTriple& g) {
  double s = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    const double n = norm_l2(g.f[ch]);
    s += n * n;
  }
  return std::sqrt(s);
}

double state_distance(const StateTriple& a, const StateTriple& b) {
  if (a.f[0].grid.get() != b.f[0].grid.get())
    throw std::invalid_argument("state_distance: states live on different grids");
  if (a.role != b.role)
    throw std::invalid_argument("state_distance: states carry different roles");
  const std::vector<double>& w = a.f[0].grid->weights();
  double s = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    const std::vector<double>& x = a.f[ch].v;
    const std::vector<double>& y = b.f[ch].v;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - y[k];
      s += w[k] * d * d;
    }
  }
  return std::sqrt(s);
}

}  // namespace hr
