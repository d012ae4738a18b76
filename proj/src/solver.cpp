#include "hr/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hr {

namespace {
std::int64_t aligned_steps(double span, double dt, const char* who) {
  const double raw = span / dt;
  const double rounded = std::nearbyint(raw);
  if (std::abs(span - rounded * dt) > 1e-9 * dt)
    throw std::invalid_argument(std::string(who) + ": interval length " + std::to_string(span) +
                                " is not an integer multiple of dt = " + std::to_string(dt));
  return static_cast<std::int64_t>(rounded);
}
}  // namespace

Integrator::Integrator(std::shared_ptr<const Grid> grid, const Params& params,
                       std::shared_ptr<const OUPath> ou)
    : grid_(std::move(grid)), params_(params), ou_(std::move(ou)) {
  if (!grid_) throw std::invalid_argument("integrator: null grid");
  if (!ou_) throw std::invalid_argument("integrator: null noise path");
  params_.validate();
  pack_ = make_profile_pack(params_, grid_);
  lap_ = make_field(grid_);
  cg_r_ = make_field(grid_);
  cg_p_ = make_field(grid_);
  cg_ap_ = make_field(grid_);
  work_ = make_state(grid_, Role::transformed);
  stage_ = make_state(grid_, Role::transformed);
}

double Integrator::max_abs_u(const StateTriple& G, const std::array<double, 3>& gamma) const {
  const double g1 = gamma[0];
  const std::vector<double>& h = pack_.p[0].h.v;
  const std::vector<double>& u = G.f[0].v;
  double m = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double val = std::abs(u[k] + g1 * h[k]);
    if (val > m) m = val;
  }
  return m;
}

void Integrator::check_finite(const StateTriple& G, double t, double threshold) const {
  static const char* names[3] = {"u", "v", "z"};
  for (int ch = 0; ch < 3; ++ch) {
    for (double val : G.f[ch].v) {
      if (!std::isfinite(val) || std::abs(val) > threshold)
        throw NumericsError("solution blew up at t = " + std::to_string(t) + " in component " +
                            names[ch] + " (|value| = " + std::to_string(std::abs(val)) +
                            " exceeds " + std::to_string(threshold) + "); reduce dt");
    }
  }
}

void Integrator::explicit_parts(const StateTriple& G, const std::array<double, 3>& gamma,
                                StateTriple& out) {
  const std::size_t n = grid_->size();
  const double g1 = gamma[0], g2 = gamma[1], g3 = gamma[2];
  const double* h1 = pack_.p[0].h.v.data();
  const double* h2 = pack_.p[1].h.v.data();
  const double* h3 = pack_.p[2].h.v.data();
  const double* l1 = pack_.p[0].lap_h.v.data();
  const double* l2 = pack_.p[1].lap_h.v.data();
  const double* l3 = pack_.p[2].lap_h.v.data();
  const double* U = G.f[0].v.data();
  const double* V = G.f[1].v.data();
  const double* Z = G.f[2].v.data();
  double* o1 = out.f[0].v.data();
  double* o2 = out.f[1].v.data();
  double* o3 = out.f[2].v.data();
  const Params& pr = params_;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = U[k] + g1 * h1[k];
    const double v = V[k] + g2 * h2[k];
    const double z = Z[k] + g3 * h3[k];
    const double u2 = u * u;
    o1[k] = pr.d1 * g1 * l1[k] + (pr.a - pr.b * u) * u2 + v - z + pr.J + pr.kappa * g1 * h1[k];
    o2[k] = pr.d2 * g2 * l2[k] + pr.alpha - pr.beta * u2 - v + pr.kappa * g2 * h2[k];
    o3[k] = pr.d3 * g3 * l3[k] + pr.q * (u - pr.c) - pr.r * z + pr.kappa * g3 * h3[k];
  }
}

int Integrator::helmholtz_cg(double coef, const ScalarField& rhs, ScalarField& x, double tol) {
  const std::vector<double>& w = grid_->weights();
  const std::size_t n = grid_->size();
  auto wdot = [&](const ScalarField& f, const ScalarField& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * f.v[k] * g.v[k];
    return s;
  };
  // apply: out = in - coef * lap(in)
  auto apply = [&](const ScalarField& in, ScalarField& out) {
    laplacian_neumann(in, lap_);
    for (std::size_t k = 0; k < n; ++k) out.v[k] = in.v[k] - coef * lap_.v[k];
  };

  const double bnorm = std::sqrt(wdot(rhs, rhs));
  if (bnorm == 0.0) {
    for (std::size_t k = 0; k < n; ++k) x.v[k] = 0.0;
    return 0;
  }
  apply(x, cg_ap_);
  for (std::size_t k = 0; k < n; ++k) cg_r_.v[k] = rhs.v[k] - cg_ap_.v[k];
  cg_p_.v = cg_r_.v;
  double rr = wdot(cg_r_, cg_r_);
  const int maxit = static_cast<int>(10 * n);
  for (int it = 0; it < maxit; ++it) {
    if (std::sqrt(rr) <= tol * bnorm) return it;
    apply(cg_p_, cg_ap_);
    const double pap = wdot(cg_p_, cg_ap_);
    if (!(pap > 0.0))
      throw NumericsError("helmholtz_cg: operator lost positive definiteness (p'Ap = " +
                          std::to_string(pap) + ")");
    const double alpha = rr / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x.v[k] += alpha * cg_p_.v[k];
      cg_r_.v[k] -= alpha * cg_ap_.v[k];
    }
    const double rr_new = wdot(cg_r_, cg_r_);
    const double beta = rr_new / rr;
    for (std::size_t k = 0; k < n; ++k) cg_p_.v[k] = cg_r_.v[k] + beta * cg_p_.v[k];
    rr = rr_new;
  }
  throw NumericsError("helmholtz_cg: no convergence in " + std::to_string(maxit) +
                      " iterations (dt or grid too aggressive)");
}

void Integrator::step_imex(StateTriple& G, const std::array<double, 3>& gamma, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_imex: dt must be positive");
  explicit_parts(G, gamma, work_);
  const double dvals[3] = {params_.d1, params_.d2, params_.d3};
  const std::size_t n = grid_->size();
  for (int ch = 0; ch < 3; ++ch) {
    // rhs goes into the work buffer; the state component is the CG unknown
    // (warm-started at its current value).
    for (std::size_t k = 0; k < n; ++k)
      work_.f[ch].v[k] = G.f[ch].v[k] + dt * work_.f[ch].v[k];
    helmholtz_cg(dt * dvals[ch], work_.f[ch], G.f[ch], cg_tol_);
  }
}

void Integrator::step_rk2(StateTriple& G, const std::array<double, 3>& gamma, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk2: dt must be positive");
  const double dvals[3] = {params_.d1, params_.d2, params_.d3};
  const std::size_t n = grid_->size();
  const double dmax = std::max(params_.d1, std::max(params_.d2, params_.d3));
  if (dt * dmax * grid_->laplacian_bound() > 2.0)
    throw NumericsError("step_rk2: explicit diffusion unstable at dt = " + std::to_string(dt) +
                        "; reduce dt or use imex1");
  // k1 in work_, midpoint state in stage_, k2 overwrites stage_ afterwards.
  explicit_parts(G, gamma, work_);
  for (int ch = 0; ch < 3; ++ch) {
    laplacian_neumann(G.f[ch], lap_);
    for (std::size_t k = 0; k < n; ++k) work_.f[ch].v[k] += dvals[ch] * lap_.v[k];
  }
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t k = 0; k < n; ++k)
      stage_.f[ch].v[k] = G.f[ch].v[k] + dt * work_.f[ch].v[k];
  StateTriple& k2 = stage_;
  {
    // Evaluate the tendency at the predictor, accumulating straight into G.
    StateTriple pred = stage_;  // copy; k2 reuses stage_ storage next
    explicit_parts(pred, gamma, k2);
    for (int ch = 0; ch < 3; ++ch) {
      laplacian_neumann(pred.f[ch], lap_);
      for (std::size_t k = 0; k < n; ++k) k2.f[ch].v[k] += dvals[ch] * lap_.v[k];
    }
  }
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t k = 0; k < n; ++k)
      G.f[ch].v[k] += 0.5 * dt * (work_.f[ch].v[k] + k2.f[ch].v[k]);
}

void Integrator::advance_cell(StateTriple& G, const std::array<double, 3>& gamma, double dt,
                              const SolveSpec& spec, double t_left) {
  const bool imex = spec.stepper == Stepper::imex1;
  auto cfl_of = [&](double step) {
    const double mu = max_abs_u(G, gamma);
    if (!std::isfinite(mu) || mu > spec.blowup_threshold)
      throw NumericsError("solution blew up near t = " + std::to_string(t_left) +
                          " (max |u| = " + std::to_string(mu) + "); reduce dt");
    return step * params_.b * mu * mu;
  };
  if (spec.cfl == CflPolicy::hard_error) {
    const double cfl = cfl_of(dt);
    if (cfl > spec.cfl_limit)
      throw NumericsError("time step violates the cubic stability bound at t = " +
                          std::to_string(t_left) + ": dt*b*max(u^2) = " + std::to_string(cfl) +
                          " > " + std::to_string(spec.cfl_limit) + "; reduce dt");
    if (imex)
      step_imex(G, gamma, dt);
    else
      step_rk2(G, gamma, dt);
    return;
  }
  // Substep policy: split the step into pieces sized from the current state,
  // re-deciding after every piece.  The subdivision is a deterministic
  // function of the state, so runs are bit-reproducible.
  double remaining = dt;
  long guard = 0;
  while (remaining > 0.0) {
    const double mu = max_abs_u(G, gamma);
    if (!std::isfinite(mu) || mu > spec.blowup_threshold)
      throw NumericsError("solution blew up near t = " + std::to_string(t_left) +
                          " (max |u| = " + std::to_string(mu) + "); reduce dt");
    const double denom = params_.b * mu * mu;
    double allowed = denom > 0.0 ? spec.cfl_safety * spec.cfl_limit / denom : remaining;
    if (allowed > remaining) allowed = remaining;
    const double pieces = std::ceil(remaining / allowed - 1e-12);
    const long nsub = pieces < 1.0 ? 1 : static_cast<long>(pieces);
    const double dtm = remaining / static_cast<double>(nsub);
    if (dtm < dt * 0x1p-30)
      throw NumericsError("substep collapsed below dt/2^30 at t = " + std::to_string(t_left) +
                          "; the state is too large for this configuration");
    if (imex)
      step_imex(G, gamma, dtm);
    else
      step_rk2(G, gamma, dtm);
    remaining = nsub == 1 ? 0.0 : remaining - dtm;
    if (++guard > (1L << 22))
      throw NumericsError("substep loop exceeded its iteration budget at t = " +
                          std::to_string(t_left));
  }
}

Trajectory Integrator::integrate(const SolveSpec& spec, const StateTriple& g0) {
  if (g0.role != Role::original)
    throw std::invalid_argument("integrate: initial data must carry the original role");
  if (!(spec.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (spec.snapshot_stride < 1)
    throw std::invalid_argument("integrate: snapshot stride must be >= 1");
  if (!(spec.t_end > spec.t_start))
    throw std::invalid_argument("integrate: t_end must exceed t_start");

  const TimeGrid& ng = ou_->grid;
  const std::int64_t n_per = aligned_steps(ng.dt, spec.dt, "integrate: noise dt vs solver dt");
  if (n_per < 1)
    throw std::invalid_argument("integrate: solver dt exceeds the noise grid dt");
  const std::int64_t steps = aligned_steps(spec.t_end - spec.t_start, spec.dt, "integrate");
  const std::size_t zi0 = ng.index(spec.t_start);
  if (zi0 + static_cast<std::size_t>(steps / n_per) > ng.count - 1)
    throw std::invalid_argument("integrate: the noise path window ends before t_end = " +
                                std::to_string(spec.t_end));

  if (!(spec.cg_tol > 0.0)) throw std::invalid_argument("integrate: cg_tol must be positive");
  cg_tol_ = spec.cg_tol;

  Trajectory traj;
  traj.dt = spec.dt;
  traj.params = params_;
  traj.grid = grid_;
  traj.ou = ou_;

  auto gamma_at = [&](std::int64_t j) {
    const std::size_t cell = zi0 + static_cast<std::size_t>(j / n_per);
    return std::array<double, 3>{ou_->gamma[0][cell], ou_->gamma[1][cell], ou_->gamma[2][cell]};
  };

  StateTriple G = to_transformed(g0, pack_, gamma_at(0));
  check_finite(G, spec.t_start, spec.blowup_threshold);
  traj.times.push_back(spec.t_start);
  traj.states.push_back(G);
  traj.gammas.push_back(gamma_at(0));

  for (std::int64_t j = 0; j < steps; ++j) {
    const double t_left = spec.t_start + static_cast<double>(j) * spec.dt;
    advance_cell(G, gamma_at(j), spec.dt, spec, t_left);
    check_finite(G, t_left + spec.dt, spec.blowup_threshold);
    if ((j + 1) % spec.snapshot_stride == 0 || j + 1 == steps) {
      traj.times.push_back(spec.t_start + static_cast<double>(j + 1) * spec.dt);
      traj.states.push_back(G);
      traj.gammas.push_back(gamma_at(j + 1));
    }
  }
  return traj;
}

StateTriple Integrator::cocycle_apply(const SolveSpec& how, double t, double s,
                                      const StateTriple& g0) {
  if (t < 0.0) throw std::invalid_argument("cocycle_apply: t must be non-negative");
  if (t == 0.0) return g0;  // the cocycle at time 0 is the identity
  SolveSpec spec = how;
  spec.t_start = s;
  spec.t_end = s + t;
  const std::int64_t steps = aligned_steps(t, spec.dt, "cocycle_apply");
  spec.snapshot_stride = static_cast<int>(std::min<std::int64_t>(steps, 1 << 30));
  Trajectory traj = integrate(spec, g0);
  return to_original(traj.states.back(), pack_, ou_->at(s + t));
}

}  // namespace hr
