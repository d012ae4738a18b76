#pragma once
// Time integration of the transformed (pathwise) system.  The default stepper
// is first-order IMEX: diffusion implicit via a matrix-free conjugate-gradient
// Helmholtz solve, reaction and noise terms explicit at the left time
// endpoint.  Gamma is held constant over each noise cell (left endpoint), so
// refining the solver step never changes the realized path.  An explicit
// midpoint stepper (rk2) serves as the reference for noise-free convergence
// studies.

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "hr/model.hpp"
#include "hr/noise.hpp"

namespace hr {

// Numerical failure (CG stall, CFL violation, blow-up).  Distinct from
// std::invalid_argument, which flags contract misuse.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

enum class Stepper { imex1, rk2 };

// What to do when the cubic stability bound dt <= cfl_limit/(b max u^2) is
// violated: stop hard (default), or deterministically subdivide the offending
// step until the bound holds again.  Subdivision is what makes pullback
// experiments with very large initial clouds affordable; forward simulation
// keeps the hard error.
enum class CflPolicy { hard_error, substep };

struct SolveSpec {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 0.01;  // noise dt must be an integer multiple of this
  Stepper stepper = Stepper::imex1;
  int snapshot_stride = 1;
  CflPolicy cfl = CflPolicy::hard_error;
  double cg_tol = 1e-10;           // relative CG residual
  double blowup_threshold = 1e8;   // |value| beyond this aborts
  double cfl_limit = 0.5;          // dt * b * max u^2 <= cfl_limit
  double cfl_safety = 0.8;         // substep aims at cfl_safety * cfl_limit
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateTriple> states;  // transformed role
  std::vector<std::array<double, 3>> gammas;  // OU values in effect at each snapshot
  double dt = 0.0;
  Params params;
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const OUPath> ou;
};

// One integrator owns its scratch buffers: create one per thread.  Grid and
// paths are shared immutably.
class Integrator {
 public:
  Integrator(std::shared_ptr<const Grid> grid, const Params& params,
             std::shared_ptr<const OUPath> ou);

  // Transforms g0 (original role) at t_start, steps to t_end, returns the
  // transformed trajectory with snapshots every snapshot_stride steps.
  Trajectory integrate(const SolveSpec& spec, const StateTriple& g0);

  // Phi(t, theta_s omega, g0): integrate the master window [s, s+t] starting
  // from g0 and convert back at s+t.  t = 0 returns g0 unchanged.
  StateTriple cocycle_apply(const SolveSpec& how, double t, double s, const StateTriple& g0);

  const ProfilePack& pack() const { return pack_; }
  const Params& params() const { return params_; }
  std::shared_ptr<const Grid> grid() const { return grid_; }
  std::shared_ptr<const OUPath> ou() const { return ou_; }

  // Exposed for stepper-level tests: advance a transformed state in place by
  // one step at fixed OU values.
  void step_imex(StateTriple& G, const std::array<double, 3>& gamma, double dt);
  void step_rk2(StateTriple& G, const std::array<double, 3>& gamma, double dt);

  // Largest |u| = |U + gamma_1 h_1| over the grid (drives the cubic CFL).
  double max_abs_u(const StateTriple& G, const std::array<double, 3>& gamma) const;

  // Solve (I - coef lap) x = rhs by conjugate gradients in the weighted inner
  // product; returns the iteration count.
  int helmholtz_cg(double coef, const ScalarField& rhs, ScalarField& x, double tol);

  // Relative CG tolerance used by step_imex; integrate() copies it from the
  // SolveSpec before stepping.
  void set_cg_tol(double tol) { cg_tol_ = tol; }

 private:
  void explicit_parts(const StateTriple& G, const std::array<double, 3>& gamma,
                      StateTriple& out);
  void advance_cell(StateTriple& G, const std::array<double, 3>& gamma, double dt,
                    const SolveSpec& spec, double t_left);
  void check_finite(const StateTriple& G, double t, double threshold) const;

  std::shared_ptr<const Grid> grid_;
  Params params_;
  std::shared_ptr<const OUPath> ou_;
  ProfilePack pack_;
  double cg_tol_ = 1e-10;
  ScalarField lap_, cg_r_, cg_p_, cg_ap_;
  StateTriple work_, stage_;
};

}  // namespace hr
