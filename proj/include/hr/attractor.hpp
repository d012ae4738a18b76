#pragma once
// Pullback experiments: clouds of initial states pushed from time -t to time
// 0 under one master noise path, absorption radii, Hausdorff semi-distances,
// and a finite-horizon attractor estimate.

#include <cstdint>
#include <string>
#include <vector>

#include "hr/diagnostics.hpp"
#include "hr/solver.hpp"

namespace hr {

// M original-role states sampled uniformly in the ball of radius rho of the
// product L2 space, realized as random combinations of Neumann cosine modes
// (indices 0..max_mode per axis and component) so every sample satisfies the
// boundary conditions exactly.
std::vector<StateTriple> sample_cloud(std::shared_ptr<const Grid> grid, int members, double rho,
                                      std::uint64_t seed, int max_mode = 3);

struct PullbackSpec {
  std::vector<double> horizons;  // strictly increasing, positive, on the noise grid
  SolveSpec solve;               // stepper settings reused for every leg
  int threads = 1;
};

struct HorizonResult {
  double horizon = 0.0;
  std::vector<double> member_norms;  // |Phi(t, theta_{-t} omega, g0_m)| by member index
  double radius = 0.0;               // max of member_norms
  bool absorbed = false;             // radius <= R_H (false when R_H is NaN)
  double semidistance = 0.0;         // to the reference cloud; NaN until estimated
  std::vector<StateTriple> cloud;    // original-role states at time 0
};

struct PullbackReport {
  std::vector<HorizonResult> rows;   // sorted by horizon
  double R_H = 0.0;                  // copied from the constants (NaN if unset)
  double resolution = 0.0;           // attractor_estimate: last pre-reference semidistance
  std::vector<std::string> warnings;
};

// For every horizon t and member m: integrate the transformed system over
// [-t, 0] under the ONE master path, convert back at time 0, and record the
// norm.  Members run in parallel; slot writes keep any thread count
// bit-identical.  R_H (may be NaN) only feeds the absorbed flag.
PullbackReport pullback_cloud(const PullbackSpec& spec, const Params& params,
                              std::shared_ptr<const Grid> grid,
                              std::shared_ptr<const OUPath> ou,
                              const std::vector<StateTriple>& cloud0, double R_H);

// max over a in A of (min over b in B of |a - b|).  Asymmetric.
double hausdorff_semidistance(const std::vector<StateTriple>& A,
                              const std::vector<StateTriple>& B);

// pullback_cloud plus semi-distances of every cloud to the largest-horizon
// reference cloud.  The attractor estimate is that reference cloud; its
// stated resolution is the semi-distance of the second-largest horizon.
// Non-monotone semi-distances beyond 10% slack produce warnings, not errors.
PullbackReport attractor_estimate(const PullbackSpec& spec, const Params& params,
                                  std::shared_ptr<const Grid> grid,
                                  std::shared_ptr<const OUPath> ou,
                                  const std::vector<StateTriple>& cloud0, double R_H);

}  // namespace hr
