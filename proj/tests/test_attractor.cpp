#include <doctest.h>

#include <cmath>
#include <memory>

#include "hr/attractor.hpp"

namespace {

constexpr double kEqU = 0.96667942323329743;
constexpr double kEqV = 0.032765446348669710;
constexpr double kEqZ = 0.096667942323329743;

hr::Params tame_params() {
  hr::Params p;
  p.d1 = p.d2 = p.d3 = 0.1;
  p.a = 0.5;
  p.b = 1.0;
  p.alpha = 0.5;
  p.beta = 0.5;
  p.q = 0.1;
  p.r = 1.0;
  p.J = 0.5;
  p.c = 0.0;
  p.kappa = 1.0;
  p.profiles = {hr::NoiseProfile{{1, 0}, 0.1}, hr::NoiseProfile{{2, 0}, 0.1},
                hr::NoiseProfile{{0, 0}, 0.1}};
  return p;
}

std::shared_ptr<const hr::Grid> line(int n) {
  return std::make_shared<hr::Grid>(hr::GridSpec::line(1.0, n));
}

std::shared_ptr<const hr::OUPath> quiet_ou(double t_min, double t_max, double dt = 0.01) {
  return std::make_shared<hr::OUPath>(hr::zero_ou(hr::TimeGrid::make(t_min, t_max, dt), 1.0));
}

hr::StateTriple constant_state(std::shared_ptr<const hr::Grid> grid, double u, double v,
                               double z) {
  hr::StateTriple s = hr::make_state(grid, hr::Role::original);
  for (double& x : s.f[0].v) x = u;
  for (double& x : s.f[1].v) x = v;
  for (double& x : s.f[2].v) x = z;
  return s;
}

}  // namespace

TEST_CASE("cloud sampling: ball membership, determinism, validation") {
  auto g = line(17);
  const double rho = 2.0;
  std::vector<hr::StateTriple> cloud = hr::sample_cloud(g, 16, rho, 7);
  REQUIRE(cloud.size() == 16);
  double max_norm = 0.0;
  for (const auto& s : cloud) {
    CHECK(s.role == hr::Role::original);
    const double n = hr::state_norm(s);
    CHECK(n <= rho * (1.0 + 1e-12));
    CHECK(n > 0.0);
    max_norm = std::max(max_norm, n);
  }
  // Uniform-in-ball samples concentrate near the boundary in high dimension.
  CHECK(max_norm >= 0.5 * rho);

  std::vector<hr::StateTriple> again = hr::sample_cloud(g, 16, rho, 7);
  for (std::size_t m = 0; m < cloud.size(); ++m)
    CHECK(hr::state_distance(cloud[m], again[m]) == 0.0);

  std::vector<hr::StateTriple> other = hr::sample_cloud(g, 16, rho, 8);
  CHECK(hr::state_distance(cloud[0], other[0]) > 0.0);

  CHECK_THROWS_AS(hr::sample_cloud(g, 1, rho, 7), std::invalid_argument);
  CHECK_THROWS_AS(hr::sample_cloud(g, 4, 0.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(hr::sample_cloud(g, 4, rho, 7, -1), std::invalid_argument);
}

TEST_CASE("hausdorff semidistance axioms") {
  auto g = line(9);
  hr::StateTriple zero = hr::make_state(g, hr::Role::original);
  const double w = 1.0 / std::sqrt(3.0);
  hr::StateTriple unit = constant_state(g, w, w, w);  // norm 1
  hr::StateTriple five = constant_state(g, 5.0 * w, 5.0 * w, 5.0 * w);  // norm 5

  std::vector<hr::StateTriple> A = {unit};
  std::vector<hr::StateTriple> Z = {zero};
  CHECK(hr::hausdorff_semidistance(A, A) == 0.0);
  CHECK(hr::hausdorff_semidistance(A, Z) == doctest::Approx(1.0).epsilon(1e-12));

  // Asymmetry: the singleton {0} sits inside {0, five}, not the reverse.
  std::vector<hr::StateTriple> B = {zero, five};
  CHECK(hr::hausdorff_semidistance(Z, B) == 0.0);
  CHECK(hr::hausdorff_semidistance(B, Z) == doctest::Approx(5.0).epsilon(1e-12));

  // Triangle-type bound on random clouds.
  std::vector<hr::StateTriple> C1 = hr::sample_cloud(g, 5, 1.0, 1);
  std::vector<hr::StateTriple> C2 = hr::sample_cloud(g, 4, 2.0, 2);
  std::vector<hr::StateTriple> C3 = hr::sample_cloud(g, 6, 0.5, 3);
  const double d13 = hr::hausdorff_semidistance(C1, C3);
  const double d12 = hr::hausdorff_semidistance(C1, C2);
  const double d23 = hr::hausdorff_semidistance(C2, C3);
  CHECK(d13 <= d12 + d23 + 1e-12);

  std::vector<hr::StateTriple> empty;
  CHECK_THROWS_AS(hr::hausdorff_semidistance(empty, A), std::invalid_argument);
  CHECK_THROWS_AS(hr::hausdorff_semidistance(A, empty), std::invalid_argument);
}

TEST_CASE("noise-free pullback of the origin matches the forward flow bitwise") {
  auto g = line(17);
  hr::Params p = tame_params();
  auto ou = quiet_ou(-4.0, 4.0);
  hr::Integrator integ(g, p, ou);
  hr::SolveSpec how;
  how.dt = 0.01;

  hr::StateTriple zero = hr::make_state(g, hr::Role::original);
  hr::StateTriple pulled = integ.cocycle_apply(how, 2.0, -2.0, zero);

  hr::SolveSpec fwd = how;
  fwd.t_start = 0.0;
  fwd.t_end = 2.0;
  fwd.snapshot_stride = 1 << 28;
  hr::Trajectory traj = integ.integrate(fwd, zero);
  hr::StateTriple forward = hr::to_original(traj.states.back(), integ.pack(), ou->at(2.0));

  for (int ch = 0; ch < 3; ++ch) CHECK(pulled.f[ch].v == forward.f[ch].v);
}

TEST_CASE("noise-free clouds collapse onto the equilibrium") {
  auto g = line(17);
  hr::Params p = tame_params();
  auto ou = quiet_ou(-16.0, 1.0);
  std::vector<hr::StateTriple> cloud0 = hr::sample_cloud(g, 4, 0.5, 77);

  hr::PullbackSpec spec;
  spec.horizons = {2.0, 4.0, 8.0, 16.0};
  spec.solve.dt = 0.01;
  spec.threads = 1;

  hr::PullbackReport rep = hr::attractor_estimate(spec, p, g, ou, cloud0, 10.0);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.warnings.empty());

  hr::StateTriple eq = constant_state(g, kEqU, kEqV, kEqZ);
  const double eq_norm = hr::state_norm(eq);

  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const hr::HorizonResult& row = rep.rows[k];
    CHECK(row.horizon == spec.horizons[k]);
    REQUIRE(row.member_norms.size() == cloud0.size());
    double mx = 0.0;
    for (double n : row.member_norms) mx = std::max(mx, n);
    CHECK(row.radius == doctest::Approx(mx).epsilon(1e-15));
    CHECK(row.absorbed);  // R_H = 10 is generous here
  }

  // Largest horizon: every member is numerically at the equilibrium.
  for (const auto& s : rep.rows.back().cloud)
    CHECK(hr::state_distance(s, eq) <= 1e-4);
  CHECK(rep.rows.back().radius == doctest::Approx(eq_norm).epsilon(1e-3));

  // Semidistance to the reference cloud decreases and ends at zero.
  CHECK(rep.rows.back().semidistance == 0.0);
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    CHECK(rep.rows[k].semidistance <= rep.rows[k - 1].semidistance * 1.1 + 1e-12);
  CHECK(rep.resolution == doctest::Approx(rep.rows[rep.rows.size() - 2].semidistance));
  CHECK(rep.resolution <= 1e-2);
}

TEST_CASE("pullback runs are identical across thread counts") {
  auto g = line(17);
  hr::Params p = tame_params();
  hr::TimeGrid tg = hr::TimeGrid::make(-8.0, 1.0, 0.01);
  auto ou = std::make_shared<hr::OUPath>(hr::ou_from_wiener(hr::sample_wiener(3, tg), p.kappa));
  std::vector<hr::StateTriple> cloud0 = hr::sample_cloud(g, 6, 1.0, 9);

  hr::PullbackSpec one;
  one.horizons = {1.0, 2.0, 4.0, 8.0};
  one.solve.dt = 0.01;
  one.threads = 1;
  hr::PullbackSpec four = one;
  four.threads = 4;

  hr::PullbackReport r1 = hr::pullback_cloud(one, p, g, ou, cloud0, std::nan(""));
  hr::PullbackReport r4 = hr::pullback_cloud(four, p, g, ou, cloud0, std::nan(""));
  REQUIRE(r1.rows.size() == r4.rows.size());
  for (std::size_t k = 0; k < r1.rows.size(); ++k) {
    CHECK(r1.rows[k].radius == r4.rows[k].radius);
    for (std::size_t m = 0; m < r1.rows[k].member_norms.size(); ++m)
      CHECK(r1.rows[k].member_norms[m] == r4.rows[k].member_norms[m]);
    for (std::size_t m = 0; m < cloud0.size(); ++m)
      CHECK(hr::state_distance(r1.rows[k].cloud[m], r4.rows[k].cloud[m]) == 0.0);
    // R_H was NaN, so nothing can be declared absorbed.
    CHECK(!r1.rows[k].absorbed);
  }
}

TEST_CASE("pullback input validation") {
  auto g = line(9);
  hr::Params p = tame_params();
  auto ou = quiet_ou(-4.0, 1.0);
  std::vector<hr::StateTriple> cloud0 = hr::sample_cloud(g, 3, 1.0, 1);

  hr::PullbackSpec spec;
  spec.solve.dt = 0.01;

  spec.horizons = {};
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, cloud0, 1.0), std::invalid_argument);
  spec.horizons = {0.0, 1.0};  // horizons must be positive
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, cloud0, 1.0), std::invalid_argument);
  spec.horizons = {2.0, 1.0};  // and strictly increasing
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, cloud0, 1.0), std::invalid_argument);
  spec.horizons = {1.0, 8.0};  // beyond the master window
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, cloud0, 1.0), std::invalid_argument);
  spec.horizons = {1.0, 0.5 + 0.005};  // off the noise grid
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, cloud0, 1.0), std::invalid_argument);

  spec.horizons = {1.0, 2.0};
  std::vector<hr::StateTriple> one = {cloud0[0]};
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, one, 1.0), std::invalid_argument);

  std::vector<hr::StateTriple> wrong = cloud0;
  for (auto& s : wrong) s.role = hr::Role::transformed;
  CHECK_THROWS_AS(hr::pullback_cloud(spec, p, g, ou, wrong, 1.0), std::invalid_argument);

  // attractor_estimate needs at least four horizons for a convergence table.
  CHECK_THROWS_AS(hr::attractor_estimate(spec, p, g, ou, cloud0, 1.0), std::invalid_argument);
}
