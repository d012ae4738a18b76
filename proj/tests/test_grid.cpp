#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hr/grid.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

std::shared_ptr<const hr::Grid> line(double length, int n) {
  return std::make_shared<hr::Grid>(hr::GridSpec::line(length, n));
}

std::shared_ptr<const hr::Grid> rect(double lx, double ly, int nx, int ny) {
  return std::make_shared<hr::Grid>(hr::GridSpec::rectangle(lx, ly, nx, ny));
}

hr::ScalarField random_field(std::shared_ptr<const hr::Grid> grid, std::mt19937_64& rng) {
  hr::ScalarField f = hr::make_field(grid);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (double& x : f.v) x = n01(rng);
  return f;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Observed order between two refinement levels with spacing ratio 2.
double order2(double err_coarse, double err_fine) { return std::log2(err_coarse / err_fine); }

}  // namespace

TEST_CASE("grid geometry: interval") {
  auto g = line(1.0, 5);
  CHECK(g->dimension() == 1);
  CHECK(g->size() == 5);
  CHECK(g->spacing(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g->domain_volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->cell_volume() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g->coordinate(0, 0) == 0.0);
  CHECK(g->coordinate(0, 4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid geometry: rectangle") {
  auto g = rect(1.0, 1.0, 4, 4);
  CHECK(g->dimension() == 2);
  CHECK(g->size() == 16);
  CHECK(g->spacing(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(g->spacing(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(g->cell_volume() == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(g->domain_volume() == doctest::Approx(1.0).epsilon(1e-15));
  // Quadrature weights integrate the constant 1 to the exact domain volume.
  double sum = 0.0;
  for (double w : g->weights()) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("grid spec validation") {
  hr::GridSpec s = hr::GridSpec::rectangle(1.0, 1.0, 8, 8);
  s.dimension = 3;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(hr::Grid{s}, std::invalid_argument);

  CHECK_THROWS_AS(hr::GridSpec::line(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(hr::GridSpec::line(-1.0, 9), std::invalid_argument);
}

TEST_CASE("laplacian annihilates constants exactly") {
  for (auto g : {rect(1.0, 1.0, 9, 9), rect(2.0, 0.5, 7, 12)}) {
    hr::ScalarField f = hr::make_field(g, 3.25);
    hr::ScalarField lf = hr::laplacian_neumann(f);
    for (double x : lf.v) CHECK(x == 0.0);
  }
}

TEST_CASE("laplacian second-order convergence on 1D cosine eigenfunction") {
  // f(x) = cos(pi x) on [0,1] is a Neumann eigenfunction with eigenvalue -pi^2.
  std::vector<double> errs;
  for (int n : {33, 65, 129}) {
    auto g = line(1.0, n);
    hr::ScalarField f = hr::make_field(g);
    hr::ScalarField exact = hr::make_field(g);
    for (int i = 0; i < n; ++i) {
      const double x = g->coordinate(0, i);
      f.v[i] = std::cos(kPi * x);
      exact.v[i] = -kPi * kPi * std::cos(kPi * x);
    }
    errs.push_back(max_abs_diff(hr::laplacian_neumann(f).v, exact.v));
  }
  CHECK(order2(errs[0], errs[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order2(errs[1], errs[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("laplacian second-order convergence on 2D cosine eigenfunction") {
  // f(x,y) = cos(pi x) cos(2 pi y) on the unit square: eigenvalue -5 pi^2.
  std::vector<double> errs;
  for (int n : {17, 33, 65}) {
    auto g = rect(1.0, 1.0, n, n);
    hr::ScalarField f = hr::make_field(g);
    hr::ScalarField exact = hr::make_field(g);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x = g->coordinate(0, i);
        const double y = g->coordinate(1, j);
        const double val = std::cos(kPi * x) * std::cos(2.0 * kPi * y);
        f.v[g->index(i, j)] = val;
        exact.v[g->index(i, j)] = -5.0 * kPi * kPi * val;
      }
    }
    errs.push_back(max_abs_diff(hr::laplacian_neumann(f).v, exact.v));
  }
  CHECK(order2(errs[0], errs[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order2(errs[1], errs[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("norms on reference fields") {
  auto g = rect(1.0, 1.0, 33, 33);
  hr::ScalarField zero = hr::make_field(g);
  CHECK(hr::norm_l2(zero) == 0.0);
  CHECK(hr::norm_l4(zero) == 0.0);
  CHECK(hr::seminorm_h1(zero) == 0.0);

  hr::ScalarField one = hr::make_field(g, 1.0);
  CHECK(hr::norm_l2(one) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(hr::norm_l4(one) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(hr::seminorm_h1(one) == 0.0);
  CHECK(hr::integral(one) == doctest::Approx(1.0).epsilon(1e-13));

  // Trapezoid quadrature integrates cos^2(pi x) and cos^4(pi x) exactly over a
  // full period: int cos^2 = 1/2 and int cos^4 = 3/8 on [0,1].
  auto gl = line(1.0, 101);
  hr::ScalarField cf = hr::make_field(gl);
  for (int i = 0; i < 101; ++i) cf.v[i] = std::cos(kPi * gl->coordinate(0, i));
  const double l2 = hr::norm_l2(cf);
  CHECK(l2 * l2 == doctest::Approx(0.5).epsilon(1e-12));
  const double l4 = hr::norm_l4(cf);
  CHECK(l4 * l4 * l4 * l4 == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("inner product requires one grid") {
  auto g1 = line(1.0, 9);
  auto g2 = line(1.0, 11);
  hr::ScalarField a = hr::make_field(g1);
  hr::ScalarField b = hr::make_field(g2);
  CHECK_THROWS_AS(hr::inner_l2(a, b), std::invalid_argument);
}

TEST_CASE("self-adjointness, nonpositivity, summation by parts") {
  std::mt19937_64 rng(20260822u);
  for (auto g : {line(1.0, 41), rect(1.0, 0.7, 12, 9)}) {
    for (int trial = 0; trial < 20; ++trial) {
      hr::ScalarField f = random_field(g, rng);
      hr::ScalarField h = random_field(g, rng);
      hr::ScalarField lf = hr::laplacian_neumann(f);
      hr::ScalarField lh = hr::laplacian_neumann(h);

      const double nf = hr::norm_l2(f);
      const double nh = hr::norm_l2(h);
      CHECK(std::abs(hr::inner_l2(lf, h) - hr::inner_l2(f, lh)) <= 1e-10 * nf * nh);

      const double quad = hr::inner_l2(lf, f);
      CHECK(quad <= 1e-12 * nf * nf);

      const double s = hr::seminorm_h1(f);
      CHECK(std::abs(-quad - s * s) <= 1e-10 * s * s);
    }
  }
}

TEST_CASE("laplacian spectral bound") {
  // |<-lap f, f>| <= bound * ||f||^2 for random fields.
  std::mt19937_64 rng(7u);
  auto g = rect(1.0, 1.0, 17, 17);
  const double bound = g->laplacian_bound();
  CHECK(bound > 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    hr::ScalarField f = random_field(g, rng);
    const double nf = hr::norm_l2(f);
    const double quad = -hr::inner_l2(hr::laplacian_neumann(f), f);
    CHECK(quad <= bound * nf * nf * (1.0 + 1e-12));
  }
}

TEST_CASE("profile: constant mode") {
  auto g = rect(1.0, 1.0, 9, 9);
  hr::ProfileField p = hr::eval_profile(g, hr::NoiseProfile{{0, 0}, 1.0});
  for (double x : p.h.v) CHECK(x == 1.0);
  for (double x : p.lap_h.v) CHECK(x == 0.0);
}

TEST_CASE("profile: 1D mode one, amplitude two") {
  auto g = line(1.0, 33);
  hr::ProfileField p = hr::eval_profile(g, hr::NoiseProfile{{1, 0}, 2.0});
  for (int i = 0; i < 33; ++i) {
    const double x = g->coordinate(0, i);
    CHECK(p.h.v[i] == doctest::Approx(2.0 * std::cos(kPi * x)).epsilon(1e-14));
    CHECK(p.lap_h.v[i] ==
          doctest::Approx(-2.0 * kPi * kPi * std::cos(kPi * x)).epsilon(1e-13));
  }
}

TEST_CASE("profile: 2D separable mode with closed-form laplacian") {
  auto g = rect(2.0, 1.0, 17, 17);
  const double amp = 0.5;
  hr::ProfileField p = hr::eval_profile(g, hr::NoiseProfile{{1, 2}, amp});
  const double lam = -(kPi * kPi / 4.0 + 4.0 * kPi * kPi);  // (k pi / L)^2 sums
  for (int j = 0; j < 17; ++j) {
    for (int i = 0; i < 17; ++i) {
      const double x = g->coordinate(0, i);
      const double y = g->coordinate(1, j);
      const double val = amp * std::cos(kPi * x / 2.0) * std::cos(2.0 * kPi * y);
      const std::size_t k = g->index(i, j);
      CHECK(p.h.v[k] == doctest::Approx(val).epsilon(1e-13));
      CHECK(p.lap_h.v[k] == doctest::Approx(lam * val).epsilon(1e-13));
    }
  }
}

TEST_CASE("profile: discrete laplacian approaches the analytic one at order two") {
  std::vector<double> errs;
  for (int n : {17, 33, 65}) {
    auto g = line(1.0, n);
    hr::ProfileField p = hr::eval_profile(g, hr::NoiseProfile{{2, 0}, 1.0});
    errs.push_back(max_abs_diff(hr::laplacian_neumann(p.h).v, p.lap_h.v));
  }
  CHECK(order2(errs[0], errs[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order2(errs[1], errs[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("profile: invalid modes rejected") {
  auto g1 = line(1.0, 9);
  CHECK_THROWS_AS(hr::eval_profile(g1, hr::NoiseProfile{{-1, 0}, 1.0}), std::invalid_argument);
  // A y-mode on a 1D grid is meaningless.
  CHECK_THROWS_AS(hr::eval_profile(g1, hr::NoiseProfile{{0, 1}, 1.0}), std::invalid_argument);
}

TEST_CASE("field files round trip bit for bit") {
  std::mt19937_64 rng(99u);
  auto g = rect(1.0, 1.0, 12, 7);
  hr::ScalarField f = random_field(g, rng);
  const std::string path = "test_field_roundtrip.bin";
  hr::write_field(path, f);
  hr::ScalarField back = hr::read_field(path, g);
  for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(back.v[i] == f.v[i]);

  auto other = rect(1.0, 1.0, 7, 12);
  CHECK_THROWS_AS(hr::read_field(path, other), std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(hr::read_field(path, g), std::runtime_error);
}
