#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "hr/config.hpp"

namespace {

std::string error_of(const std::string& text) {
  try {
    hr::parse_config(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty config yields validated defaults") {
  hr::RunConfig cfg = hr::parse_config("");
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.experiment.kind == hr::ExperimentKind::simulate);
  CHECK(cfg.grid.dimension == 2);
  CHECK(cfg.params.b > 0.0);
  CHECK(cfg.noise.dt == 0.01);
}

TEST_CASE("values land in the right fields") {
  const std::string text =
      "# run setup\n"
      "[grid]\n"
      "dimension = 1\n"
      "lx = 2.5\n"
      "nx = 65\n"
      "\n"
      "[params]\n"
      "b = 2.25  # cubic coefficient\n"
      "j = 1.5\n"
      "h2_mode_x = 3\n"
      "h2_amplitude = 0.75\n"
      "\n"
      "[noise]\n"
      "seed = 123456789012345\n"
      "t_min = -8\n"
      "t_max = 2\n"
      "dt = 0.02\n"
      "\n"
      "[solve]\n"
      "t_start = 0\n"
      "t_end = 1\n"
      "dt = 0.01\n"
      "stepper = rk2\n"
      "cfl = substep\n"
      "\n"
      "[experiment]\n"
      "kind = pullback\n"
      "horizons = 1, 2, 4\n"
      "cloud_members = 12\n";
  hr::RunConfig cfg = hr::parse_config(text);
  CHECK(cfg.grid.dimension == 1);
  CHECK(cfg.grid.extent[0] == 2.5);
  CHECK(cfg.grid.points[0] == 65);
  CHECK(cfg.params.b == 2.25);
  CHECK(cfg.params.J == 1.5);
  CHECK(cfg.params.profiles[1].modes[0] == 3);
  CHECK(cfg.params.profiles[1].amplitude == 0.75);
  CHECK(cfg.noise.seed == 123456789012345ull);
  CHECK(cfg.noise.t_min == -8.0);
  CHECK(cfg.noise.dt == 0.02);
  CHECK(cfg.solve.stepper == hr::Stepper::rk2);
  CHECK(cfg.solve.cfl == hr::CflPolicy::substep);
  CHECK(cfg.experiment.kind == hr::ExperimentKind::pullback);
  REQUIRE(cfg.experiment.horizons.size() == 3);
  CHECK(cfg.experiment.horizons[2] == 4.0);
  CHECK(cfg.experiment.cloud_members == 12);
}

TEST_CASE("positivity constraints are enforced with the field name") {
  std::string msg = error_of("[params]\nb = 0\n");
  CHECK(msg.find("b") != std::string::npos);
  CHECK(msg.find("positive") != std::string::npos);

  msg = error_of("[params]\nr = -1\n");
  CHECK(msg.find("r ") != std::string::npos);
}

TEST_CASE("dimension three is rejected with the restriction spelled out") {
  const std::string msg = error_of("[grid]\ndimension = 3\n");
  CHECK(msg.find("must be 1 or 2") != std::string::npos);
}

TEST_CASE("unknown keys, sections, and malformed values carry line numbers") {
  std::string msg = error_of("[grid]\ndimension = 2\nwhat = 1\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("what") != std::string::npos);

  msg = error_of("\n[nonsense]\n");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("nonsense") != std::string::npos);

  msg = error_of("[params]\na = fish\n");
  CHECK(msg.find("line 2") != std::string::npos);

  msg = error_of("[params]\nno equals sign\n");
  CHECK(msg.find("line 2") != std::string::npos);

  msg = error_of("b = 1\n");  // key before any section header
  CHECK(msg.find("line 1") != std::string::npos);

  msg = error_of("[experiment]\nhorizons =\n");
  CHECK(msg.find("has no value") != std::string::npos);

  msg = error_of("[experiment]\nhorizons = ,\n");
  CHECK(msg.find("at least one value") != std::string::npos);

  msg = error_of("[solve]\nstepper = leapfrog\n");
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("cross-field validation") {
  // Solver dt must divide the noise dt.
  std::string msg = error_of("[noise]\ndt = 0.01\n[solve]\ndt = 0.003\n");
  CHECK(!msg.empty());

  // Horizons must stay within the available past of the path.
  msg = error_of(
      "[noise]\nt_min = -10\n[experiment]\nkind = pullback\nhorizons = 1, 2, 16\n");
  CHECK(!msg.empty());

  // Snapshot stride must be positive.
  CHECK(!error_of("[solve]\nsnapshot_stride = 0\n").empty());
  // cfl_safety lives in (0, 1].
  CHECK(!error_of("[solve]\ncfl_safety = 1.5\n").empty());
  // The solve window must stay inside the noise window.
  CHECK(!error_of("[noise]\nt_max = 1\n[solve]\nt_start = 0\nt_end = 2\n").empty());
}

TEST_CASE("write_config is a fixed point and preserves every digit") {
  const std::string first = hr::write_config(hr::parse_config(""));
  CHECK(hr::write_config(hr::parse_config(first)) == first);

  const std::string custom =
      "[grid]\ndimension = 2\nlx = 0.30000000000000004\nnx = 19\nny = 23\n"
      "[params]\nkappa = 0.12345678901234567\n"
      "[noise]\nseed = 18446744073709551615\ndt = 0.0025\nt_min = -16\n"
      "[solve]\ndt = 0.0025\ncg_tol = 1e-11\n"
      "[experiment]\nkind = convergence\ndt_list = 0.0025, 0.00125\n";
  hr::RunConfig cfg = hr::parse_config(custom);
  const std::string echoed = hr::write_config(cfg);
  hr::RunConfig back = hr::parse_config(echoed);
  CHECK(hr::write_config(back) == echoed);
  CHECK(back.grid.extent[0] == cfg.grid.extent[0]);
  CHECK(back.params.kappa == cfg.params.kappa);
  CHECK(back.noise.seed == 18446744073709551615ull);
  CHECK(back.solve.cg_tol == cfg.solve.cg_tol);
  REQUIRE(back.experiment.dt_list.size() == 2);
  CHECK(back.experiment.dt_list[1] == 0.00125);
}

TEST_CASE("config files parse like strings") {
  const std::string path = "test_config_roundtrip.cfg";
  {
    std::ofstream os(path);
    os << "[params]\nb = 3\n";
  }
  hr::RunConfig cfg = hr::parse_config_file(path);
  CHECK(cfg.params.b == 3.0);
  std::remove(path.c_str());
  CHECK_THROWS(hr::parse_config_file(path));
}

TEST_CASE("experiment names") {
  CHECK(std::string(hr::experiment_name(hr::ExperimentKind::simulate)) == "simulate");
  CHECK(std::string(hr::experiment_name(hr::ExperimentKind::diagnose)) == "diagnose");
  CHECK(std::string(hr::experiment_name(hr::ExperimentKind::pullback)) == "pullback");
  CHECK(std::string(hr::experiment_name(hr::ExperimentKind::convergence)) == "convergence");
}
