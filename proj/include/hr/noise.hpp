#pragma once
// Driving noise: two-sided three-channel Wiener paths on a uniform time grid,
// the path shift (theta), stationary Ornstein-Uhlenbeck processes driven by
// those paths via the exact one-step recursion, spatial lifts, persistence,
// and temperedness diagnostics.
//
// A path is anchored at t = 0 and built outward in both directions.  Values
// are always reconstructed from the stored increments by the same cumulative
// sums, so reloading a file or shifting a window reproduces values bit for
// bit.  Pullback experiments use ONE master path; shifted windows are
// relabelings of the same increments, never fresh samples.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hr/grid.hpp"

namespace hr {

struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  double dt = 1.0;
  std::size_t count = 0;       // number of grid times
  std::size_t zero_index = 0;  // index with time exactly 0

  static TimeGrid make(double t_min, double t_max, double dt);

  double time(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(zero_index)) * dt;
  }
  // Index of an on-grid time; throws std::invalid_argument when t is off-grid
  // (relative tolerance 1e-9 dt) or outside the window.
  std::size_t index(double t) const;
  bool covers(double t) const;
};

struct WienerPath {
  TimeGrid grid;
  std::uint64_t seed = 0;
  // increments[ch][k] is the Gaussian increment over [t_k, t_{k+1}].
  std::array<std::vector<double>, 3> increments;
  // values[ch][k] = omega_ch(t_k); values[ch][zero_index] == 0 exactly.
  std::array<std::vector<double>, 3> values;
};

struct OUPath {
  TimeGrid grid;
  std::uint64_t seed = 0;
  double kappa = 1.0;
  // gamma[ch][k] = Gamma_ch(t_k); eta[ch][k] is the realized stochastic
  // increment so that gamma[k+1] = exp(-kappa dt) gamma[k] + eta[k].
  std::array<std::vector<double>, 3> gamma;
  std::array<std::vector<double>, 3> eta;
  std::array<double, 3> init = {0.0, 0.0, 0.0};

  double value(int channel, double t) const;
  std::array<double, 3> at(double t) const;
  // Euclidean magnitude |Gamma(t)| over the three channels.
  double magnitude(double t) const;
};

WienerPath sample_wiener(std::uint64_t seed, const TimeGrid& grid);

// (theta_s omega)(tau) = omega(tau + s) - omega(s); s must be on the grid and
// the new window keeps the same increment array, relabeled so that the new
// time 0 sits at old time s.  Composition of shifts is bit-exact.
WienerPath shift_path(const WienerPath& p, double s);

// Stationary OU process: Gamma(t_min) ~ N(0, 1/(2 kappa)) from a dedicated
// sub-stream, then the exact recursion
//   Gamma(t_{k+1}) = e^{-kappa dt} Gamma(t_k) + eta_k,
// where eta_k is N(0, (1 - e^{-2 kappa dt})/(2 kappa)) jointly Gaussian with
// the Wiener increment, Cov(dW, eta) = (1 - e^{-kappa dt})/kappa.
OUPath ou_from_wiener(const WienerPath& p, double kappa);

// Relabel the OU window so that new time 0 sits at old time s (theta_s).
OUPath shift_ou(const OUPath& ou, double s);

// All-zero OU path on a grid: deterministic (noise-free) forcing.
OUPath zero_ou(const TimeGrid& grid, double kappa);

// Spatial lift Gamma^h: per channel, the fields h_i(x) Gamma_i(t) and the
// analytic Delta h_i(x) Gamma_i(t).
struct LiftedNoise {
  std::array<double, 3> gamma;
  std::array<ScalarField, 3> gamma_h;
  std::array<ScalarField, 3> lap_gamma_h;
};

class LiftSampler {
 public:
  LiftSampler(std::shared_ptr<const OUPath> ou, std::shared_ptr<const Grid> grid,
              const std::array<NoiseProfile, 3>& profiles);
  LiftedNoise operator()(double t) const;
  const std::array<ProfileField, 3>& profile_fields() const { return pf_; }

 private:
  std::shared_ptr<const OUPath> ou_;
  std::shared_ptr<const Grid> grid_;
  std::array<ProfileField, 3> pf_;
};

// Persistence: header (magic, seed, kappa, t_min, t_max, dt, count) plus the
// raw Wiener increments and OU (init, eta) per channel.  Reloading rebuilds
// values by the same cumulative sums, hence bit-identical paths.
void write_noise(const std::string& path, const WienerPath& w, const OUPath& ou);
std::pair<WienerPath, OUPath> read_noise(const std::string& path);

// Diagnostic report for the a.s. temperedness/sublinearity statements; no
// pass/fail, single-path statements are not falsifiable.
struct TemperednessRow {
  double eps;
  double tail_max_p2;  // max over tail windows of e^{-eps|t|} |Gamma(t)|^2
  double tail_max_p4;
};

struct TemperednessReport {
  std::vector<TemperednessRow> rows;
  double window_start_neg = 0.0;  // tail windows: t <= -|window_start_neg|,
  double window_start_pos = 0.0;  // t >= window_start_pos
  double endpoint_ratio_neg = 0.0;  // |omega(t_min)| / |t_min| (Wiener only)
  double endpoint_ratio_pos = 0.0;  // |omega(t_max)| / t_max
  double sup_magnitude = 0.0;
};

TemperednessReport temperedness_report(const OUPath& ou, const std::vector<double>& eps);
TemperednessReport temperedness_report(const WienerPath& w, const std::vector<double>& eps);

}  // namespace hr
