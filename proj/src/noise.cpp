#include "hr/noise.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "hr/rng.hpp"

namespace hr {

namespace {
// Sub-stream purposes.
constexpr std::uint64_t kPurposeWienerPos = 0x5750;
constexpr std::uint64_t kPurposeWienerNeg = 0x574e;
constexpr std::uint64_t kPurposeOuInit = 0x4f49;
constexpr std::uint64_t kPurposeOuExtra = 0x4f45;

std::int64_t aligned_steps(double span, double dt, const char* who) {
  const double raw = span / dt;
  const double rounded = std::nearbyint(raw);
  if (std::abs(span - rounded * dt) > 1e-9 * dt)
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(span) +
                                " is not an integer multiple of dt = " + std::to_string(dt));
  return static_cast<std::int64_t>(rounded);
}

// Rebuild path values from increments by cumulative sums outward from the
// anchor index.  Shared by sampling, shifting and file reload so that all
// three agree bit for bit.
void rebuild_values(const TimeGrid& g, const std::array<std::vector<double>, 3>& inc,
                    std::array<std::vector<double>, 3>& values) {
  for (int ch = 0; ch < 3; ++ch) {
    values[ch].assign(g.count, 0.0);
    for (std::size_t k = g.zero_index; k + 1 < g.count; ++k)
      values[ch][k + 1] = values[ch][k] + inc[ch][k];
    for (std::size_t k = g.zero_index; k > 0; --k)
      values[ch][k - 1] = values[ch][k] - inc[ch][k - 1];
  }
}

void rebuild_gamma(const TimeGrid& g, double kappa, const std::array<double, 3>& init,
                   const std::array<std::vector<double>, 3>& eta,
                   std::array<std::vector<double>, 3>& gamma) {
  const double decay = std::exp(-kappa * g.dt);
  for (int ch = 0; ch < 3; ++ch) {
    gamma[ch].assign(g.count, 0.0);
    gamma[ch][0] = init[ch];
    for (std::size_t k = 0; k + 1 < g.count; ++k)
      gamma[ch][k + 1] = decay * gamma[ch][k] + eta[ch][k];
  }
}

TimeGrid relabeled(const TimeGrid& g, std::size_t new_zero) {
  TimeGrid out = g;
  out.zero_index = new_zero;
  out.t_min = out.time(0);
  out.t_max = out.time(out.count - 1);
  return out;
}
}  // namespace

TimeGrid TimeGrid::make(double t_min, double t_max, double dt) {
  if (!std::isfinite(dt) || dt <= 0.0)
    throw std::invalid_argument("time grid: dt must be positive, got " + std::to_string(dt));
  if (t_min > 0.0 || t_max < 0.0)
    throw std::invalid_argument("time grid: must contain 0, got [" + std::to_string(t_min) +
                                ", " + std::to_string(t_max) + "]");
  const std::int64_t kneg = aligned_steps(-t_min, dt, "time grid t_min");
  const std::int64_t kpos = aligned_steps(t_max, dt, "time grid t_max");
  TimeGrid g;
  g.dt = dt;
  g.zero_index = static_cast<std::size_t>(kneg);
  g.count = static_cast<std::size_t>(kneg + kpos + 1);
  if (g.count < 2) throw std::invalid_argument("time grid: need at least 2 points");
  if (g.count > 200'000'000)
    throw std::invalid_argument("time grid: " + std::to_string(g.count) + " points is too many");
  g.t_min = g.time(0);
  g.t_max = g.time(g.count - 1);
  return g;
}

std::size_t TimeGrid::index(double t) const {
  const double raw = t / dt + static_cast<double>(zero_index);
  const std::int64_t k = static_cast<std::int64_t>(std::nearbyint(raw));
  if (k < 0 || k >= static_cast<std::int64_t>(count))
    throw std::invalid_argument("time " + std::to_string(t) + " lies outside the path window [" +
                                std::to_string(t_min) + ", " + std::to_string(t_max) + "]");
  if (std::abs(t - time(static_cast<std::size_t>(k))) > 1e-9 * dt)
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the noise grid (dt = " +
                                std::to_string(dt) + ")");
  return static_cast<std::size_t>(k);
}

bool TimeGrid::covers(double t) const {
  const double tol = 1e-9 * dt;
  return t >= t_min - tol && t <= t_max + tol;
}

WienerPath sample_wiener(std::uint64_t seed, const TimeGrid& grid) {
  WienerPath p;
  p.grid = grid;
  p.seed = seed;
  const double sd = std::sqrt(grid.dt);
  for (int ch = 0; ch < 3; ++ch) {
    p.increments[ch].assign(grid.count - 1, 0.0);
    GaussianStream pos(seed, kPurposeWienerPos, static_cast<std::uint64_t>(ch));
    for (std::size_t k = grid.zero_index; k + 1 < grid.count; ++k)
      p.increments[ch][k] = sd * pos.next();
    GaussianStream neg(seed, kPurposeWienerNeg, static_cast<std::uint64_t>(ch));
    for (std::size_t k = grid.zero_index; k > 0; --k)
      p.increments[ch][k - 1] = sd * neg.next();
  }
  rebuild_values(p.grid, p.increments, p.values);
  return p;
}

WienerPath shift_path(const WienerPath& p, double s) {
  const std::int64_t steps = aligned_steps(s, p.grid.dt, "shift_path");
  const std::int64_t nz = static_cast<std::int64_t>(p.grid.zero_index) + steps;
  if (nz < 0 || nz >= static_cast<std::int64_t>(p.grid.count))
    throw std::invalid_argument("shift_path: shift " + std::to_string(s) +
                                " exhausts the path window");
  WienerPath q;
  q.grid = relabeled(p.grid, static_cast<std::size_t>(nz));
  q.seed = p.seed;
  q.increments = p.increments;
  rebuild_values(q.grid, q.increments, q.values);
  return q;
}

OUPath ou_from_wiener(const WienerPath& p, double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0)
    throw std::invalid_argument("ou_from_wiener: kappa must be positive, got " +
                                std::to_string(kappa));
  OUPath ou;
  ou.grid = p.grid;
  ou.seed = p.seed;
  ou.kappa = kappa;
  const double dt = p.grid.dt;
  // Exact one-step statistics of the stationary OU solution:
  //   stationary variance   1/(2 kappa)
  //   increment variance    v  = (1 - e^{-2 kappa dt}) / (2 kappa)
  //   Cov(dW, eta)          cw = (1 - e^{-kappa dt}) / kappa
  // Conditionally on dW, eta = (cw/dt) dW + s xi with s^2 = v - cw^2/dt >= 0
  // (expm1 keeps the small-kappa*dt cancellation under control).
  const double v = -std::expm1(-2.0 * kappa * dt) / (2.0 * kappa);
  const double cw = -std::expm1(-kappa * dt) / kappa;
  const double cmean = cw / dt;
  const double cvar = v - cw * cw / dt;
  const double sres = std::sqrt(cvar > 0.0 ? cvar : 0.0);
  const double sinit = std::sqrt(1.0 / (2.0 * kappa));
  for (int ch = 0; ch < 3; ++ch) {
    GaussianStream init(p.seed, kPurposeOuInit, static_cast<std::uint64_t>(ch));
    ou.init[ch] = sinit * init.next();
    GaussianStream extra(p.seed, kPurposeOuExtra, static_cast<std::uint64_t>(ch));
    ou.eta[ch].assign(p.grid.count - 1, 0.0);
    for (std::size_t k = 0; k + 1 < p.grid.count; ++k)
      ou.eta[ch][k] = cmean * p.increments[ch][k] + sres * extra.next();
  }
  rebuild_gamma(ou.grid, kappa, ou.init, ou.eta, ou.gamma);
  return ou;
}

OUPath shift_ou(const OUPath& ou, double s) {
  const std::int64_t steps = aligned_steps(s, ou.grid.dt, "shift_ou");
  const std::int64_t nz = static_cast<std::int64_t>(ou.grid.zero_index) + steps;
  if (nz < 0 || nz >= static_cast<std::int64_t>(ou.grid.count))
    throw std::invalid_argument("shift_ou: shift " + std::to_string(s) +
                                " exhausts the path window");
  OUPath out = ou;
  out.grid = relabeled(ou.grid, static_cast<std::size_t>(nz));
  return out;
}

OUPath zero_ou(const TimeGrid& grid, double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0)
    throw std::invalid_argument("zero_ou: kappa must be positive");
  OUPath ou;
  ou.grid = grid;
  ou.seed = 0;
  ou.kappa = kappa;
  for (int ch = 0; ch < 3; ++ch) {
    ou.gamma[ch].assign(grid.count, 0.0);
    ou.eta[ch].assign(grid.count - 1, 0.0);
  }
  return ou;
}

double OUPath::value(int channel, double t) const {
  if (channel < 0 || channel > 2)
    throw std::invalid_argument("OUPath: channel must be 0, 1 or 2");
  return gamma[channel][grid.index(t)];
}

std::array<double, 3> OUPath::at(double t) const {
  const std::size_t k = grid.index(t);
  return {gamma[0][k], gamma[1][k], gamma[2][k]};
}

double OUPath::magnitude(double t) const {
  const std::array<double, 3> g = at(t);
  return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
}

LiftSampler::LiftSampler(std::shared_ptr<const OUPath> ou, std::shared_ptr<const Grid> grid,
                         const std::array<NoiseProfile, 3>& profiles)
    : ou_(std::move(ou)), grid_(std::move(grid)) {
  if (!ou_ || !grid_) throw std::invalid_argument("LiftSampler: null path or grid");
  for (int ch = 0; ch < 3; ++ch) pf_[ch] = eval_profile(grid_, profiles[ch]);
}

LiftedNoise LiftSampler::operator()(double t) const {
  LiftedNoise out;
  out.gamma = ou_->at(t);
  for (int ch = 0; ch < 3; ++ch) {
    out.gamma_h[ch] = make_field(grid_);
    out.lap_gamma_h[ch] = make_field(grid_);
    const double g = out.gamma[ch];
    for (std::size_t k = 0; k < grid_->size(); ++k) {
      out.gamma_h[ch].v[k] = g * pf_[ch].h.v[k];
      out.lap_gamma_h[ch].v[k] = g * pf_[ch].lap_h.v[k];
    }
  }
  return out;
}

namespace {
constexpr char kNoiseMagic[9] = "HRNSE001";

struct NoiseHeader {
  char magic[8];
  std::uint64_t seed;
  double kappa;
  double t_min;
  double t_max;
  double dt;
  std::uint64_t count;
};
static_assert(sizeof(NoiseHeader) == 56, "noise header must be 56 bytes");

void write_doubles(std::ofstream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& is, std::vector<double>& v, std::size_t n) {
  v.assign(n, 0.0);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}
}  // namespace

void write_noise(const std::string& path, const WienerPath& w, const OUPath& ou) {
  if (w.grid.count != ou.grid.count || w.grid.dt != ou.grid.dt ||
      w.grid.zero_index != ou.grid.zero_index)
    throw std::invalid_argument("write_noise: Wiener and OU paths use different time grids");
  NoiseHeader hd{};
  std::memcpy(hd.magic, kNoiseMagic, 8);
  hd.seed = w.seed;
  hd.kappa = ou.kappa;
  hd.t_min = w.grid.t_min;
  hd.t_max = w.grid.t_max;
  hd.dt = w.grid.dt;
  hd.count = w.grid.count;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_noise: cannot open '" + path + "'");
  os.write(reinterpret_cast<const char*>(&hd), sizeof(hd));
  for (int ch = 0; ch < 3; ++ch) write_doubles(os, w.increments[ch]);
  os.write(reinterpret_cast<const char*>(ou.init.data()), 3 * sizeof(double));
  for (int ch = 0; ch < 3; ++ch) write_doubles(os, ou.eta[ch]);
  if (!os) throw std::runtime_error("write_noise: short write to '" + path + "'");
}

std::pair<WienerPath, OUPath> read_noise(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_noise: cannot open '" + path + "'");
  NoiseHeader hd{};
  is.read(reinterpret_cast<char*>(&hd), sizeof(hd));
  if (!is || std::memcmp(hd.magic, kNoiseMagic, 8) != 0)
    throw std::runtime_error("read_noise: '" + path + "' is not a noise file");
  TimeGrid grid = TimeGrid::make(hd.t_min, hd.t_max, hd.dt);
  if (grid.count != hd.count)
    throw std::runtime_error("read_noise: '" + path + "' header count mismatch");
  WienerPath w;
  w.grid = grid;
  w.seed = hd.seed;
  OUPath ou;
  ou.grid = grid;
  ou.seed = hd.seed;
  ou.kappa = hd.kappa;
  for (int ch = 0; ch < 3; ++ch) read_doubles(is, w.increments[ch], grid.count - 1);
  is.read(reinterpret_cast<char*>(ou.init.data()), 3 * sizeof(double));
  for (int ch = 0; ch < 3; ++ch) read_doubles(is, ou.eta[ch], grid.count - 1);
  if (!is) throw std::runtime_error("read_noise: '" + path + "' is truncated");
  rebuild_values(w.grid, w.increments, w.values);
  rebuild_gamma(ou.grid, ou.kappa, ou.init, ou.eta, ou.gamma);
  return {std::move(w), std::move(ou)};
}

namespace {
// Tail windows start halfway out on each side; a side with no span
// contributes nothing.
void require_horizon(const TimeGrid& g) {
  if (std::max(-g.t_min, g.t_max) < 10.0)
    throw std::invalid_argument("temperedness_report: path horizon must cover at least 10 time units");
}
}  // namespace

TemperednessReport temperedness_report(const OUPath& ou, const std::vector<double>& eps) {
  require_horizon(ou.grid);
  TemperednessReport rep;
  rep.window_start_neg = 0.5 * -ou.grid.t_min;
  rep.window_start_pos = 0.5 * ou.grid.t_max;
  for (std::size_t k = 0; k < ou.grid.count; ++k) {
    double m2 = 0.0;
    for (int ch = 0; ch < 3; ++ch) m2 += ou.gamma[ch][k] * ou.gamma[ch][k];
    rep.sup_magnitude = std::max(rep.sup_magnitude, std::sqrt(m2));
  }
  for (double e : eps) {
    TemperednessRow row{e, 0.0, 0.0};
    for (std::size_t k = 0; k < ou.grid.count; ++k) {
      const double t = ou.grid.time(k);
      const bool in_tail = (t <= -rep.window_start_neg && rep.window_start_neg > 0.0) ||
                           (t >= rep.window_start_pos && rep.window_start_pos > 0.0);
      if (!in_tail) continue;
      double m2 = 0.0;
      for (int ch = 0; ch < 3; ++ch) m2 += ou.gamma[ch][k] * ou.gamma[ch][k];
      const double damp = std::exp(-e * std::abs(t));
      row.tail_max_p2 = std::max(row.tail_max_p2, damp * m2);
      row.tail_max_p4 = std::max(row.tail_max_p4, damp * m2 * m2);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

TemperednessReport temperedness_report(const WienerPath& w, const std::vector<double>& eps) {
  require_horizon(w.grid);
  TemperednessReport rep;
  rep.window_start_neg = 0.5 * -w.grid.t_min;
  rep.window_start_pos = 0.5 * w.grid.t_max;
  auto magnitude_sq = [&](std::size_t k) {
    double m2 = 0.0;
    for (int ch = 0; ch < 3; ++ch) m2 += w.values[ch][k] * w.values[ch][k];
    return m2;
  };
  for (std::size_t k = 0; k < w.grid.count; ++k)
    rep.sup_magnitude = std::max(rep.sup_magnitude, std::sqrt(magnitude_sq(k)));
  if (w.grid.t_min < 0.0)
    rep.endpoint_ratio_neg = std::sqrt(magnitude_sq(0)) / -w.grid.t_min;
  if (w.grid.t_max > 0.0)
    rep.endpoint_ratio_pos = std::sqrt(magnitude_sq(w.grid.count - 1)) / w.grid.t_max;
  for (double e : eps) {
    TemperednessRow row{e, 0.0, 0.0};
    for (std::size_t k = 0; k < w.grid.count; ++k) {
      const double t = w.grid.time(k);
      const bool in_tail = (t <= -rep.window_start_neg && rep.window_start_neg > 0.0) ||
                           (t >= rep.window_start_pos && rep.window_start_pos > 0.0);
      if (!in_tail) continue;
      const double m2 = magnitude_sq(k);
      const double damp = std::exp(-e * std::abs(t));
      row.tail_max_p2 = std::max(row.tail_max_p2, damp * m2);
      row.tail_max_p4 = std::max(row.tail_max_p4, damp * m2 * m2);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hr
