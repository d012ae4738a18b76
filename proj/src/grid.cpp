#include "hr/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hr {

GridSpec GridSpec::line(double length, int n) {
  GridSpec s;
  s.dimension = 1;
  s.extent = {length, 1.0};
  s.points = {n, 1};
  s.validate();
  return s;
}

GridSpec GridSpec::rectangle(double lx, double ly, int nx, int ny) {
  GridSpec s;
  s.dimension = 2;
  s.extent = {lx, ly};
  s.points = {nx, ny};
  s.validate();
  return s;
}

void GridSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("grid: dimension must be 1 or 2, got " +
                                std::to_string(dimension));
  for (int ax = 0; ax < dimension; ++ax) {
    if (!std::isfinite(extent[ax]) || extent[ax] <= 0.0)
      throw std::invalid_argument("grid: extent along axis " + std::to_string(ax) +
                                  " must be a positive finite number");
    if (points[ax] < 3)
      throw std::invalid_argument("grid: need at least 3 points along axis " +
                                  std::to_string(ax) + ", got " +
                                  std::to_string(points[ax]));
  }
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const int nx = spec_.points[0];
  const int ny = spec_.dimension == 2 ? spec_.points[1] : 1;
  size_ = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  if (size_ > (std::size_t(1) << 26))
    throw std::invalid_argument("grid: point count " + std::to_string(size_) +
                                " exceeds the supported maximum (2^26)");
  h_[0] = spec_.extent[0] / (nx - 1);
  cell_volume_ = h_[0];
  volume_ = spec_.extent[0];
  if (spec_.dimension == 2) {
    h_[1] = spec_.extent[1] / (ny - 1);
    cell_volume_ *= h_[1];
    volume_ *= spec_.extent[1];
  }
  wpoint_.resize(size_);
  for (int j = 0; j < ny; ++j) {
    const double wy = spec_.dimension == 2 ? axis_weight(1, j) : 1.0;
    for (int i = 0; i < nx; ++i) wpoint_[index(i, j)] = axis_weight(0, i) * wy;
  }
}

double Grid::axis_weight(int axis, int i) const {
  const int n = points(axis);
  return (i == 0 || i == n - 1) ? 0.5 * h_[axis] : h_[axis];
}

double Grid::max_spacing() const {
  double m = h_[0];
  if (spec_.dimension == 2 && h_[1] > m) m = h_[1];
  return m;
}

double Grid::laplacian_bound() const {
  double b = 4.0 / (h_[0] * h_[0]);
  if (spec_.dimension == 2) b += 4.0 / (h_[1] * h_[1]);
  return b;
}

ScalarField make_field(std::shared_ptr<const Grid> grid, double fill) {
  if (!grid) throw std::invalid_argument("make_field: null grid");
  ScalarField f;
  f.grid = std::move(grid);
  f.v.assign(f.grid->size(), fill);
  return f;
}

static void check_field(const ScalarField& f, const char* who) {
  if (!f.grid) throw std::invalid_argument(std::string(who) + ": field has no grid");
  if (f.v.size() != f.grid->size())
    throw std::invalid_argument(std::string(who) + ": field size " +
                                std::to_string(f.v.size()) + " does not match grid size " +
                                std::to_string(f.grid->size()));
}

static void check_same_grid(const ScalarField& f, const ScalarField& g, const char* who) {
  check_field(f, who);
  check_field(g, who);
  if (f.grid.get() != g.grid.get())
    throw std::invalid_argument(std::string(who) + ": fields live on different grids");
}

void laplacian_neumann(const ScalarField& f, ScalarField& out) {
  check_field(f, "laplacian_neumann");
  if (&out == &f)
    throw std::invalid_argument("laplacian_neumann: output must not alias the input");
  const Grid& g = *f.grid;
  if (!out.grid || out.grid.get() != f.grid.get()) out = make_field(f.grid);
  const int nx = g.points(0);
  const int ny = g.dimension() == 2 ? g.points(1) : 1;
  const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
  const double* src = f.v.data();
  double* dst = out.v.data();
  for (int j = 0; j < ny; ++j) {
    const double* row = src + static_cast<std::size_t>(j) * nx;
    double* orow = dst + static_cast<std::size_t>(j) * nx;
    orow[0] = 2.0 * (row[1] - row[0]) * ihx2;
    for (int i = 1; i < nx - 1; ++i)
      orow[i] = (row[i - 1] - 2.0 * row[i] + row[i + 1]) * ihx2;
    orow[nx - 1] = 2.0 * (row[nx - 2] - row[nx - 1]) * ihx2;
  }
  if (g.dimension() == 2) {
    const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
    for (int i = 0; i < nx; ++i) {
      const double* col = src + i;
      double* ocol = dst + i;
      ocol[0] += 2.0 * (col[nx] - col[0]) * ihy2;
      for (int j = 1; j < ny - 1; ++j) {
        const std::size_t k = static_cast<std::size_t>(j) * nx;
        ocol[k] += (col[k - nx] - 2.0 * col[k] + col[k + nx]) * ihy2;
      }
      const std::size_t last = static_cast<std::size_t>(ny - 1) * nx;
      ocol[last] += 2.0 * (col[last - nx] - col[last]) * ihy2;
    }
  }
}

ScalarField laplacian_neumann(const ScalarField& f) {
  ScalarField out;
  laplacian_neumann(f, out);
  return out;
}

double inner_l2(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f, g, "inner_l2");
  const std::vector<double>& w = f.grid->weights();
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f.v[k] * g.v[k];
  return s;
}

double integral(const ScalarField& f) {
  check_field(f, "integral");
  const std::vector<double>& w = f.grid->weights();
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f.v[k];
  return s;
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner_l2(f, f)); }

double norm_l4(const ScalarField& f) {
  check_field(f, "norm_l4");
  const std::vector<double>& w = f.grid->weights();
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double v2 = f.v[k] * f.v[k];
    s += w[k] * v2 * v2;
  }
  return std::sqrt(std::sqrt(s));
}

double seminorm_h1(const ScalarField& f) {
  check_field(f, "seminorm_h1");
  const Grid& g = *f.grid;
  const int nx = g.points(0);
  const int ny = g.dimension() == 2 ? g.points(1) : 1;
  const double* src = f.v.data();
  double s = 0.0;
  // One-sided differences over cells, weighted so that
  // inner_l2(-laplacian_neumann(f), f) == seminorm_h1(f)^2 identically.
  const double ihx = 1.0 / g.spacing(0);
  for (int j = 0; j < ny; ++j) {
    const double wy = g.dimension() == 2 ? g.axis_weight(1, j) : 1.0;
    const double* row = src + static_cast<std::size_t>(j) * nx;
    double acc = 0.0;
    for (int i = 0; i < nx - 1; ++i) {
      const double d = row[i + 1] - row[i];
      acc += d * d;
    }
    s += wy * acc * ihx;
  }
  if (g.dimension() == 2) {
    const double ihy = 1.0 / g.spacing(1);
    for (int i = 0; i < nx; ++i) {
      const double wx = g.axis_weight(0, i);
      const double* col = src + i;
      double acc = 0.0;
      for (int j = 0; j < ny - 1; ++j) {
        const double d = col[static_cast<std::size_t>(j + 1) * nx] -
                         col[static_cast<std::size_t>(j) * nx];
        acc += d * d;
      }
      s += wx * acc * ihy;
    }
  }
  return std::sqrt(s);
}

ProfileField eval_profile(std::shared_ptr<const Grid> grid, const NoiseProfile& p) {
  if (!grid) throw std::invalid_argument("eval_profile: null grid");
  for (int ax = 0; ax < 2; ++ax) {
    if (p.modes[ax] < 0)
      throw std::invalid_argument("eval_profile: mode index along axis " +
                                  std::to_string(ax) + " must be non-negative");
    if (ax >= grid->dimension() && p.modes[ax] != 0)
      throw std::invalid_argument("eval_profile: profile uses axis " + std::to_string(ax) +
                                  " but the grid is " + std::to_string(grid->dimension()) +
                                  "-dimensional");
  }
  const double pi = 3.14159265358979323846264338328;
  ProfileField out;
  out.h = make_field(grid);
  out.lap_h = make_field(grid);
  const Grid& g = *grid;
  const int nx = g.points(0);
  const int ny = g.dimension() == 2 ? g.points(1) : 1;
  const double kx = p.modes[0] * pi / g.extent(0);
  const double ky = g.dimension() == 2 ? p.modes[1] * pi / g.extent(1) : 0.0;
  const double lam = -(kx * kx + ky * ky);
  for (int j = 0; j < ny; ++j) {
    const double cy = g.dimension() == 2 ? std::cos(ky * g.coordinate(1, j)) : 1.0;
    for (int i = 0; i < nx; ++i) {
      const double val = p.amplitude * std::cos(kx * g.coordinate(0, i)) * cy;
      const std::size_t k = g.index(i, j);
      out.h.v[k] = val;
      out.lap_h.v[k] = lam * val;
    }
  }
  return out;
}

namespace {
constexpr char kFieldMagic[9] = "HRFLD001";

struct FieldHeader {
  char magic[8];
  std::uint32_t dimension;
  std::uint32_t nx;
  std::uint32_t ny;
  std::uint32_t reserved;
  std::uint64_t count;
};
static_assert(sizeof(FieldHeader) == 32, "field header must be 32 bytes");
}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
  check_field(f, "write_field");
  FieldHeader hd{};
  std::memcpy(hd.magic, kFieldMagic, 8);
  hd.dimension = static_cast<std::uint32_t>(f.grid->dimension());
  hd.nx = static_cast<std::uint32_t>(f.grid->points(0));
  hd.ny = static_cast<std::uint32_t>(f.grid->dimension() == 2 ? f.grid->points(1) : 1);
  hd.reserved = 0;
  hd.count = f.v.size();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_field: cannot open '" + path + "'");
  os.write(reinterpret_cast<const char*>(&hd), sizeof(hd));
  os.write(reinterpret_cast<const char*>(f.v.data()),
           static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_field: short write to '" + path + "'");
}

ScalarField read_field(const std::string& path, std::shared_ptr<const Grid> grid) {
  if (!grid) throw std::invalid_argument("read_field: null grid");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open '" + path + "'");
  FieldHeader hd{};
  is.read(reinterpret_cast<char*>(&hd), sizeof(hd));
  if (!is || std::memcmp(hd.magic, kFieldMagic, 8) != 0)
    throw std::runtime_error("read_field: '" + path + "' is not a field file");
  const std::uint32_t ny = grid->dimension() == 2 ? grid->points(1) : 1;
  if (hd.dimension != static_cast<std::uint32_t>(grid->dimension()) ||
      hd.nx != static_cast<std::uint32_t>(grid->points(0)) || hd.ny != ny ||
      hd.count != grid->size())
    throw std::runtime_error("read_field: '" + path + "' was written on a different grid");
  ScalarField f = make_field(std::move(grid));
  is.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_field: '" + path + "' is truncated");
  return f;
}

}  // namespace hr
