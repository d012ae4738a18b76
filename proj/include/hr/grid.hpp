#pragma once
// Spatial discretization: uniform vertex-centred grids on an interval or a
// rectangle, a mirrored-boundary Neumann Laplacian, discrete norms whose
// quadrature is compatible with the stencil (summation by parts holds to
// rounding), separable cosine profiles with exact Laplacians, and a small
// binary field format.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hr {

struct GridSpec {
  int dimension = 2;                        // 1 or 2
  std::array<double, 2> extent = {1.0, 1.0};
  std::array<int, 2> points = {33, 33};     // vertices per axis, endpoints included

  static GridSpec line(double length, int n);
  static GridSpec rectangle(double lx, double ly, int nx, int ny);
  void validate() const;  // throws std::invalid_argument
};

class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  int dimension() const { return spec_.dimension; }
  const GridSpec& spec() const { return spec_; }
  double extent(int axis) const { return spec_.extent[axis]; }
  int points(int axis) const { return axis < spec_.dimension ? spec_.points[axis] : 1; }
  double spacing(int axis) const { return h_[axis]; }
  double max_spacing() const;
  double cell_volume() const { return cell_volume_; }
  double domain_volume() const { return volume_; }
  std::size_t size() const { return size_; }

  double coordinate(int axis, int i) const { return i * h_[axis]; }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(points(0)) + ix;
  }

  // Per-point quadrature weight: product of per-axis control-volume widths
  // (interior width = spacing, boundary width = spacing/2).
  const std::vector<double>& weights() const { return wpoint_; }
  double axis_weight(int axis, int i) const;

  // Upper bound on the spectral radius of -laplacian_neumann.
  double laplacian_bound() const;

 private:
  GridSpec spec_;
  std::array<double, 2> h_ = {0.0, 0.0};
  double cell_volume_ = 0.0;
  double volume_ = 0.0;
  std::size_t size_ = 0;
  std::vector<double> wpoint_;
};

struct ScalarField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> v;
};

ScalarField make_field(std::shared_ptr<const Grid> grid, double fill = 0.0);

// Second-order Neumann Laplacian: centered differences inside, point-mirrored
// closure (ghost value = first interior value) on the boundary.
void laplacian_neumann(const ScalarField& f, ScalarField& out);
ScalarField laplacian_neumann(const ScalarField& f);

double norm_l2(const ScalarField& f);
double norm_l4(const ScalarField& f);
double seminorm_h1(const ScalarField& f);
double inner_l2(const ScalarField& f, const ScalarField& g);
double integral(const ScalarField& f);

// Separable Neumann cosine mode: amplitude * prod_i cos(k_i pi x_i / L_i).
// Normal derivative vanishes on the boundary exactly and the continuum
// Laplacian is available in closed form.
struct NoiseProfile {
  std::array<int, 2> modes = {0, 0};
  double amplitude = 0.0;
};

struct ProfileField {
  ScalarField h;
  ScalarField lap_h;  // analytic Laplacian, not the discrete one
};

ProfileField eval_profile(std::shared_ptr<const Grid> grid, const NoiseProfile& p);

// Binary field file: 32-byte header (8-byte magic, u32 dimension, u32 nx,
// u32 ny, u32 reserved, u64 count) followed by count little-endian doubles.
void write_field(const std::string& path, const ScalarField& f);
ScalarField read_field(const std::string& path, std::shared_ptr<const Grid> grid);

}  // namespace hr
