#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slipfsi/vec2.hpp"

namespace slipfsi {

/// Uniform Cartesian grid of square cells covering [x0, x0+nx*h] x [y0, y0+ny*h].
struct Grid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Vec2 origin{};

  Grid() = default;
  Grid(int nx_, int ny_, double h_, Vec2 origin_ = {});

  double width() const { return nx * h; }
  double height() const { return ny * h; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }
  Vec2 cell_center(int i, int j) const { return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h}; }
  /// Distance from `x` to the nearest side of the domain rectangle (negative outside).
  double wall_distance(Vec2 x) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Where on the MAC grid a field's samples live.
enum class Stagger { cell, xface, yface, node };

/// A scalar field sampled on one of the staggered locations of a Grid.
///
/// Sizes: cell nx*ny, xface (nx+1)*ny, yface nx*(ny+1), node (nx+1)*(ny+1).
/// Storage is row-major in j (index = j*ni + i).
class GridField {
 public:
  GridField() = default;
  GridField(const Grid& grid, Stagger stagger, double fill = 0.0);

  const Grid& grid() const { return grid_; }
  Stagger stagger() const { return stagger_; }
  int ni() const { return ni_; }
  int nj() const { return nj_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(ni_) + static_cast<std::size_t>(i);
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// Physical position of sample (i, j).
  Vec2 position(int i, int j) const;

  /// Bilinear interpolation at a physical point; the point is clamped to the
  /// hull of the sample locations.
  double interpolate(Vec2 x) const;

  double max_abs() const;
  double min() const;
  double max() const;
  void fill(double v);

  friend bool operator==(const GridField&, const GridField&) = default;

 private:
  Grid grid_{};
  Stagger stagger_ = Stagger::cell;
  int ni_ = 0;
  int nj_ = 0;
  std::vector<double> data_;
};

/// MAC velocity: u on x-faces (vertical cell sides), v on y-faces.
struct VelocityField {
  GridField u;
  GridField v;

  VelocityField() = default;
  explicit VelocityField(const Grid& grid)
      : u(grid, Stagger::xface), v(grid, Stagger::yface) {}

  const Grid& grid() const { return u.grid(); }
  double max_abs() const;
  /// Velocity averaged to the center of cell (i, j).
  Vec2 at_cell(int i, int j) const {
    return {0.5 * (u(i, j) + u(i + 1, j)), 0.5 * (v(i, j) + v(i, j + 1))};
  }
  /// Bilinear sample of both components at an arbitrary point.
  Vec2 sample(Vec2 x) const { return {u.interpolate(x), v.interpolate(x)}; }

  friend bool operator==(const VelocityField&, const VelocityField&) = default;
};

/// Discrete divergence (u_{i+1}-u_i + v_{j+1}-v_j)/h per cell.
GridField divergence(const VelocityField& vel);

/// max |div u| * h / max|u|, or 0 for a zero field.
double normalized_max_divergence(const VelocityField& vel);

/// Largest |normal velocity| over the boundary faces of the domain.
double max_boundary_normal_velocity(const VelocityField& vel);

/// Sets the normal velocity on all boundary faces to zero.
void zero_boundary_normal(VelocityField& vel);

/// Sum with a fixed pairwise (tree) reduction order, so results do not
/// depend on loop blocking.
double pairwise_sum(std::span<const double> values);

}  // namespace slipfsi
