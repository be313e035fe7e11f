#include "slipfsi/grid.hpp"

#include <algorithm>
#include <cmath>

#include "slipfsi/error.hpp"

namespace slipfsi {

namespace {

struct Offset {
  double di;
  double dj;
};

Offset stagger_offset(Stagger s) {
  switch (s) {
    case Stagger::cell: return {0.5, 0.5};
    case Stagger::xface: return {0.0, 0.5};
    case Stagger::yface: return {0.5, 0.0};
    case Stagger::node: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

}  // namespace

Grid::Grid(int nx_, int ny_, double h_, Vec2 origin_) : nx(nx_), ny(ny_), h(h_), origin(origin_) {
  if (nx < 1 || ny < 1) throw InvalidArgument("grid needs at least one cell per direction");
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
}

double Grid::wall_distance(Vec2 x) const {
  const double dx = std::min(x.x - origin.x, origin.x + width() - x.x);
  const double dy = std::min(x.y - origin.y, origin.y + height() - x.y);
  return std::min(dx, dy);
}

GridField::GridField(const Grid& grid, Stagger stagger, double fill)
    : grid_(grid), stagger_(stagger) {
  ni_ = grid.nx + ((stagger == Stagger::xface || stagger == Stagger::node) ? 1 : 0);
  nj_ = grid.ny + ((stagger == Stagger::yface || stagger == Stagger::node) ? 1 : 0);
  data_.assign(static_cast<std::size_t>(ni_) * nj_, fill);
}

Vec2 GridField::position(int i, int j) const {
  const Offset o = stagger_offset(stagger_);
  return {grid_.origin.x + (i + o.di) * grid_.h, grid_.origin.y + (j + o.dj) * grid_.h};
}

double GridField::interpolate(Vec2 x) const {
  const Offset o = stagger_offset(stagger_);
  double fi = (x.x - grid_.origin.x) / grid_.h - o.di;
  double fj = (x.y - grid_.origin.y) / grid_.h - o.dj;
  fi = std::clamp(fi, 0.0, static_cast<double>(ni_ - 1));
  fj = std::clamp(fj, 0.0, static_cast<double>(nj_ - 1));
  const int i0 = std::min(static_cast<int>(fi), std::max(ni_ - 2, 0));
  const int j0 = std::min(static_cast<int>(fj), std::max(nj_ - 2, 0));
  const int i1 = std::min(i0 + 1, ni_ - 1);
  const int j1 = std::min(j0 + 1, nj_ - 1);
  const double a = fi - i0;
  const double b = fj - j0;
  const auto& f = *this;
  return (1 - a) * (1 - b) * f(i0, j0) + a * (1 - b) * f(i1, j0) + (1 - a) * b * f(i0, j1) +
         a * b * f(i1, j1);
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::min() const { return *std::min_element(data_.begin(), data_.end()); }
double GridField::max() const { return *std::max_element(data_.begin(), data_.end()); }
void GridField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double VelocityField::max_abs() const { return std::max(u.max_abs(), v.max_abs()); }

GridField divergence(const VelocityField& vel) {
  const Grid& g = vel.grid();
  GridField div(g, Stagger::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      div(i, j) = (vel.u(i + 1, j) - vel.u(i, j) + vel.v(i, j + 1) - vel.v(i, j)) / g.h;
  return div;
}

double normalized_max_divergence(const VelocityField& vel) {
  const double umax = vel.max_abs();
  if (umax == 0.0) return 0.0;
  return divergence(vel).max_abs() * vel.grid().h / umax;
}

double max_boundary_normal_velocity(const VelocityField& vel) {
  const Grid& g = vel.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    m = std::max({m, std::abs(vel.u(0, j)), std::abs(vel.u(g.nx, j))});
  for (int i = 0; i < g.nx; ++i)
    m = std::max({m, std::abs(vel.v(i, 0)), std::abs(vel.v(i, g.ny))});
  return m;
}

void zero_boundary_normal(VelocityField& vel) {
  const Grid& g = vel.grid();
  for (int j = 0; j < g.ny; ++j) vel.u(0, j) = vel.u(g.nx, j) = 0.0;
  for (int i = 0; i < g.nx; ++i) vel.v(i, 0) = vel.v(i, g.ny) = 0.0;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 64) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace slipfsi
