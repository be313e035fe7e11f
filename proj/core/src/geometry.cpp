#include "slipfsi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slipfsi/error.hpp"

namespace slipfsi {

Mat2 Mat2::rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

double orthogonality_defect(const Mat2& q) {
  const Mat2 p = q * q.transpose();
  return std::max({std::abs(p.a11 - 1.0), std::abs(p.a12), std::abs(p.a21), std::abs(p.a22 - 1.0)});
}

Vec2 apply_isometry(const Isometry& iso, Vec2 y) { return iso.q + iso.rot * (y - iso.q0); }

Vec2 apply_inverse(const Isometry& iso, Vec2 x) { return iso.q0 + iso.rot.transpose() * (x - iso.q); }

Vec2 rigid_velocity(const RigidState& state, Vec2 x) {
  return state.v + state.omega * perp(x - state.iso.q);
}

namespace {

// Polar re-orthonormalization for a near-rotation: keep the angle of the
// first column and rebuild an exact rotation from it.
Mat2 nearest_rotation(const Mat2& m) {
  const double angle = std::atan2(m.a21 - m.a12, m.a11 + m.a22);
  return Mat2::rotation(angle);
}

}  // namespace

Isometry advance_isometry(const RigidState& state, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("advance_isometry: dt must be positive");
  Isometry next = state.iso;
  next.q = state.iso.q + dt * state.v;
  next.rot = nearest_rotation(Mat2::rotation(state.omega * dt) * state.iso.rot);
  return next;
}

void validate_shape(const BodyShape& shape) {
  if (const auto* d = std::get_if<Disk>(&shape)) {
    if (!(d->radius > 0.0)) throw InvalidArgument("disk radius must be positive");
    return;
  }
  const auto& p = std::get<ConvexPolygon>(shape).vertices;
  if (p.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  const std::size_t n = p.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 e0 = p[(k + 1) % n] - p[k];
    const Vec2 e1 = p[(k + 2) % n] - p[(k + 1) % n];
    if (!(cross(e0, e1) > 0.0))
      throw InvalidArgument("polygon must be strictly convex with counter-clockwise vertices");
  }
}

Vec2 shape_centroid(const BodyShape& shape) {
  if (const auto* d = std::get_if<Disk>(&shape)) return d->center;
  const auto& p = std::get<ConvexPolygon>(shape).vertices;
  double area2 = 0.0;
  Vec2 c{};
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec2 a = p[k];
    const Vec2 b = p[(k + 1) % p.size()];
    const double w = cross(a, b);
    area2 += w;
    c += w * (a + b);
  }
  return (1.0 / (3.0 * area2)) * c;
}

double shape_circumradius(const BodyShape& shape) {
  if (const auto* d = std::get_if<Disk>(&shape)) return d->radius;
  const Vec2 c = shape_centroid(shape);
  double r = 0.0;
  for (Vec2 v : std::get<ConvexPolygon>(shape).vertices) r = std::max(r, norm(v - c));
  return r;
}

namespace {

double segment_distance(Vec2 x, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double t = std::clamp(dot(x - a, ab) / dot(ab, ab), 0.0, 1.0);
  return norm(x - (a + t * ab));
}

double polygon_signed_distance(const std::vector<Vec2>& p, Vec2 x) {
  double dmin = std::numeric_limits<double>::infinity();
  bool inside = true;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec2 a = p[k];
    const Vec2 b = p[(k + 1) % p.size()];
    dmin = std::min(dmin, segment_distance(x, a, b));
    if (cross(b - a, x - a) < 0.0) inside = false;
  }
  return inside ? dmin : -dmin;
}

}  // namespace

double signed_distance(const BodyShape& shape, Vec2 x) {
  if (const auto* d = std::get_if<Disk>(&shape)) return d->radius - norm(x - d->center);
  return polygon_signed_distance(std::get<ConvexPolygon>(shape).vertices, x);
}

double signed_distance(const BodyShape& shape, const Isometry& iso, Vec2 x) {
  return signed_distance(shape, apply_inverse(iso, x));
}

SignedDistanceField sample_signed_distance(const Grid& grid, const BodyShape& shape,
                                           const Isometry& iso) {
  GridField d(grid, Stagger::cell);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) d(i, j) = signed_distance(shape, iso, grid.cell_center(i, j));
  return SignedDistanceField(std::move(d));
}

GridField tracking_indicator(const SignedDistanceField& kernel_sdf, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("tracking_indicator: delta must be positive");
  GridField out(kernel_sdf.grid(), Stagger::cell);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = kernel_sdf.values[k] > -1.5 * delta ? 1.0 : 0.0;
  return out;
}

GridField kernel_indicator(const SignedDistanceField& sdf, double delta) {
  if (delta < 0.0) throw InvalidArgument("kernel_indicator: delta must be non-negative");
  GridField out(sdf.grid(), Stagger::cell);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sdf.values[k] > delta ? 1.0 : 0.0;
  return out;
}

ZoneIndicators zone_indicators(const SignedDistanceField& kernel_sdf, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("zone_indicators: delta must be positive");
  const Grid& g = kernel_sdf.grid();
  if (2.0 * delta >= 0.5 * std::min(g.width(), g.height()))
    throw InvalidArgument("zone_indicators: 2*delta must be below the domain half-width");
  ZoneIndicators z{GridField(g, Stagger::cell), GridField(g, Stagger::cell),
                   GridField(g, Stagger::cell)};
  for (std::size_t k = 0; k < z.phi.size(); ++k) {
    const double d = kernel_sdf.values[k];
    const double phi = d > -delta ? 1.0 : 0.0;
    const double chi = (d > -2.0 * delta && d <= -delta) ? 1.0 : 0.0;
    z.phi[k] = phi;
    z.chi[k] = chi;
    z.theta[k] = 1.0 - (phi + chi);
  }
  return z;
}

MassProperties body_mass_and_inertia(const GridField& rho, const GridField& phi, Vec2 q) {
  const Grid& g = rho.grid();
  const double area = g.h * g.h;
  std::vector<double> m(rho.size()), jm(rho.size()), mx(rho.size()), my(rho.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = rho.index(i, j);
      const Vec2 x = g.cell_center(i, j);
      const double w = rho[k] * phi[k] * area;
      m[k] = w;
      jm[k] = w * dot(x - q, x - q);
      mx[k] = w * x.x;
      my[k] = w * x.y;
    }
  MassProperties out;
  out.mass = pairwise_sum(m);
  if (!(out.mass > 0.0)) throw NumericalError("body_mass_and_inertia: zero body mass");
  out.inertia = pairwise_sum(jm);
  out.centroid = {pairwise_sum(mx) / out.mass, pairwise_sum(my) / out.mass};
  return out;
}

double smoothed_area(const SignedDistanceField& sdf, double level) {
  const double h = sdf.h();
  std::vector<double> a(sdf.values.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    a[k] = std::clamp((sdf.values[k] - level) / h + 0.5, 0.0, 1.0) * h * h;
  return pairwise_sum(a);
}

}  // namespace slipfsi
