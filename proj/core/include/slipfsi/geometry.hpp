#pragma once

#include <variant>
#include <vector>

#include "slipfsi/grid.hpp"
#include "slipfsi/vec2.hpp"

namespace slipfsi {

/// 2x2 matrix, row-major.
struct Mat2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 rotation(double angle);

  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  double det() const { return a11 * a22 - a12 * a21; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b);
  friend Vec2 operator*(const Mat2& a, Vec2 x) { return {a.a11 * x.x + a.a12 * x.y, a.a21 * x.x + a.a22 * x.y}; }
};

/// Max entry of |Q Q^T - I|.
double orthogonality_defect(const Mat2& q);

/// Orientation-preserving isometry y -> q + Q (y - q0) carrying the reference
/// body configuration to the current one.
struct Isometry {
  Vec2 q{};
  Mat2 rot = Mat2::identity();
  Vec2 q0{};

  /// Identity map anchored at the reference mass center.
  static Isometry at_rest(Vec2 q0) { return {q0, Mat2::identity(), q0}; }
};

Vec2 apply_isometry(const Isometry& iso, Vec2 y);
/// Maps a current-configuration point back to the reference configuration.
Vec2 apply_inverse(const Isometry& iso, Vec2 x);

struct RigidState {
  Isometry iso;
  Vec2 v{};
  double omega = 0.0;
  double mass = 1.0;
  double inertia = 1.0;
};

/// v + omega (x - q)^perp.
Vec2 rigid_velocity(const RigidState& state, Vec2 x);

/// q += dt v, Q <- R(omega dt) Q with exact rotation and re-orthonormalization.
Isometry advance_isometry(const RigidState& state, double dt);

struct Disk {
  Vec2 center{};
  double radius = 1.0;
};

/// Convex polygon, vertices counter-clockwise.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

using BodyShape = std::variant<Disk, ConvexPolygon>;

/// Throws InvalidArgument if the shape is degenerate, non-convex or clockwise.
void validate_shape(const BodyShape& shape);

/// Area centroid of the shape (the reference mass center for constant density).
Vec2 shape_centroid(const BodyShape& shape);

/// Radius of the smallest disk around the centroid containing the shape.
double shape_circumradius(const BodyShape& shape);

/// dist(x, R^2 \ S) - dist(x, S): positive inside, negative outside.
double signed_distance(const BodyShape& shape, Vec2 x);

/// Signed distance of the shape carried by `iso` (shape given in the reference configuration).
double signed_distance(const BodyShape& shape, const Isometry& iso, Vec2 x);

/// Cell-centered samples of a signed distance, positive inside the set.
struct SignedDistanceField {
  GridField values;

  SignedDistanceField() = default;
  explicit SignedDistanceField(GridField v) : values(std::move(v)) {}

  const Grid& grid() const { return values.grid(); }
  double h() const { return values.grid().h; }
};

SignedDistanceField sample_signed_distance(const Grid& grid, const BodyShape& shape,
                                           const Isometry& iso);

/// Indicator of the delta-kernel {d > delta}.
GridField kernel_indicator(const SignedDistanceField& sdf, double delta);

/// Characteristic functions of the body zone, the mixture ring and the fluid.
struct ZoneIndicators {
  GridField phi;
  GridField chi;
  GridField theta;
};

/// Zones built from the signed distance `d` of the transported kernel S(zeta):
/// phi = [d > -delta], chi = [-2 delta < d <= -delta], theta = 1 - phi - chi.
ZoneIndicators zone_indicators(const SignedDistanceField& kernel_sdf, double delta);

/// Indicator of the body zone plus the inner half of the mixture ring,
/// {d > -3 delta / 2} for the kernel signed distance d. The ring carries
/// density epsilon, so sums over this set see the body's transported mass
/// even where grid transport has smeared it across the zone boundary.
GridField tracking_indicator(const SignedDistanceField& kernel_sdf, double delta);

struct MassProperties {
  double mass = 0.0;
  double inertia = 0.0;  ///< about the supplied reference point
  Vec2 centroid{};       ///< density-weighted centroid of the zone
};

/// m = sum rho phi h^2, J = sum rho phi |x - q|^2 h^2. Throws on zero mass.
MassProperties body_mass_and_inertia(const GridField& rho, const GridField& phi, Vec2 q);

/// Sub-cell area of {d > level}, each cell counted by clamp((d-level)/h + 1/2, 0, 1).
double smoothed_area(const SignedDistanceField& sdf, double level = 0.0);

}  // namespace slipfsi
