#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slipfsi/error.hpp"
#include "slipfsi/geometry.hpp"

using namespace slipfsi;
using doctest::Approx;

namespace {

Grid box(double half, double h) {
  const int n = static_cast<int>(std::lround(2 * half / h));
  return Grid(n, n, h, {-half, -half});
}

double sum(const GridField& f) {
  double s = 0;
  for (double v : f.values()) s += v;
  return s;
}

}  // namespace

TEST_CASE("apply_isometry examples") {
  Isometry id = Isometry::at_rest({0, 0});
  CHECK(apply_isometry(id, {1, 2}) == Vec2{1, 2});

  Isometry shift{{3, 0}, Mat2::identity(), {0, 0}};
  CHECK(apply_isometry(shift, {1, 2}) == Vec2{4, 2});

  Isometry quarter{{0, 0}, Mat2::rotation(std::numbers::pi / 2), {0, 0}};
  const Vec2 y = apply_isometry(quarter, {1, 0});
  CHECK(y.x == Approx(0.0).epsilon(1e-15));
  CHECK(y.y == Approx(1.0));
}

TEST_CASE("apply_inverse undoes apply_isometry") {
  Isometry iso{{0.3, -0.2}, Mat2::rotation(0.7), {0.1, 0.4}};
  const Vec2 x = apply_inverse(iso, apply_isometry(iso, {0.25, 0.9}));
  CHECK(x.x == Approx(0.25));
  CHECK(x.y == Approx(0.9));
}

TEST_CASE("isometries preserve pairwise distances") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Isometry iso{{u(rng), u(rng)}, Mat2::rotation(u(rng)), {u(rng), u(rng)}};
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double d0 = norm(a - b);
    const double d1 = norm(apply_isometry(iso, a) - apply_isometry(iso, b));
    CHECK(std::abs(d1 - d0) <= 1e-12 * std::max(1.0, d0));
  }
}

TEST_CASE("rigid_velocity examples") {
  RigidState spin{Isometry::at_rest({0, 0}), {0, 0}, 1.0};
  CHECK(rigid_velocity(spin, {1, 0}) == Vec2{0, 1});

  RigidState slide{Isometry::at_rest({0, 0}), {2, 0}, 0.0};
  CHECK(rigid_velocity(slide, {-3, 7}) == Vec2{2, 0});

  RigidState both{Isometry::at_rest({1, 0}), {1, 1}, 2.0};
  CHECK(rigid_velocity(both, {1, 1}) == Vec2{-1, 1});
}

TEST_CASE("rigid_velocity sampled on a MAC grid has zero discrete strain") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  const Grid g(40, 30, 0.05, {-1, -0.5});
  for (int trial = 0; trial < 10; ++trial) {
    RigidState rs{Isometry::at_rest({u(rng), u(rng)}), {u(rng), u(rng)}, u(rng)};
    VelocityField f(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) f.u(i, j) = rigid_velocity(rs, f.u.position(i, j)).x;
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.v(i, j) = rigid_velocity(rs, f.v.position(i, j)).y;
    double worst = 0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        worst = std::max(worst, std::abs(f.u(i + 1, j) - f.u(i, j)) / g.h);
        worst = std::max(worst, std::abs(f.v(i, j + 1) - f.v(i, j)) / g.h);
      }
    for (int j = 1; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) {
        const double exy = 0.5 * ((f.u(i, j) - f.u(i, j - 1)) + (f.v(i, j) - f.v(i - 1, j))) / g.h;
        worst = std::max(worst, std::abs(exy));
      }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("advance_isometry examples") {
  RigidState slide{Isometry::at_rest({0, 0}), {1, 0}, 0.0};
  const Isometry a = advance_isometry(slide, 0.5);
  CHECK(a.q == Vec2{0.5, 0});
  CHECK(a.rot.a11 == 1.0);
  CHECK(a.rot.a12 == 0.0);

  RigidState half{Isometry::at_rest({0, 0}), {0, 0}, std::numbers::pi};
  const Isometry b = advance_isometry(half, 1.0);
  CHECK(b.rot.a11 == Approx(-1.0));
  CHECK(b.rot.a22 == Approx(-1.0));
  CHECK(std::abs(b.rot.a12) < 1e-15);
  CHECK(b.rot.det() == Approx(1.0));
}

TEST_CASE("1000 rotation steps match the closed-form rotation") {
  RigidState rs{Isometry::at_rest({0, 0}), {0, 0}, 1.0};
  for (int k = 0; k < 1000; ++k) rs.iso = advance_isometry(rs, 1e-3);
  const Mat2 ref = Mat2::rotation(1.0);
  CHECK(rs.iso.rot.a11 == Approx(ref.a11).epsilon(1e-12));
  CHECK(rs.iso.rot.a21 == Approx(ref.a21).epsilon(1e-12));
  CHECK(orthogonality_defect(rs.iso.rot) < 1e-10);
  CHECK(rs.iso.rot.det() == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("signed_distance for disks") {
  const Disk d{{0, 0}, 1};
  CHECK(signed_distance(d, {0, 0}) == 1.0);
  CHECK(signed_distance(d, {2, 0}) == -1.0);
  CHECK(signed_distance(d, {1, 0}) == 0.0);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  const Disk e{{0.3, -0.7}, 1.3};
  for (int k = 0; k < 100; ++k) {
    const Vec2 x{u(rng), u(rng)};
    CHECK(signed_distance(e, x) == 1.3 - norm(x - e.center));
  }
}

TEST_CASE("signed_distance for a square polygon") {
  const ConvexPolygon sq{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  CHECK(signed_distance(sq, {1, 1}) == Approx(1.0));
  CHECK(signed_distance(sq, {1, 0.5}) == Approx(0.5));
  CHECK(signed_distance(sq, {3, 1}) == Approx(-1.0));
  CHECK(signed_distance(sq, {3, 3}) == Approx(-std::sqrt(2.0)));
  CHECK(shape_centroid(sq).x == Approx(1.0));
}

TEST_CASE("degenerate and clockwise polygons are rejected") {
  CHECK_THROWS_AS(validate_shape(ConvexPolygon{{{0, 0}, {1, 0}}}), InvalidArgument);
  CHECK_THROWS_AS(validate_shape(ConvexPolygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}}), InvalidArgument);
  CHECK_THROWS_AS(validate_shape(Disk{{0, 0}, -1}), InvalidArgument);
}

TEST_CASE("signed distance with an isometry moves the shape") {
  const Disk d{{0, 0}, 0.5};
  Isometry iso{{2, 1}, Mat2::rotation(1.0), {0, 0}};
  CHECK(signed_distance(d, iso, {2, 1}) == Approx(0.5));
  CHECK(signed_distance(d, iso, {2.5, 1}) == Approx(0.0).epsilon(1e-14));
}

TEST_CASE("kernel_indicator examples") {
  const Grid g = box(1.25, 1.0 / 64);
  const SignedDistanceField sdf = sample_signed_distance(g, Disk{{0, 0}, 1}, Isometry::at_rest({0, 0}));
  const GridField k = kernel_indicator(sdf, 0.25);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(k(i, j) == (norm(g.cell_center(i, j)) < 0.75 ? 1.0 : 0.0));

  const GridField s = kernel_indicator(sdf, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(s(i, j) == (norm(g.cell_center(i, j)) < 1.0 ? 1.0 : 0.0));

  CHECK(sum(kernel_indicator(sdf, 1.0)) == 0.0);
  CHECK(sum(kernel_indicator(sdf, 2.0)) == 0.0);
}

TEST_CASE("kernel_indicator is monotone in delta") {
  const Grid g = box(1.25, 1.0 / 32);
  const SignedDistanceField sdf = sample_signed_distance(g, ConvexPolygon{{{-1, -1}, {1, -0.8}, {0.2, 1}}},
                                                         Isometry::at_rest({0, 0}));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 0.6);
  for (int trial = 0; trial < 20; ++trial) {
    double d1 = u(rng), d2 = u(rng);
    if (d1 > d2) std::swap(d1, d2);
    const GridField a = kernel_indicator(sdf, d1), b = kernel_indicator(sdf, d2);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(b[k] <= a[k]);
  }
}

TEST_CASE("zone_indicators of a disk kernel") {
  const double h = 1.0 / 64;
  const Grid g = box(1.0, h);
  const SignedDistanceField sdf = sample_signed_distance(g, Disk{{0, 0}, 0.5}, Isometry::at_rest({0, 0}));
  const ZoneIndicators z = zone_indicators(sdf, 0.1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double r = norm(g.cell_center(i, j));
      CHECK(z.phi(i, j) + z.chi(i, j) + z.theta(i, j) == 1.0);
      CHECK(z.phi(i, j) == (r < 0.6 ? 1.0 : 0.0));
      CHECK(z.chi(i, j) == (r >= 0.6 && r < 0.7 ? 1.0 : 0.0));
    }
  const double exact = std::numbers::pi * (0.7 * 0.7 - 0.6 * 0.6);
  CHECK(std::abs(sum(z.chi) * h * h / exact - 1.0) <= 3 * h / 0.1);
}

TEST_CASE("ring area converges to the annulus area") {
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const Grid g = box(1.0, h);
    const auto sdf = sample_signed_distance(g, Disk{{0.013, -0.021}, 0.5}, Isometry::at_rest({0, 0}));
    const ZoneIndicators z = zone_indicators(sdf, 0.1);
    const double err = std::abs(sum(z.chi) * h * h / (std::numbers::pi * 0.13) - 1.0);
    CHECK(err <= 3 * h / 0.1);
  }
}

TEST_CASE("zone_indicators is a partition of unity for random shapes") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const Grid g = box(1.0, 1.0 / 48);
  for (int trial = 0; trial < 10; ++trial) {
    const ConvexPolygon p{{{-0.3 + u(rng) * 0.2, -0.3}, {0.3, -0.3 + u(rng) * 0.2}, {0.3, 0.3}, {-0.3, 0.3}}};
    const auto sdf = sample_signed_distance(g, p, Isometry{{u(rng), u(rng)}, Mat2::rotation(u(rng) * 10), {0, 0}});
    const ZoneIndicators z = zone_indicators(sdf, 0.05 + 0.1 * std::abs(u(rng)));
    for (std::size_t k = 0; k < z.phi.size(); ++k) {
      CHECK(z.phi[k] + z.chi[k] + z.theta[k] == 1.0);
      CHECK(z.phi[k] * z.chi[k] == 0.0);
    }
  }
}

TEST_CASE("zone_indicators rejects a ring wider than the domain allows") {
  const Grid g = box(1.0, 1.0 / 16);
  const auto sdf = sample_signed_distance(g, Disk{{0, 0}, 0.2}, Isometry::at_rest({0, 0}));
  CHECK_THROWS_AS(zone_indicators(sdf, 0.6), InvalidArgument);
  CHECK_THROWS_AS(zone_indicators(sdf, 0.0), InvalidArgument);
}

TEST_CASE("body_mass_and_inertia of a uniform disk") {
  const double h = 1.0 / 64;
  const Grid g = box(1.5, h);
  const auto sdf = sample_signed_distance(g, Disk{{0, 0}, 1}, Isometry::at_rest({0, 0}));
  const GridField phi = kernel_indicator(sdf, 0.0);
  GridField rho(g, Stagger::cell, 2.0);
  const MassProperties mp = body_mass_and_inertia(rho, phi, {0, 0});
  CHECK(mp.mass == Approx(2 * std::numbers::pi).epsilon(0.02));
  CHECK(mp.inertia == Approx(std::numbers::pi).epsilon(0.02));
  CHECK(std::abs(mp.centroid.x) < 1e-12);

  GridField rho3(g, Stagger::cell, 6.0);
  const MassProperties m3 = body_mass_and_inertia(rho3, phi, {0, 0});
  CHECK(m3.mass == 3 * mp.mass);
  CHECK(m3.inertia == Approx(3 * mp.inertia).epsilon(1e-14));

  CHECK_THROWS(body_mass_and_inertia(rho, GridField(g, Stagger::cell), {0, 0}));
}
