#include <cmath>
#include <numbers>

#include "slipfsi/error.hpp"
#include "slipfsi/harness.hpp"

namespace slipfsi {

namespace {

// Velocity whose faces inside the body carry the rigid motion, zero elsewhere.
VelocityField rigid_inside(const Grid& g, const BodyShape& shape, const RigidState& rs) {
  VelocityField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const Vec2 x = u.u.position(i, j);
      if (signed_distance(shape, x) > 0.0) u.u(i, j) = rigid_velocity(rs, x).x;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 x = u.v.position(i, j);
      if (signed_distance(shape, x) > 0.0) u.v(i, j) = rigid_velocity(rs, x).y;
    }
  return u;
}

// Discrete curl of A sin^2(pi x) sin^2(pi y) / pi in box coordinates:
// a single vortex with zero normal velocity on every wall.
VelocityField box_vortex(const Grid& g, double amplitude) {
  GridField psi(g, Stagger::node);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const Vec2 x = psi.position(i, j) - g.origin;
      const double sx = std::sin(std::numbers::pi * x.x / g.width());
      const double sy = std::sin(std::numbers::pi * x.y / g.height());
      psi(i, j) = amplitude * sx * sx * sy * sy / std::numbers::pi;
    }
  VelocityField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) u.u(i, j) = (psi(i, j + 1) - psi(i, j)) / g.h;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.v(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.h;
  return u;
}

}  // namespace

Simulation build_simulation(const SimConfig& config) {
  const Grid g = config.grid();
  const PenalizationParams& p = config.params;
  switch (config.kind) {
    case ScenarioKind::body: {
      const BodyShape shape = config.body.shape_value();
      const Vec2 q0 = shape_centroid(shape);
      SignedDistanceField body = sample_signed_distance(g, shape, Isometry::at_rest(q0));
      GridField k = body.values;
      for (double& v : k.values()) v -= p.delta;
      SignedDistanceField kernel(std::move(k));
      const ZoneIndicators z = zone_indicators(kernel, p.delta);
      GridField rho = init_density(z.phi, z.chi, z.theta, p);
      VelocityField u(g);
      if (config.body.velocity.x != 0.0 || config.body.velocity.y != 0.0 || config.body.omega != 0.0) {
        RigidState rs{Isometry::at_rest(q0), config.body.velocity, config.body.omega};
        u = project_initial_velocity(rigid_inside(g, shape, rs), rho);
      }
      return Simulation(g, p, config.stepper, std::move(kernel), std::move(rho), std::move(u), config.gravity);
    }
    case ScenarioKind::vortex: {
      GridField rho(g, Stagger::cell, p.rho_f);
      return Simulation(g, p, config.stepper, std::nullopt, std::move(rho),
                        box_vortex(g, config.vortex_amplitude), config.gravity);
    }
    case ScenarioKind::cavity: {
      GridField rho(g, Stagger::cell, p.rho_f);
      WallMotion walls;
      walls.top_u = config.lid_speed;
      return Simulation(g, p, config.stepper, std::nullopt, std::move(rho), VelocityField(g),
                        config.gravity, walls);
    }
    case ScenarioKind::couette:
      break;
  }
  throw InvalidArgument("build_simulation: the couette scenario is a steady solve (see couette_spec)");
}

CouetteSpec couette_spec(const SimConfig& config) {
  if (config.kind != ScenarioKind::couette) throw InvalidArgument("couette_spec: not a couette scenario");
  CouetteSpec s;
  s.n = config.cells;
  s.slab = config.couette_slab;
  s.wall_speed = config.couette_wall_speed;
  s.params = config.params;
  return s;
}

}  // namespace slipfsi
