#include <algorithm>
#include <cmath>

#include "slipfsi/diagnostics.hpp"
#include "slipfsi/error.hpp"
#include "ring_rays.hpp"

namespace slipfsi {

namespace {

// Shear e_xy = (u_y + v_x)/2 at the nodes, mirrored zero ghosts at the walls.
GridField node_shear(const VelocityField& vel) {
  const Grid& g = vel.grid();
  const GridField& u = vel.u;
  const GridField& v = vel.v;
  GridField e(g, Stagger::node);
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const double u_hi = j < g.ny ? u(i, j) : -u(i, g.ny - 1);
      const double u_lo = j > 0 ? u(i, j - 1) : -u(i, 0);
      const double v_hi = i < g.nx ? v(i, j) : -v(g.nx - 1, j);
      const double v_lo = i > 0 ? v(i - 1, j) : -v(0, j);
      e(i, j) = 0.5 * ((u_hi - u_lo) + (v_hi - v_lo)) / g.h;
    }
  }
  return e;
}

Vec2 sdf_gradient(const GridField& d, int i, int j) {
  const Grid& g = d.grid();
  auto diff = [&](int a0, int b0, int a1, int b1, double span) { return (d(a1, b1) - d(a0, b0)) / span; };
  const double gx = i == 0        ? diff(0, j, 1, j, g.h)
                    : i == g.nx - 1 ? diff(i - 1, j, i, j, g.h)
                                    : diff(i - 1, j, i + 1, j, 2 * g.h);
  const double gy = j == 0        ? diff(i, 0, i, 1, g.h)
                    : j == g.ny - 1 ? diff(i, j - 1, i, j, g.h)
                                    : diff(i, j - 1, i, j + 1, 2 * g.h);
  return {gx, gy};
}

bool inside_domain(const Grid& g, Vec2 x) { return g.wall_distance(x) >= 0.0; }

}  // namespace

GridField strain_rate_squared(const VelocityField& vel) {
  const Grid& g = vel.grid();
  const GridField exy = node_shear(vel);
  GridField out(g, Stagger::cell);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double exx = (vel.u(i + 1, j) - vel.u(i, j)) / g.h;
      const double eyy = (vel.v(i, j + 1) - vel.v(i, j)) / g.h;
      const double s = exy(i, j) * exy(i, j) + exy(i + 1, j) * exy(i + 1, j) +
                       exy(i, j + 1) * exy(i, j + 1) + exy(i + 1, j + 1) * exy(i + 1, j + 1);
      out(i, j) = exx * exx + eyy * eyy + 0.5 * s;
    }
  }
  return out;
}

double rigid_deviation(const VelocityField& vel, const GridField& weight) {
  const GridField s = strain_rate_squared(vel);
  if (weight.stagger() != Stagger::cell || weight.size() != s.size())
    throw InvalidArgument("rigid_deviation: weight must be a cell field on the same grid");
  const double h2 = vel.grid().h * vel.grid().h;
  std::vector<double> terms(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) terms[k] = weight[k] * s[k] * h2;
  return std::sqrt(pairwise_sum(terms));
}

double SlipMeasurement::navier_mismatch(double beta) const {
  const double denom = std::abs(stress);
  if (denom == 0.0) return std::abs(beta * jump) == 0.0 ? 0.0 : INFINITY;
  return std::abs(stress - beta * jump) / denom;
}

namespace detail {

std::vector<RingRay> ring_rays(const SignedDistanceField& kernel_sdf, double delta) {
  const GridField& d = kernel_sdf.values;
  const Grid& g = d.grid();
  const double h = g.h;
  std::vector<RingRay> rays;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double dij = d(i, j);
      if (!(dij >= -delta && dij < -delta + h)) continue;
      const Vec2 grad = sdf_gradient(d, i, j);
      const double gn = norm(grad);
      if (gn < 1e-12) continue;
      RingRay r;
      r.n = grad * (-1.0 / gn);
      r.t = perp(r.n);
      r.xs = g.cell_center(i, j) + r.n * (dij + delta);
      r.xf = r.xs + r.n * delta;
      const Vec2 b2 = r.xs - r.n * (2 * h);
      const Vec2 f1 = r.xf + r.n * h, f2 = r.xf + r.n * (2 * h);
      if (!inside_domain(g, b2) || !inside_domain(g, f2)) continue;
      if (d.interpolate(b2) <= -delta || d.interpolate(f1) > -2 * delta) continue;
      rays.push_back(r);
    }
  }
  return rays;
}

}  // namespace detail

SlipMeasurement slip_jump(const VelocityField& vel, const SignedDistanceField& kernel_sdf, double delta,
                          double mu_f) {
  const double h = vel.grid().h;
  if (delta < 4.0 * h * (1.0 - 1e-12))
    throw InvalidArgument("slip_jump: unresolved ring (delta < 4h)");
  const auto rays = detail::ring_rays(kernel_sdf, delta);
  if (rays.empty()) throw InvalidArgument("slip_jump: no admissible rays across the ring");

  SlipMeasurement out;
  out.rays = rays.size();
  double jump_sum = 0.0, stress_sum = 0.0;
  for (const auto& r : rays) {
    const double us = dot(detail::extrapolate(vel, r.xs, -r.n, h), r.t);
    const double uf = dot(detail::extrapolate(vel, r.xf, r.n, h), r.t);
    const double uf1 = dot(vel.sample(r.xf + r.n * h), r.t);
    const double uf2 = dot(vel.sample(r.xf + r.n * (2 * h)), r.t);
    jump_sum += uf - us;
    stress_sum += mu_f * (uf2 - uf1) / h;
  }
  out.jump = jump_sum / static_cast<double>(out.rays);
  out.stress = stress_sum / static_cast<double>(out.rays);
  return out;
}

double CouetteResult::composite_error() const {
  return std::abs(std::abs(measured.jump) - jump_composite) / jump_composite;
}

double CouetteResult::sharp_error() const {
  return std::abs(std::abs(measured.jump) - jump_sharp) / jump_sharp;
}

CouetteResult couette_slip(const CouetteSpec& spec) {
  const PenalizationParams& p = spec.params;
  p.validate();
  if (spec.n < 8) throw InvalidArgument("couette_slip: need at least 8 cells");
  if (!(spec.slab > 0.0) || !(spec.slab + 2.0 * p.delta < 1.0))
    throw InvalidArgument("couette_slip: slab and ring must fit in the box");
  const Grid g(spec.n, spec.n, 1.0 / spec.n);
  const double h = g.h;
  if (p.delta < 4.0 * h * (1.0 - 1e-12))
    throw InvalidArgument("couette_slip: unresolved ring (delta < 4h)");

  GridField d(g, Stagger::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) d(i, j) = (spec.slab - p.delta) - g.cell_center(i, j).y;
  const SignedDistanceField kernel(d);
  const ZoneIndicators zones = zone_indicators(kernel, p.delta);
  const GridField rho = init_density(zones.phi, zones.chi, zones.theta, p);
  const GridField mu = viscosity_field(zones, p);

  WallMotion walls;
  walls.top_u = spec.wall_speed;
  walls.periodic_x = true;
  ViscousSolver solver(g, walls);
  // a huge step leaves only the steady operator K u = b
  const double dt = 1e12;
  CouetteResult out;
  out.vel = solver.solve(VelocityField(g), rho, mu, nullptr, dt).vel;
  out.h = h;
  out.measured = slip_jump(out.vel, kernel, p.delta, p.mu_f);

  // series resistances of the body, ring and fluid layers (stress = mu_cell u_y / 2)
  const double fluid = 1.0 - spec.slab - p.delta;
  const double r_body = 2.0 * p.epsilon * spec.slab;
  out.stress_composite = spec.wall_speed / (r_body + 1.0 / p.beta + fluid / p.mu_f);
  out.stress_sharp = spec.wall_speed / (r_body + 1.0 / p.beta + (1.0 - spec.slab) / p.mu_f);
  out.jump_composite = out.stress_composite / p.beta;
  out.jump_sharp = out.stress_sharp / p.beta;
  return out;
}

GridField body_interior(const GridField& phi) {
  const Grid& g = phi.grid();
  GridField out(g, Stagger::cell);
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      double m = 1.0;
      for (int b = -1; b <= 1; ++b)
        for (int a = -1; a <= 1; ++a) m = std::min(m, phi(i + a, j + b));
      out(i, j) = m;
    }
  return out;
}

double density_renormalization_check(const GridField& rho, const ZoneIndicators& zones,
                                     const PenalizationParams& params) {
  const double h2 = rho.grid().h * rho.grid().h;
  std::vector<double> terms(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double ref = params.rho_s * zones.phi[k] + params.epsilon * zones.chi[k] +
                       params.rho_f * zones.theta[k];
    terms[k] = std::abs(rho[k] - ref) * h2;
  }
  return pairwise_sum(terms);
}

}  // namespace slipfsi
