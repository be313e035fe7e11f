#include <algorithm>
#include <cmath>
#include <limits>

#include "slipfsi/diagnostics.hpp"
#include "slipfsi/error.hpp"

namespace slipfsi {

double wall_gap(const SignedDistanceField& body_sdf) {
  const GridField& d = body_sdf.values;
  const Grid& g = d.grid();
  double gap = std::numeric_limits<double>::infinity();
  auto crossing = [&](int i0, int j0, int i1, int j1) {
    const double a = d(i0, j0), b = d(i1, j1);
    if ((a > 0.0) == (b > 0.0)) return;
    const double s = a / (a - b);
    const Vec2 x = g.cell_center(i0, j0) + (g.cell_center(i1, j1) - g.cell_center(i0, j0)) * s;
    gap = std::min(gap, g.wall_distance(x));
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      // a body cell on the boundary row means contact
      if (d(i, j) > 0.0 && (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1))
        gap = std::min(gap, std::max(0.0, g.wall_distance(g.cell_center(i, j)) - d(i, j)));
      if (i + 1 < g.nx) crossing(i, j, i + 1, j);
      if (j + 1 < g.ny) crossing(i, j, i, j + 1);
    }
  if (!std::isfinite(gap)) {
    // no interface: either no body or it fills the domain
    return d.max() > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::max(0.0, gap);
}

BodySample measure_body(const Simulation& sim) {
  if (!sim.has_body()) throw InvalidArgument("measure_body: simulation has no body");
  const Grid& g = sim.grid();
  const MaterialFields& mat = sim.material();
  const GridField phi = tracking_indicator(*sim.kernel_sdf(), sim.params().delta);
  const VelocityField& vel = sim.flow().vel;
  const double area = g.h * g.h;

  BodySample s;
  s.t = sim.flow().t;
  double m = 0.0, mx = 0.0, my = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = mat.rho(i, j) * phi(i, j) * area;
      const Vec2 x = g.cell_center(i, j);
      m += w;
      mx += w * x.x;
      my += w * x.y;
    }
  if (!(m > 0.0)) throw NumericalError("measure_body: body zone has no mass");
  s.mass = m;
  s.q = {mx / m, my / m};
  s.inertia = body_mass_and_inertia(mat.rho, phi, s.q).inertia;

  const VelocityField rf = face_density(mat.rho);
  Vec2 p{};
  double l = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double w = 0.5 * (phi(i - 1, j) + phi(i, j));
      if (w == 0.0) continue;
      const double mu = w * rf.u(i, j) * vel.u(i, j) * area;
      p.x += mu;
      l += cross(vel.u.position(i, j) - s.q, {mu, 0.0});
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = 0.5 * (phi(i, j - 1) + phi(i, j));
      if (w == 0.0) continue;
      const double mv = w * rf.v(i, j) * vel.v(i, j) * area;
      p.y += mv;
      l += cross(vel.v.position(i, j) - s.q, {0.0, mv});
    }
  s.momentum = p;
  s.angular_momentum = l;
  s.v = p * (1.0 / m);
  s.omega = s.inertia > 0.0 ? l / s.inertia : 0.0;
  s.gap = wall_gap(sim.body_sdf());
  s.rigid_deviation = rigid_deviation(vel, body_interior(mat.zones.phi));
  s.kernel_area = smoothed_area(*sim.kernel_sdf());
  s.iso = Isometry::at_rest(s.q);
  return s;
}

BodySample measure_body(const Simulation& sim, const StepReport& report) {
  BodySample s = measure_body(sim);
  s.force = report.body_force;
  s.torque = report.body_torque;
  return s;
}

void BodyTrack::append(BodySample s) {
  if (!samples_.empty()) {
    const BodySample& prev = samples_.back();
    if (!(s.t > prev.t)) throw InvalidArgument("BodyTrack: time must increase");
    RigidState st{prev.iso, prev.v, prev.omega, prev.mass, prev.inertia};
    s.iso = advance_isometry(st, s.t - prev.t);
  }
  samples_.push_back(std::move(s));
}

BudgetCheck body_budget(const BodyTrack& track, double threshold) {
  BudgetCheck out;
  const auto s = track.samples();
  double lin_err = 0, lin_f = 0, lin_d = 0, ang_err = 0, ang_f = 0, ang_d = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double dt = s[k].t - s[k - 1].t;
    const Vec2 dp = (s[k].momentum - s[k - 1].momentum) * (1.0 / dt);
    const double dl = (s[k].angular_momentum - s[k - 1].angular_momentum) / dt;
    const Vec2 e = dp - s[k].force;
    lin_err += dt * dot(e, e);
    lin_f += dt * dot(s[k].force, s[k].force);
    lin_d += dt * dot(dp, dp);
    const double ea = dl - s[k].torque;
    ang_err += dt * ea * ea;
    ang_f += dt * s[k].torque * s[k].torque;
    ang_d += dt * dl * dl;
  }
  auto rel = [](double err, double a, double b, double floor) {
    const double den = std::max(a, b);
    return den > floor ? std::sqrt(err / den) : 0.0;
  };
  out.linear_residual = rel(lin_err, lin_f, lin_d, 0.0);
  out.angular_residual = rel(ang_err, ang_f, ang_d, 1e-16 * std::max(lin_f, lin_d));
  out.pass = out.linear_residual <= threshold && out.angular_residual <= threshold;
  return out;
}

int gap_non_monotone_steps(const BodyTrack& track, std::size_t skip, double slack) {
  const auto s = track.samples();
  int count = 0;
  for (std::size_t k = std::max<std::size_t>(skip, 1); k < s.size(); ++k)
    if (s[k].gap > s[k - 1].gap + slack) ++count;
  return count;
}

}  // namespace slipfsi
