#include <algorithm>
#include <cmath>

#include "slipfsi/error.hpp"
#include "slipfsi/momentum.hpp"

namespace slipfsi {

AdvectionScheme parse_advection_scheme(std::string_view name) {
  if (name == "semi_lagrangian") return AdvectionScheme::semi_lagrangian;
  if (name == "upwind") return AdvectionScheme::upwind;
  throw InvalidArgument("unknown velocity advection scheme '" + std::string(name) + "'");
}

namespace {

// A velocity component extended by one ghost layer across the walls it is
// tangential to: u gets rows j=-1 and j=ny (value 2 U_wall - u), v gets
// columns i=-1 and i=nx (value -v).
class GhostedComponent {
 public:
  GhostedComponent(const GridField& f, const WallMotion& walls) : f_(f) {
    if (f.stagger() == Stagger::xface) {
      lo_ = walls.bottom_u;
      hi_ = walls.top_u;
    }
  }

  double at(int i, int j) const {
    if (f_.stagger() == Stagger::xface) {
      if (j < 0) return 2.0 * lo_ - f_(i, 0);
      if (j >= f_.nj()) return 2.0 * hi_ - f_(i, f_.nj() - 1);
    } else {
      if (i < 0) return -f_(0, j);
      if (i >= f_.ni()) return -f_(f_.ni() - 1, j);
    }
    return f_(i, j);
  }

  double sample(Vec2 x) const {
    const Grid& g = f_.grid();
    const bool xf = f_.stagger() == Stagger::xface;
    const double oi = xf ? 0.0 : 0.5;
    const double oj = xf ? 0.5 : 0.0;
    // Clamp to the physical domain, then interpolate on the ghosted lattice.
    const double px = std::clamp(x.x, g.origin.x, g.origin.x + g.width());
    const double py = std::clamp(x.y, g.origin.y, g.origin.y + g.height());
    const double fi = (px - g.origin.x) / g.h - oi;
    const double fj = (py - g.origin.y) / g.h - oj;
    const int ilo = xf ? 0 : -1;
    const int ihi = xf ? f_.ni() - 1 : f_.ni();
    const int jlo = xf ? -1 : 0;
    const int jhi = xf ? f_.nj() : f_.nj() - 1;
    const int i0 = std::clamp(static_cast<int>(std::floor(fi)), ilo, ihi - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(fj)), jlo, jhi - 1);
    const double a = std::clamp(fi - i0, 0.0, 1.0);
    const double b = std::clamp(fj - j0, 0.0, 1.0);
    return (1 - a) * (1 - b) * at(i0, j0) + a * (1 - b) * at(i0 + 1, j0) +
           (1 - a) * b * at(i0, j0 + 1) + a * b * at(i0 + 1, j0 + 1);
  }

 private:
  const GridField& f_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

VelocityField semi_lagrangian(const VelocityField& vel, double dt, const WallMotion& walls) {
  const Grid& g = vel.grid();
  const GhostedComponent gu(vel.u, walls);
  const GhostedComponent gv(vel.v, walls);
  auto velocity_at = [&](Vec2 x) { return Vec2{gu.sample(x), gv.sample(x)}; };
  auto backtrace = [&](Vec2 x) {
    const Vec2 mid = x - 0.5 * dt * velocity_at(x);
    return x - dt * velocity_at(mid);
  };
  VelocityField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) out.u(i, j) = gu.sample(backtrace(vel.u.position(i, j)));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.v(i, j) = gv.sample(backtrace(vel.v.position(i, j)));
  return out;
}

VelocityField upwind(const VelocityField& vel, double dt, const WallMotion& walls) {
  const Grid& g = vel.grid();
  const double h = g.h;
  if (vel.max_abs() * dt / h > 0.9 * (1.0 + 1e-12)) throw NumericalError("advect_velocity: CFL number exceeds 0.9");
  const GhostedComponent gu(vel.u, walls);
  const GhostedComponent gv(vel.v, walls);
  VelocityField out = vel;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double a = vel.u(i, j);
      const double b = 0.25 * (vel.v(i - 1, j) + vel.v(i, j) + vel.v(i - 1, j + 1) + vel.v(i, j + 1));
      const double dx = a > 0 ? gu.at(i, j) - gu.at(i - 1, j) : gu.at(i + 1, j) - gu.at(i, j);
      const double dy = b > 0 ? gu.at(i, j) - gu.at(i, j - 1) : gu.at(i, j + 1) - gu.at(i, j);
      out.u(i, j) = vel.u(i, j) - dt / h * (a * dx + b * dy);
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double a = 0.25 * (vel.u(i, j - 1) + vel.u(i + 1, j - 1) + vel.u(i, j) + vel.u(i + 1, j));
      const double b = vel.v(i, j);
      const double dx = a > 0 ? gv.at(i, j) - gv.at(i - 1, j) : gv.at(i + 1, j) - gv.at(i, j);
      const double dy = b > 0 ? gv.at(i, j) - gv.at(i, j - 1) : gv.at(i, j + 1) - gv.at(i, j);
      out.v(i, j) = vel.v(i, j) - dt / h * (a * dx + b * dy);
    }
  return out;
}

}  // namespace

VelocityField advect_velocity(const VelocityField& vel, double dt, AdvectionScheme scheme,
                              const WallMotion& walls) {
  if (walls.periodic_x) throw InvalidArgument("advect_velocity: periodic walls are not supported");
  if (vel.max_abs() == 0.0 && walls.at_rest()) return vel;
  VelocityField out = scheme == AdvectionScheme::upwind ? upwind(vel, dt, walls)
                                                        : semi_lagrangian(vel, dt, walls);
  zero_boundary_normal(out);
  return out;
}

}  // namespace slipfsi
