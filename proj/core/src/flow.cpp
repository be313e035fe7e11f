#include <vector>

#include "slipfsi/momentum.hpp"

namespace slipfsi {

VelocityField face_density(const GridField& rho, bool periodic_x) {
  const Grid& g = rho.grid();
  VelocityField r(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      if (i == 0 || i == g.nx)
        r.u(i, j) = periodic_x ? 0.5 * (rho(0, j) + rho(g.nx - 1, j)) : rho(i == 0 ? 0 : g.nx - 1, j);
      else
        r.u(i, j) = 0.5 * (rho(i - 1, j) + rho(i, j));
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (j == 0) r.v(i, j) = rho(i, 0);
      else if (j == g.ny) r.v(i, j) = rho(i, g.ny - 1);
      else r.v(i, j) = 0.5 * (rho(i, j - 1) + rho(i, j));
    }
  return r;
}

ForceField gravity_force(const GridField& rho, Vec2 gravity) {
  const VelocityField rf = face_density(rho);
  ForceField f(rho.grid());
  for (std::size_t k = 0; k < f.fx.size(); ++k) f.fx[k] = rf.u[k] * gravity.x;
  for (std::size_t k = 0; k < f.fy.size(); ++k) f.fy[k] = rf.v[k] * gravity.y;
  return f;
}

double kinetic_energy(const VelocityField& vel, const GridField& rho) {
  const VelocityField rf = face_density(rho);
  const double area = vel.grid().h * vel.grid().h;
  std::vector<double> e;
  e.reserve(vel.u.size() + vel.v.size());
  for (std::size_t k = 0; k < vel.u.size(); ++k) e.push_back(0.5 * rf.u[k] * vel.u[k] * vel.u[k] * area);
  for (std::size_t k = 0; k < vel.v.size(); ++k) e.push_back(0.5 * rf.v[k] * vel.v[k] * vel.v[k] * area);
  return pairwise_sum(e);
}

}  // namespace slipfsi
