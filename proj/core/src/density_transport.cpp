#include <algorithm>
#include <cmath>

#include "slipfsi/error.hpp"
#include "slipfsi/transport.hpp"

namespace slipfsi {

namespace {

double superbee(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  const double s = a > 0.0 ? 1.0 : -1.0;
  a = std::abs(a);
  b = std::abs(b);
  return s * std::max(std::min(2 * a, b), std::min(a, 2 * b));
}

// -div(rho u) per cell using limited linear reconstruction on each face.
GridField flux_divergence(const GridField& rho, const VelocityField& vel) {
  const Grid& g = rho.grid();
  GridField sx(g, Stagger::cell);
  GridField sy(g, Stagger::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (i > 0 && i + 1 < g.nx)
        sx(i, j) = superbee(rho(i, j) - rho(i - 1, j), rho(i + 1, j) - rho(i, j));
      if (j > 0 && j + 1 < g.ny)
        sy(i, j) = superbee(rho(i, j) - rho(i, j - 1), rho(i, j + 1) - rho(i, j));
    }
  GridField fx(g, Stagger::xface);
  GridField fy(g, Stagger::yface);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double u = vel.u(i, j);
      const double face = u > 0.0 ? rho(i - 1, j) + 0.5 * sx(i - 1, j) : rho(i, j) - 0.5 * sx(i, j);
      fx(i, j) = u * face;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = vel.v(i, j);
      const double face = v > 0.0 ? rho(i, j - 1) + 0.5 * sy(i, j - 1) : rho(i, j) - 0.5 * sy(i, j);
      fy(i, j) = v * face;
    }
  GridField out(g, Stagger::cell);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = -(fx(i + 1, j) - fx(i, j) + fy(i, j + 1) - fy(i, j)) / g.h;
  return out;
}

}  // namespace

GridField advect_density(const GridField& rho, const VelocityField& vel, double dt) {
  const Grid& g = rho.grid();
  double cfl_sum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double a = std::max(std::abs(vel.u(i, j)), std::abs(vel.u(i + 1, j)));
      const double b = std::max(std::abs(vel.v(i, j)), std::abs(vel.v(i, j + 1)));
      cfl_sum = std::max(cfl_sum, (a + b) * dt / g.h);
    }
  if (cfl_sum == 0.0) return rho;

  const int substeps = std::max(1, static_cast<int>(std::ceil(cfl_sum / 0.25)));
  const double tau = dt / substeps;
  GridField cur = rho;
  for (int s = 0; s < substeps; ++s) {
    GridField r = flux_divergence(cur, vel);
    GridField stage = cur;
    for (std::size_t k = 0; k < stage.size(); ++k) stage[k] += tau * r[k];
    r = flux_divergence(stage, vel);
    for (std::size_t k = 0; k < cur.size(); ++k) cur[k] = 0.5 * (cur[k] + stage[k] + tau * r[k]);
  }
  if (cur.min() < 0.0) throw NumericalError("advect_density: negative density produced");
  return cur;
}

}  // namespace slipfsi
