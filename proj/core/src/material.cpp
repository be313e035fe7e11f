#include "slipfsi/material.hpp"

#include <cmath>

#include "slipfsi/error.hpp"

namespace slipfsi {

void PenalizationParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name, "must be finite and > 0");
  };
  positive(epsilon, "epsilon");
  positive(delta, "delta");
  positive(beta, "beta_slip");
  positive(mu_f, "mu_f");
  positive(rho_s, "rho_s");
  positive(rho_f, "rho_f");
}

GridField init_density(const GridField& phi0, const GridField& chi0, const GridField& theta0,
                       const PenalizationParams& params) {
  GridField rho(phi0.grid(), Stagger::cell);
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double sum = phi0[k] + chi0[k] + theta0[k];
    const bool binary = (phi0[k] == 0.0 || phi0[k] == 1.0) && (chi0[k] == 0.0 || chi0[k] == 1.0) &&
                        (theta0[k] == 0.0 || theta0[k] == 1.0);
    if (!binary || sum != 1.0)
      throw InvalidArgument("init_density: zone indicators overlap or leave a gap at cell " +
                            std::to_string(k));
    rho[k] = params.epsilon * chi0[k] + params.rho_f * theta0[k] + params.rho_s * phi0[k];
  }
  return rho;
}

GridField viscosity_field(const ZoneIndicators& zones, const PenalizationParams& params) {
  GridField mu(zones.phi.grid(), Stagger::cell);
  const double mb = params.body_viscosity();
  const double mr = params.ring_viscosity();
  const double mf = params.fluid_viscosity();
  for (std::size_t k = 0; k < mu.size(); ++k)
    mu[k] = mb * zones.phi[k] + mr * zones.chi[k] + mf * zones.theta[k];
  return mu;
}

GridField node_viscosity(const GridField& mu) {
  const Grid& g = mu.grid();
  GridField out(g, Stagger::node);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      double inv = 0.0;
      int n = 0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di;
          const int cj = j + dj;
          if (ci < 0 || cj < 0 || ci >= g.nx || cj >= g.ny) continue;
          inv += 1.0 / mu(ci, cj);
          ++n;
        }
      out(i, j) = n / inv;
    }
  return out;
}

FaceViscosity face_viscosity(const GridField& mu) {
  const Grid& g = mu.grid();
  FaceViscosity f{GridField(g, Stagger::xface), GridField(g, Stagger::yface)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      if (i == 0) f.x(i, j) = mu(0, j);
      else if (i == g.nx) f.x(i, j) = mu(g.nx - 1, j);
      else f.x(i, j) = harmonic_mean(mu(i - 1, j), mu(i, j));
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (j == 0) f.y(i, j) = mu(i, 0);
      else if (j == g.ny) f.y(i, j) = mu(i, g.ny - 1);
      else f.y(i, j) = harmonic_mean(mu(i, j - 1), mu(i, j));
    }
  return f;
}

MaterialFields build_material(const SignedDistanceField& kernel_sdf, GridField rho,
                              const PenalizationParams& params) {
  MaterialFields m;
  m.zones = zone_indicators(kernel_sdf, params.delta);
  m.mu = viscosity_field(m.zones, params);
  m.zeta = kernel_indicator(kernel_sdf, 0.0);
  m.rho = std::move(rho);
  return m;
}

}  // namespace slipfsi
