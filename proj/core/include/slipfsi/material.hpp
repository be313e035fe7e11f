#pragma once

#include "slipfsi/geometry.hpp"
#include "slipfsi/grid.hpp"

namespace slipfsi {

/// Coefficients of the penalized mixture model.
struct PenalizationParams {
  double epsilon = 1e-3;  ///< body zone viscosity is 1/epsilon; mixture ring density is epsilon
  double delta = 0.03;    ///< mixture ring width
  double beta = 10.0;     ///< Navier slip friction coefficient (ring viscosity 2 delta beta)
  double mu_f = 0.01;     ///< fluid viscosity
  double rho_s = 2.0;     ///< body density
  double rho_f = 1.0;     ///< fluid density

  /// Throws ConfigError naming the first non-positive field.
  void validate() const;

  double body_viscosity() const { return 1.0 / epsilon; }
  double ring_viscosity() const { return 2.0 * delta * beta; }
  double fluid_viscosity() const { return 2.0 * mu_f; }
};

struct MaterialFields {
  GridField rho;
  GridField mu;
  ZoneIndicators zones;
  GridField zeta;  ///< indicator of the transported kernel S(zeta)
};

/// rho0 = epsilon chi0 + rho_f theta0 + rho_s phi0, cell-wise.
/// Throws InvalidArgument when the indicators overlap or leave a gap.
GridField init_density(const GridField& phi0, const GridField& chi0, const GridField& theta0,
                       const PenalizationParams& params);

/// mu = phi/epsilon + 2 delta beta chi + 2 mu_f theta, cell-wise.
GridField viscosity_field(const ZoneIndicators& zones, const PenalizationParams& params);

inline double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

/// Harmonic mean of the cells adjacent to each node (4 in the interior,
/// 2 on a side, 1 in a corner).
GridField node_viscosity(const GridField& mu_cells);

/// Harmonic mean of the two cells adjacent to each face (one at the boundary).
struct FaceViscosity {
  GridField x;
  GridField y;
};
FaceViscosity face_viscosity(const GridField& mu_cells);

/// Integrates zone and density fields into a MaterialFields bundle for the
/// transported kernel signed distance.
MaterialFields build_material(const SignedDistanceField& kernel_sdf, GridField rho,
                              const PenalizationParams& params);

}  // namespace slipfsi
