#pragma once

#include <string_view>

#include "slipfsi/geometry.hpp"
#include "slipfsi/grid.hpp"

namespace slipfsi {

/// Velocity smoothed by the compactly supported bump of radius delta.
struct MollifiedVelocity {
  VelocityField field;
  double delta = 0.0;
};

/// Normalized radial bump w(s) = (1-s)^4 (4s+1) on s = r/delta < 1.
double mollifier_profile(double s);

/// Componentwise convolution with the discretely normalized bump. Near the
/// walls the kernel is truncated and renormalized; boundary normal components
/// stay zero. Throws InvalidArgument when delta < 2h.
MollifiedVelocity mollify(const VelocityField& vel, double delta);

/// Same kernel applied to one staggered scalar field (no boundary handling).
GridField mollify_component(const GridField& f, double delta);

enum class LevelSetScheme { upwind1, weno3, weno5 };

LevelSetScheme parse_levelset_scheme(std::string_view name);
std::string_view to_string(LevelSetScheme scheme);

/// Transports d by the mollified field: d_t + (u . grad) d = 0 with TVD-RK3
/// in time (forward Euler for upwind1). Throws NumericalError when
/// max|u| dt / h > 0.9.
SignedDistanceField advect_levelset(const SignedDistanceField& d, const MollifiedVelocity& vel,
                                    double dt, LevelSetScheme scheme = LevelSetScheme::weno5);

/// Conservative MUSCL (superbee) transport of the cell density with SSP-RK2,
/// sub-cycled so each sub-step satisfies (|u|+|v|) dt/h <= 0.25.
/// Throws NumericalError on a negative result.
GridField advect_density(const GridField& rho, const VelocityField& vel, double dt);

struct ReinitReport {
  int sweeps = 0;
  std::size_t interface_segments = 0;
};

/// Rebuilds d as the exact distance to the piecewise-linear zero contour of
/// the input (marching squares on the cell-center lattice), keeping signs.
/// Cells adjacent to a sign change keep their values so the contour stays put
/// (divided by the local gradient norm when it is off by more than 10%), as do
/// cells within 4h whose gradient norm is already within 10% of one.
/// Throws NumericalError when the field has no zero crossing.
SignedDistanceField reinitialize(const SignedDistanceField& d, ReinitReport* report = nullptr);

/// max over cells of ||grad d| - 1| within |d| < band, central differences.
double gradient_norm_deviation(const SignedDistanceField& d, double band);

}  // namespace slipfsi
