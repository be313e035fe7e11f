#pragma once

#include <vector>

#include "slipfsi/geometry.hpp"
#include "slipfsi/grid.hpp"

namespace slipfsi::detail {

/// Normal ray through the mixture ring: xs on the body face {d = -delta},
/// xf = xs + delta n on the fluid face, n the outward normal, t = perp(n).
struct RingRay {
  Vec2 xs, xf, n, t;
};

/// One ray per cell in the first layer inside the body face. Rays whose
/// two-sample stencils leave the domain or the expected zone are dropped.
std::vector<RingRay> ring_rays(const SignedDistanceField& kernel_sdf, double delta);

/// Linear extrapolation to `x0` from samples at x0 + a dir and x0 + 2a dir.
inline Vec2 extrapolate(const VelocityField& f, Vec2 x0, Vec2 dir, double a) {
  return f.sample(x0 + dir * a) * 2.0 - f.sample(x0 + dir * (2 * a));
}

}  // namespace slipfsi::detail
