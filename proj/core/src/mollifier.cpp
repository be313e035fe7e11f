#include <cmath>
#include <vector>

#include "slipfsi/error.hpp"
#include "slipfsi/transport.hpp"

namespace slipfsi {

double mollifier_profile(double s) {
  if (s >= 1.0) return 0.0;
  const double t = 1.0 - s;
  return t * t * t * t * (4.0 * s + 1.0);
}

namespace {

struct Tap {
  int di;
  int dj;
  double w;
};

std::vector<Tap> kernel_taps(double h, double delta) {
  std::vector<Tap> taps;
  const int r = static_cast<int>(std::ceil(delta / h));
  for (int dj = -r; dj <= r; ++dj)
    for (int di = -r; di <= r; ++di) {
      const double w = mollifier_profile(std::hypot(di, dj) * h / delta);
      if (w > 0.0) taps.push_back({di, dj, w});
    }
  return taps;
}

}  // namespace

GridField mollify_component(const GridField& f, double delta) {
  const double h = f.grid().h;
  if (delta < 2.0 * h) throw InvalidArgument("mollify: delta must be at least 2h");
  const auto taps = kernel_taps(h, delta);
  GridField out(f.grid(), f.stagger());
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) {
      double acc = 0.0;
      double wsum = 0.0;
      for (const Tap& t : taps) {
        const int ii = i + t.di;
        const int jj = j + t.dj;
        if (ii < 0 || jj < 0 || ii >= f.ni() || jj >= f.nj()) continue;
        acc += t.w * f(ii, jj);
        wsum += t.w;
      }
      out(i, j) = acc / wsum;
    }
  return out;
}

MollifiedVelocity mollify(const VelocityField& vel, double delta) {
  MollifiedVelocity m;
  m.delta = delta;
  m.field.u = mollify_component(vel.u, delta);
  m.field.v = mollify_component(vel.v, delta);
  zero_boundary_normal(m.field);
  return m;
}

}  // namespace slipfsi
