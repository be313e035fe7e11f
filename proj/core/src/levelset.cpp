#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "slipfsi/error.hpp"
#include "slipfsi/transport.hpp"

namespace slipfsi {

LevelSetScheme parse_levelset_scheme(std::string_view name) {
  if (name == "upwind1") return LevelSetScheme::upwind1;
  if (name == "weno3") return LevelSetScheme::weno3;
  if (name == "weno5") return LevelSetScheme::weno5;
  throw InvalidArgument("unknown level-set scheme '" + std::string(name) + "'");
}

std::string_view to_string(LevelSetScheme scheme) {
  switch (scheme) {
    case LevelSetScheme::upwind1: return "upwind1";
    case LevelSetScheme::weno3: return "weno3";
    case LevelSetScheme::weno5: return "weno5";
  }
  return "?";
}

namespace {

constexpr int kGhost = 3;

// Cell field padded with kGhost layers filled by linear extrapolation.
class Padded {
 public:
  explicit Padded(const GridField& f) : nx_(f.ni()), ny_(f.nj()), w_(nx_ + 2 * kGhost) {
    data_.assign(static_cast<std::size_t>(w_) * (ny_ + 2 * kGhost), 0.0);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) at(i, j) = f(i, j);
    for (int j = 0; j < ny_; ++j)
      for (int g = 1; g <= kGhost; ++g) {
        at(-g, j) = at(0, j) - g * (at(1, j) - at(0, j));
        at(nx_ - 1 + g, j) = at(nx_ - 1, j) + g * (at(nx_ - 1, j) - at(nx_ - 2, j));
      }
    for (int i = -kGhost; i < nx_ + kGhost; ++i)
      for (int g = 1; g <= kGhost; ++g) {
        at(i, -g) = at(i, 0) - g * (at(i, 1) - at(i, 0));
        at(i, ny_ - 1 + g) = at(i, ny_ - 1) + g * (at(i, ny_ - 1) - at(i, ny_ - 2));
      }
  }
  double& at(int i, int j) {
    return data_[static_cast<std::size_t>(j + kGhost) * w_ + (i + kGhost)];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(j + kGhost) * w_ + (i + kGhost)];
  }

 private:
  int nx_, ny_, w_;
  std::vector<double> data_;
};

double weno5(double v1, double v2, double v3, double v4, double v5) {
  const double p1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0;
  const double p2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0;
  const double p3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0;
  const double s1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) * (v1 - 2 * v2 + v3) +
                    0.25 * (v1 - 4 * v2 + 3 * v3) * (v1 - 4 * v2 + 3 * v3);
  const double s2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) * (v2 - 2 * v3 + v4) +
                    0.25 * (v2 - v4) * (v2 - v4);
  const double s3 = 13.0 / 12.0 * (v3 - 2 * v4 + v5) * (v3 - 2 * v4 + v5) +
                    0.25 * (3 * v3 - 4 * v4 + v5) * (3 * v3 - 4 * v4 + v5);
  const double vmax = std::max({v1 * v1, v2 * v2, v3 * v3, v4 * v4, v5 * v5});
  const double eps = 1e-6 * vmax + 1e-99;
  const double a1 = 0.1 / ((s1 + eps) * (s1 + eps));
  const double a2 = 0.6 / ((s2 + eps) * (s2 + eps));
  const double a3 = 0.3 / ((s3 + eps) * (s3 + eps));
  return (a1 * p1 + a2 * p2 + a3 * p3) / (a1 + a2 + a3);
}

double weno3(double v1, double v2, double v3) {
  const double p0 = 0.5 * (3.0 * v2 - v1);
  const double p1 = 0.5 * (v2 + v3);
  const double vmax = std::max({v1 * v1, v2 * v2, v3 * v3});
  const double eps = 1e-6 * vmax + 1e-99;
  const double b0 = (v2 - v1) * (v2 - v1);
  const double b1 = (v3 - v2) * (v3 - v2);
  const double a0 = (1.0 / 3.0) / ((b0 + eps) * (b0 + eps));
  const double a1 = (2.0 / 3.0) / ((b1 + eps) * (b1 + eps));
  return (a0 * p0 + a1 * p1) / (a0 + a1);
}

// One-sided derivative along a line of samples f(-3..3) centred on the cell.
// `minus` selects the backward-biased (upwind for positive speed) derivative.
template <class Line>
double upwind_derivative(const Line& f, double h, bool minus, LevelSetScheme scheme) {
  auto diff = [&](int k) { return (f(k) - f(k - 1)) / h; };  // backward difference ending at k
  switch (scheme) {
    case LevelSetScheme::upwind1:
      return minus ? diff(0) : diff(1);
    case LevelSetScheme::weno3:
      return minus ? weno3(diff(-1), diff(0), diff(1)) : weno3(diff(2), diff(1), diff(0));
    case LevelSetScheme::weno5:
      return minus ? weno5(diff(-2), diff(-1), diff(0), diff(1), diff(2))
                   : weno5(diff(3), diff(2), diff(1), diff(0), diff(-1));
  }
  return 0.0;
}

GridField transport_rate(const GridField& d, const std::vector<Vec2>& vel, LevelSetScheme scheme) {
  const Padded p(d);
  const double h = d.grid().h;
  GridField rate(d.grid(), Stagger::cell);
  for (int j = 0; j < d.nj(); ++j)
    for (int i = 0; i < d.ni(); ++i) {
      const Vec2 a = vel[d.index(i, j)];
      double r = 0.0;
      if (a.x != 0.0) {
        auto line = [&](int k) { return p(i + k, j); };
        r -= a.x * upwind_derivative(line, h, a.x > 0.0, scheme);
      }
      if (a.y != 0.0) {
        auto line = [&](int k) { return p(i, j + k); };
        r -= a.y * upwind_derivative(line, h, a.y > 0.0, scheme);
      }
      rate(i, j) = r;
    }
  return rate;
}

}  // namespace

SignedDistanceField advect_levelset(const SignedDistanceField& d, const MollifiedVelocity& vel,
                                    double dt, LevelSetScheme scheme) {
  const Grid& g = d.grid();
  if (g.nx < 2 || g.ny < 2) throw InvalidArgument("advect_levelset: grid too small");
  const double h = g.h;
  if (vel.field.max_abs() * dt / h > 0.9 * (1.0 + 1e-12))
    throw NumericalError("advect_levelset: CFL number exceeds 0.9");

  std::vector<Vec2> centre(g.cell_count());
  bool moving = false;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 a = vel.field.at_cell(i, j);
      centre[d.values.index(i, j)] = a;
      moving = moving || a.x != 0.0 || a.y != 0.0;
    }
  if (!moving) return d;

  const GridField& d0 = d.values;
  if (scheme == LevelSetScheme::upwind1) {
    GridField out = d0;
    const GridField r = transport_rate(d0, centre, scheme);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += dt * r[k];
    return SignedDistanceField(std::move(out));
  }

  // TVD Runge-Kutta 3.
  GridField d1 = d0;
  GridField r = transport_rate(d0, centre, scheme);
  for (std::size_t k = 0; k < d1.size(); ++k) d1[k] = d0[k] + dt * r[k];
  GridField d2 = d1;
  r = transport_rate(d1, centre, scheme);
  for (std::size_t k = 0; k < d2.size(); ++k) d2[k] = 0.75 * d0[k] + 0.25 * (d1[k] + dt * r[k]);
  GridField out = d2;
  r = transport_rate(d2, centre, scheme);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = d0[k] / 3.0 + 2.0 / 3.0 * (d2[k] + dt * r[k]);
  return SignedDistanceField(std::move(out));
}

namespace {

struct Segment {
  Vec2 a;
  Vec2 b;
};

double segment_distance(Vec2 x, const Segment& s) {
  const Vec2 ab = s.b - s.a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(x - s.a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(x - (s.a + t * ab));
}

// Zero contour of the bilinear interpolant restricted to lattice edges.
std::vector<Segment> zero_contour(const GridField& d) {
  const Grid& g = d.grid();
  std::vector<Segment> segs;
  auto crossing = [&](int i0, int j0, int i1, int j1) {
    const double a = d(i0, j0);
    const double b = d(i1, j1);
    const double t = a / (a - b);
    const Vec2 p0 = g.cell_center(i0, j0);
    const Vec2 p1 = g.cell_center(i1, j1);
    return p0 + t * (p1 - p0);
  };
  auto positive = [&](int i, int j) { return d(i, j) > 0.0; };
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      // corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      std::vector<Vec2> pts;
      std::vector<int> edge_of;
      for (int e = 0; e < 4; ++e) {
        const int n = (e + 1) % 4;
        if (positive(ci[e], cj[e]) != positive(ci[n], cj[n])) {
          pts.push_back(crossing(ci[e], cj[e], ci[n], cj[n]));
          edge_of.push_back(e);
        }
      }
      if (pts.size() == 2) {
        segs.push_back({pts[0], pts[1]});
      } else if (pts.size() == 4) {
        // Saddle: pair crossings so the positive region stays connected
        // when the cell-average is positive.
        const double centre = 0.25 * (d(i, j) + d(i + 1, j) + d(i + 1, j + 1) + d(i, j + 1));
        const bool corner0_positive = positive(i, j);
        if ((centre > 0.0) == corner0_positive) {
          segs.push_back({pts[0], pts[1]});
          segs.push_back({pts[2], pts[3]});
        } else {
          segs.push_back({pts[3], pts[0]});
          segs.push_back({pts[1], pts[2]});
        }
      }
    }
  return segs;
}

}  // namespace

SignedDistanceField reinitialize(const SignedDistanceField& d, ReinitReport* report) {
  // Band of well-scaled cells left alone; WENO stencils at the contour read it.
  constexpr double kKeepBand = 4.0;
  const Grid& g = d.grid();
  const auto segs = zero_contour(d.values);
  if (segs.empty()) throw NumericalError("reinitialize: empty zero level set");
  GridField out(g, Stagger::cell);
  // Cells with a sign change towards a neighbour keep their values, which
  // pins the zero contour; chord distances would pull convex sets inward.
  // Where the local gradient is far from unit they are divided by its norm,
  // which leaves the crossing between two like-scaled neighbours in place.
  auto grad_norm = [&](int i, int j) {
    const int il = std::max(i - 1, 0), ir = std::min(i + 1, g.nx - 1);
    const int jl = std::max(j - 1, 0), jr = std::min(j + 1, g.ny - 1);
    const double gx = (d.values(ir, j) - d.values(il, j)) / ((ir - il) * g.h);
    const double gy = (d.values(i, jr) - d.values(i, jl)) / ((jr - jl) * g.h);
    return std::hypot(gx, gy);
  };
  auto straddles = [&](int i, int j) {
    const double v = d.values(i, j);
    auto other = [&](int a, int b) {
      return a >= 0 && b >= 0 && a < g.nx && b < g.ny && (d.values(a, b) > 0.0) != (v > 0.0);
    };
    return v == 0.0 || other(i - 1, j) || other(i + 1, j) || other(i, j - 1) || other(i, j + 1);
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = d.values(i, j);
      if (straddles(i, j)) {
        const double gn = grad_norm(i, j);
        out(i, j) = std::abs(gn - 1.0) > 0.1 && gn > 0.0 ? v / gn : v;
        continue;
      }
      if (std::abs(v) < kKeepBand * g.h && std::abs(grad_norm(i, j) - 1.0) <= 0.1) {
        out(i, j) = v;
        continue;
      }
      const Vec2 x = g.cell_center(i, j);
      double dist = std::numeric_limits<double>::infinity();
      for (const Segment& s : segs) dist = std::min(dist, segment_distance(x, s));
      out(i, j) = v > 0.0 ? dist : (v < 0.0 ? -dist : 0.0);
    }
  if (report) {
    report->sweeps = 1;
    report->interface_segments = segs.size();
  }
  return SignedDistanceField(std::move(out));
}

double gradient_norm_deviation(const SignedDistanceField& d, double band) {
  const Grid& g = d.grid();
  double worst = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      if (std::abs(d.values(i, j)) >= band) continue;
      const double gx = (d.values(i + 1, j) - d.values(i - 1, j)) / (2 * g.h);
      const double gy = (d.values(i, j + 1) - d.values(i, j - 1)) / (2 * g.h);
      worst = std::max(worst, std::abs(std::hypot(gx, gy) - 1.0));
    }
  return worst;
}

}  // namespace slipfsi
