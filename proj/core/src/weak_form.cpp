#include <cmath>
#include <numbers>

#include "slipfsi/diagnostics.hpp"
#include "slipfsi/error.hpp"
#include "ring_rays.hpp"

namespace slipfsi {

namespace {

double cutoff(double r, double r1, double r2) {
  if (r <= r1) return 1.0;
  if (r >= r2) return 0.0;
  const double s = (r - r1) / (r2 - r1);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double time_factor(double t, double t_end) {
  if (t >= t_end) return 0.0;
  const double s = 1.0 - t / t_end;
  return s * s;
}

double rigid_stream(TestMode mode, Vec2 r, Vec2 pivot) {
  switch (mode) {
    case TestMode::translate_x: return r.y;
    case TestMode::translate_y: return -r.x;
    case TestMode::rotate: return -0.5 * dot(r - pivot, r - pivot);
  }
  return 0.0;
}

double sum_faces(const VelocityField& a, const VelocityField& b, const VelocityField& w) {
  std::vector<double> terms;
  terms.reserve(a.u.size() + a.v.size());
  for (std::size_t k = 0; k < a.u.size(); ++k) terms.push_back(w.u[k] * a.u[k] * b.u[k]);
  for (std::size_t k = 0; k < a.v.size(); ++k) terms.push_back(w.v[k] * a.v[k] * b.v[k]);
  return pairwise_sum(terms);
}

struct Strain {
  GridField exx, eyy, exy;  // exy on interior nodes only
};

Strain strain(const VelocityField& f) {
  const Grid& g = f.grid();
  Strain s{GridField(g, Stagger::cell), GridField(g, Stagger::cell), GridField(g, Stagger::node)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      s.exx(i, j) = (f.u(i + 1, j) - f.u(i, j)) / g.h;
      s.eyy(i, j) = (f.v(i, j + 1) - f.v(i, j)) / g.h;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      s.exy(i, j) = 0.5 * ((f.u(i, j) - f.u(i, j - 1)) + (f.v(i, j) - f.v(i - 1, j))) / g.h;
  return s;
}

// sum mu Du : Dpsi h^2 with harmonic node viscosity.
double viscous_term(const VelocityField& u, const VelocityField& psi, const GridField& mu) {
  const Grid& g = u.grid();
  const Strain a = strain(u), b = strain(psi);
  const GridField mun = node_viscosity(mu);
  const double h2 = g.h * g.h;
  std::vector<double> terms;
  terms.reserve(g.cell_count() + mun.size());
  for (std::size_t k = 0; k < a.exx.size(); ++k)
    terms.push_back(mu[k] * (a.exx[k] * b.exx[k] + a.eyy[k] * b.eyy[k]) * h2);
  for (std::size_t k = 0; k < a.exy.size(); ++k) terms.push_back(2.0 * mun[k] * a.exy[k] * b.exy[k] * h2);
  return pairwise_sum(terms);
}

// sum rho (u (x) u) : Dpsi h^2.
double convective_term(const VelocityField& u, const VelocityField& psi, const GridField& rho) {
  const Grid& g = u.grid();
  const Strain b = strain(psi);
  const double h2 = g.h * g.h;
  std::vector<double> terms;
  terms.reserve(2 * g.cell_count());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 c = u.at_cell(i, j);
      terms.push_back(rho(i, j) * (c.x * c.x * b.exx(i, j) + c.y * c.y * b.eyy(i, j)) * h2);
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double un = 0.5 * (u.u(i, j - 1) + u.u(i, j));
      const double vn = 0.5 * (u.v(i - 1, j) + u.v(i, j));
      const double rn = 0.25 * (rho(i - 1, j - 1) + rho(i, j - 1) + rho(i - 1, j) + rho(i, j));
      terms.push_back(2.0 * rn * un * vn * b.exy(i, j) * h2);
    }
  return pairwise_sum(terms);
}

}  // namespace

VelocityField make_test_function(const Grid& grid, const TestFunctionSpec& spec, Vec2 q, double t) {
  if (!(spec.r_rigid > 0.0) || !(spec.r_support > spec.r_rigid) || !(spec.t_end > 0.0))
    throw InvalidArgument("test function: need 0 < r_rigid < r_support and t_end > 0");
  VelocityField psi(grid);
  const double eta = time_factor(t, spec.t_end);
  if (eta == 0.0) return psi;
  const Vec2 lo = grid.origin, hi = grid.origin + Vec2{grid.width(), grid.height()};
  const double room = std::min({q.x - lo.x, hi.x - q.x, q.y - lo.y, hi.y - q.y});
  if (!(room > spec.r_support + grid.h))
    throw InvalidArgument("test function: support reaches the domain boundary");

  GridField phi(grid, Stagger::node);
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) {
      const Vec2 r = phi.position(i, j) - q;
      phi(i, j) = eta * cutoff(norm(r), spec.r_rigid, spec.r_support) * rigid_stream(spec.mode, r, spec.pivot);
    }
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) psi.u(i, j) = (phi(i, j + 1) - phi(i, j)) / grid.h;
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) psi.v(i, j) = -(phi(i + 1, j) - phi(i, j)) / grid.h;
  return psi;
}

MomentumWeakForm::MomentumWeakForm(TestFunctionSpec spec, double beta, double delta, double mu_f)
    : spec_(spec), beta_(beta), delta_(delta), mu_f_(mu_f) {}

MomentumWeakForm::Snapshot MomentumWeakForm::capture(const Simulation& sim) const {
  Snapshot s;
  s.vel = sim.flow().vel;
  s.rho = sim.material().rho;
  s.mu = sim.material().mu;
  s.t = sim.flow().t;
  s.kernel = sim.kernel_sdf();
  const Grid& g = sim.grid();
  const GridField& phi = sim.material().zones.phi;
  if (sim.has_body()) {
    double m = 0.0, mx = 0.0, my = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double w = s.rho(i, j) * phi(i, j);
        m += w;
        mx += w * g.cell_center(i, j).x;
        my += w * g.cell_center(i, j).y;
      }
    if (m > 0.0) s.q = {mx / m, my / m};
  } else {
    s.q = g.origin + Vec2{0.5 * g.width(), 0.5 * g.height()};
  }
  s.psi = make_test_function(g, spec_, s.q, s.t);
  if (time_factor(s.t, spec_.t_end) > 0.0) {
    // psi must be rigid on the body zone
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (phi(i, j) > 0.0 && norm(g.cell_center(i, j) - s.q) + 1.5 * g.h > spec_.r_rigid)
          throw InvalidArgument("test function is not rigid on the body zone");
  }
  return s;
}

void MomentumWeakForm::start(const Simulation& sim) {
  prev_ = capture(sim);
  gravity_ = sim.gravity();
  const double init = sum_faces(prev_.vel, prev_.psi, face_density(prev_.rho));
  const double h2 = sim.grid().h * sim.grid().h;
  lhs_ = 0.0;
  rhs_ = -init * h2;
  magnitude_ = std::abs(init * h2);
  started_ = true;
}

void MomentumWeakForm::record(const Simulation& sim, const StepReport& report) {
  if (!started_) throw InvalidArgument("MomentumWeakForm: record before start");
  Snapshot cur = capture(sim);
  const double dt = report.dt;
  const double h2 = sim.grid().h * sim.grid().h;

  VelocityField dpsi = cur.psi;
  for (std::size_t k = 0; k < dpsi.u.size(); ++k) dpsi.u[k] -= prev_.psi.u[k];
  for (std::size_t k = 0; k < dpsi.v.size(); ++k) dpsi.v[k] -= prev_.psi.v[k];
  const double time_term = sum_faces(prev_.vel, dpsi, face_density(prev_.rho)) * h2;

  const VelocityField rf = face_density(cur.rho);
  const double conv = dt * convective_term(cur.vel, cur.psi, cur.rho);
  const double visc = dt * viscous_term(cur.vel, cur.psi, cur.mu);
  VelocityField g_field(sim.grid());
  g_field.u.fill(gravity_.x);
  g_field.v.fill(gravity_.y);
  const double force = dt * sum_faces(g_field, cur.psi, rf) * h2;

  double jump = 0.0;
  if (cur.kernel && time_factor(cur.t, spec_.t_end) > 0.0) {
    const double h = sim.grid().h;
    for (const auto& r : detail::ring_rays(*cur.kernel, delta_)) {
      const Vec2 us = detail::extrapolate(cur.vel, r.xs, -r.n, h);
      const Vec2 uf = detail::extrapolate(cur.vel, r.xf, r.n, h);
      const Vec2 ps = detail::extrapolate(cur.psi, r.xs, -r.n, h);
      // outer trace of psi carried back to the body face
      const Vec2 p1 = cur.psi.sample(r.xf + r.n * h), p2 = cur.psi.sample(r.xf + r.n * (2 * h));
      const Vec2 pf = p1 + (p1 - p2) * ((delta_ + h) / h);
      jump += beta_ * dot(us - uf, ps - pf) * h;
    }
    jump *= dt;
  }

  lhs_ += time_term + conv - visc + force;
  rhs_ += jump;
  magnitude_ += std::abs(time_term) + std::abs(conv) + std::abs(visc) + std::abs(force) + std::abs(jump);
  prev_ = std::move(cur);
}

double MomentumWeakForm::residual() const { return lhs_ - rhs_; }

double ScalarTestFunction::value(double t, Vec2 x) const {
  const double a = amplitude * (1.0 - t / t_end);
  if (constant_in_space) return a;
  const Vec2 r = x - origin;
  return a * std::cos(std::numbers::pi * r.x / lx) * std::cos(std::numbers::pi * r.y / ly);
}

double ScalarTestFunction::dt(double, Vec2 x) const {
  const double a = -amplitude / t_end;
  if (constant_in_space) return a;
  const Vec2 r = x - origin;
  return a * std::cos(std::numbers::pi * r.x / lx) * std::cos(std::numbers::pi * r.y / ly);
}

Vec2 ScalarTestFunction::grad(double t, Vec2 x) const {
  if (constant_in_space) return {};
  const double a = amplitude * (1.0 - t / t_end);
  const Vec2 r = x - origin;
  const double kx = std::numbers::pi / lx, ky = std::numbers::pi / ly;
  return {-a * kx * std::sin(kx * r.x) * std::cos(ky * r.y), -a * ky * std::cos(kx * r.x) * std::sin(ky * r.y)};
}

void MassWeakForm::start(const GridField& rho0, const VelocityField& u0, double t0) {
  const Grid& g = rho0.grid();
  std::vector<double> terms(rho0.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      terms[rho0.index(i, j)] = rho0(i, j) * xi_.value(t0, g.cell_center(i, j)) * g.h * g.h;
  acc_ = pairwise_sum(terms);
  rho_prev_ = rho0;
  u_prev_ = u0;
  t_prev_ = t0;
}

void MassWeakForm::record(const GridField& rho, const VelocityField& u, double t) {
  const Grid& g = rho.grid();
  const double dt = t - t_prev_;
  if (!(dt > 0.0)) throw InvalidArgument("MassWeakForm: time must increase");
  std::vector<double> terms(rho.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 x = g.cell_center(i, j);
      const double rate = xi_.dt(t_prev_, x) + dot(u_prev_.at_cell(i, j), xi_.grad(t_prev_, x));
      terms[rho.index(i, j)] = rho_prev_(i, j) * rate * g.h * g.h;
    }
  acc_ += dt * pairwise_sum(terms);
  rho_prev_ = rho;
  u_prev_ = u;
  t_prev_ = t;
}

}  // namespace slipfsi
