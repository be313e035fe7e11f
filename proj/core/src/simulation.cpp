#include <algorithm>
#include <cmath>
#include <sstream>

#include "slipfsi/error.hpp"
#include "slipfsi/momentum.hpp"

namespace slipfsi {

namespace {

void subtract_pressure_gradient(const GridField& p, ForceField& f) {
  const Grid& g = p.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) f.fx(i, j) -= (p(i, j) - p(i - 1, j)) / g.h;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.fy(i, j) -= (p(i, j) - p(i, j - 1)) / g.h;
}

double face_work(const ForceField& f, const VelocityField& u) {
  const double h2 = u.grid().h * u.grid().h;
  std::vector<double> terms;
  terms.reserve(u.u.size() + u.v.size());
  for (std::size_t k = 0; k < u.u.size(); ++k) terms.push_back(f.fx[k] * u.u[k] * h2);
  for (std::size_t k = 0; k < u.v.size(); ++k) terms.push_back(f.fy[k] * u.v[k] * h2);
  return pairwise_sum(terms);
}

void remove_mean(GridField& p) {
  const double mean = pairwise_sum(p.values()) / static_cast<double>(p.size());
  for (double& v : p.values()) v -= mean;
}

}  // namespace

struct Simulation::Impl {
  Grid grid;
  PenalizationParams params;
  StepperOptions options;
  std::optional<SignedDistanceField> kernel;
  MaterialFields material;
  FlowState flow;
  Vec2 gravity{};
  WallMotion walls;
  int steps = 0;
  ViscousSolver viscous;
  PressureSolver pressure;

  Impl(const Grid& g, const PenalizationParams& p, const StepperOptions& o,
       std::optional<SignedDistanceField> k, GridField rho0, VelocityField u0, Vec2 grav,
       WallMotion w)
      : grid(g), params(p), options(o), kernel(std::move(k)), flow(g), gravity(grav), walls(w),
        viscous(g, w), pressure(g, w.periodic_x) {
    if (walls.periodic_x) throw InvalidArgument("Simulation: periodic walls are not supported");
    pressure.tolerance = options.poisson_tol;
    rebuild_material(std::move(rho0));
    flow.vel = std::move(u0);
    zero_boundary_normal(flow.vel);
    if (options.incremental_pressure && (gravity.x != 0.0 || gravity.y != 0.0)) {
      // pressure consistent with the body force at rest, so the first
      // increment does not have to build the hydrostatic balance
      VelocityField accel(grid);
      accel.u.fill(gravity.x);
      accel.v.fill(gravity.y);
      zero_boundary_normal(accel);
      flow.p = pressure.solve(accel, material.rho, 1.0).p;
    }
  }

  void rebuild_material(GridField rho) {
    if (kernel) {
      material = build_material(*kernel, std::move(rho), params);
    } else {
      material.zones = {GridField(grid, Stagger::cell), GridField(grid, Stagger::cell),
                        GridField(grid, Stagger::cell, 1.0)};
      material.mu = viscosity_field(material.zones, params);
      material.zeta = GridField(grid, Stagger::cell);
      material.rho = std::move(rho);
    }
  }

  double choose_dt(double dt_limit) const {
    double dt = std::min(options.dt_max, dt_limit);
    const double umax = flow.vel.max_abs();
    if (umax > 0.0) dt = std::min(dt, options.cfl * grid.h / umax);
    if (!(dt >= options.dt_min)) {
      std::ostringstream os;
      os << "time step " << dt << " fell below the floor " << options.dt_min << " at t=" << flow.t;
      throw NumericalError(os.str());
    }
    return dt;
  }

  void body_loads(const VelocityField& u_visc, const ForceField& force, StepReport& rep) const {
    if (!kernel) return;
    const GridField phi = tracking_indicator(*kernel, params.delta);
    const double area = grid.h * grid.h;
    const VelocityField fv = viscous.viscous_force(u_visc, material.mu);
    double mx = 0.0, my = 0.0, m = 0.0;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double w = material.rho(i, j) * phi(i, j) * area;
        const Vec2 x = grid.cell_center(i, j);
        m += w;
        mx += w * x.x;
        my += w * x.y;
      }
    const Vec2 q = m > 0.0 ? Vec2{mx / m, my / m} : Vec2{};
    Vec2 total{};
    double torque = 0.0;
    const GridField& p = flow.p;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 1; i < grid.nx; ++i) {
        const double wphi = 0.5 * (phi(i - 1, j) + phi(i, j));
        if (wphi == 0.0) continue;
        const double f = fv.u(i, j) + force.fx(i, j) * area - grid.h * (p(i, j) - p(i - 1, j));
        total.x += wphi * f;
        torque += wphi * cross(flow.vel.u.position(i, j) - q, {f, 0.0});
      }
    for (int j = 1; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double wphi = 0.5 * (phi(i, j - 1) + phi(i, j));
        if (wphi == 0.0) continue;
        const double f = fv.v(i, j) + force.fy(i, j) * area - grid.h * (p(i, j) - p(i, j - 1));
        total.y += wphi * f;
        torque += wphi * cross(flow.vel.v.position(i, j) - q, {0.0, f});
      }
    rep.body_force = total;
    rep.body_torque = torque;
  }

  // Viscous predictor and pressure solved together: preconditioned CG on
  // the Schur complement h^2 G^T A^{-1} G for the pressure increment, then
  // an exact projection of the final predictor.
  int coupled_solve(const VelocityField& u_adv, const ForceField& force, bool forced, double dt,
                    ViscousSolver::Result& visc, PressureSolver::Result& proj) {
    int sweeps = 0;
    const GridField& rho = material.rho;
    const GridField& mu = material.mu;
    GridField p = flow.p;
    auto predictor = [&](const GridField& q) {
      ForceField drive = force;
      subtract_pressure_gradient(q, drive);
      return viscous.solve(u_adv, rho, mu, &drive, dt, &material.zones);
    };
    visc = predictor(p);
    GridField r = divergence(visc.vel);
    auto cell_dot = [&](const GridField& a, const GridField& b) {
      std::vector<double> t(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) t[k] = a[k] * b[k];
      return pairwise_sum(t);
    };
    // T d = div A^{-1}(-h^2 G d), wall data cancelled; T is SPD on zero-mean fields
    const VelocityField zero(grid);
    VelocityField base;
    if (!walls.at_rest()) base = viscous.solve(zero, rho, mu, nullptr, dt).vel;
    auto apply = [&](const GridField& d) {
      ForceField f(grid);
      subtract_pressure_gradient(d, f);
      VelocityField w = viscous.solve(zero, rho, mu, &f, dt).vel;
      if (!walls.at_rest()) {
        for (std::size_t k = 0; k < w.u.size(); ++k) w.u[k] -= base.u[k];
        for (std::size_t k = 0; k < w.v.size(); ++k) w.v[k] -= base.v[k];
      }
      return divergence(w);
    };
    // solve T x = -r; preconditioner z = pressure_for(-res)
    GridField res = r;
    for (double& v : res.values()) v = -v;
    const double r0 = std::sqrt(cell_dot(res, res));
    if (r0 > 0.0 && options.pressure_iterations > 0) {
      GridField x(grid, Stagger::cell);
      // Cahouet-Chabard: inertial part through the Poisson solve, viscous
      // part as mu times the identity
      auto precondition = [&](const GridField& v) {
        GridField d = v;
        for (double& e : d.values()) e = -e;
        GridField z = pressure.pressure_for(d, rho, dt);
        for (std::size_t k = 0; k < z.size(); ++k) z[k] += mu[k] * v[k];
        return z;
      };
      GridField z = precondition(res);
      GridField dir = z;
      double rz = cell_dot(res, z);
      for (int it = 0; it < options.pressure_iterations; ++it) {
        ++sweeps;
        const GridField td = apply(dir);
        const double denom = cell_dot(dir, td);
        if (!(denom > 0.0)) break;
        const double alpha = rz / denom;
        for (std::size_t k = 0; k < x.size(); ++k) {
          x[k] += alpha * dir[k];
          res[k] -= alpha * td[k];
        }
        if (std::sqrt(cell_dot(res, res)) <= options.pressure_tol * r0) break;
        z = precondition(res);
        const double rz_new = cell_dot(res, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < dir.size(); ++k) dir[k] = z[k] + beta * dir[k];
      }
      for (std::size_t k = 0; k < p.size(); ++k) p[k] += x[k];
      visc = predictor(p);
    }
    visc.external_work = forced ? dt * face_work(force, visc.vel) : 0.0;
    proj = pressure.solve(visc.vel, rho, dt);
    for (std::size_t k = 0; k < p.size(); ++k) proj.p[k] += p[k];
    remove_mean(proj.p);
    return sweeps;
  }

  StepReport step(double dt_limit) {
    StepReport rep;
    const double dt = choose_dt(dt_limit);
    rep.dt = dt;
    rep.kinetic_energy_before = kinetic_energy(flow.vel, material.rho);
    const VelocityField& u_n = flow.vel;

    GridField rho_next;
    if (kernel) {
      const MollifiedVelocity ubar = mollify(u_n, params.delta);
      SignedDistanceField d = advect_levelset(*kernel, ubar, dt, options.levelset);
      if (options.reinit_every > 0 && (steps + 1) % options.reinit_every == 0) d = reinitialize(d);
      kernel = std::move(d);
      rho_next = advect_density(material.rho, options.mollified_density ? ubar.field : u_n, dt);
    } else {
      rho_next = advect_density(material.rho, u_n, dt);
    }
    rebuild_material(std::move(rho_next));

    const VelocityField u_adv = advect_velocity(u_n, dt, options.advection, walls);
    const ForceField force = gravity_force(material.rho, gravity);
    const bool forced = gravity.x != 0.0 || gravity.y != 0.0;
    ViscousSolver::Result visc;
    PressureSolver::Result proj;
    int sweeps = 0;
    if (options.incremental_pressure) {
      sweeps = coupled_solve(u_adv, force, forced, dt, visc, proj);
    } else {
      visc = viscous.solve(u_adv, material.rho, material.mu, forced ? &force : nullptr, dt,
                           &material.zones);
      proj = pressure.solve(visc.vel, material.rho, dt);
    }
    flow.vel = std::move(proj.vel);
    flow.p = std::move(proj.p);
    flow.t += dt;
    ++steps;

    rep.step = steps;
    rep.t = flow.t;
    rep.poisson_iterations = proj.iterations;
    rep.pressure_sweeps = sweeps;
    rep.diffusion_residual = visc.relative_residual;
    rep.dissipation_rate = visc.dissipation;
    rep.dissipation = dt * visc.dissipation.total();
    rep.external_work = visc.external_work;
    rep.kinetic_energy = kinetic_energy(flow.vel, material.rho);
    rep.max_divergence = normalized_max_divergence(flow.vel);
    rep.max_boundary_normal = max_boundary_normal_velocity(flow.vel);
    body_loads(visc.vel, force, rep);

    if (rep.max_boundary_normal != 0.0) {
      std::ostringstream os;
      os << "boundary normal velocity " << rep.max_boundary_normal << " is not zero at t=" << flow.t;
      throw NumericalError(os.str());
    }
    if (!(rep.max_divergence <= options.divergence_tol)) {
      std::ostringstream os;
      os << "normalized divergence " << rep.max_divergence << " exceeds "
         << options.divergence_tol << " at t=" << flow.t;
      throw NumericalError(os.str());
    }
    return rep;
  }
};

Simulation::Simulation(const Grid& grid, const PenalizationParams& params,
                       const StepperOptions& options, std::optional<SignedDistanceField> kernel_sdf,
                       GridField rho0, VelocityField u0, Vec2 gravity, WallMotion walls)
    : impl_(std::make_unique<Impl>(grid, params, options, std::move(kernel_sdf), std::move(rho0),
                                   std::move(u0), gravity, walls)) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

StepReport Simulation::step(double dt_limit) { return impl_->step(dt_limit); }

void Simulation::advance_to(double t_end, const std::function<void(const StepReport&)>& on_step) {
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  while (impl_->flow.t < t_end - eps) {
    const StepReport rep = step(t_end - impl_->flow.t);
    if (on_step) on_step(rep);
  }
}

const Grid& Simulation::grid() const { return impl_->grid; }
const FlowState& Simulation::flow() const { return impl_->flow; }
const MaterialFields& Simulation::material() const { return impl_->material; }
const std::optional<SignedDistanceField>& Simulation::kernel_sdf() const { return impl_->kernel; }
const PenalizationParams& Simulation::params() const { return impl_->params; }
const StepperOptions& Simulation::options() const { return impl_->options; }
Vec2 Simulation::gravity() const { return impl_->gravity; }
int Simulation::step_count() const { return impl_->steps; }
bool Simulation::has_body() const { return impl_->kernel.has_value(); }

SignedDistanceField Simulation::body_sdf() const {
  if (!impl_->kernel) throw InvalidArgument("body_sdf: simulation has no body");
  GridField d = impl_->kernel->values;
  for (double& v : d.values()) v += impl_->params.delta;
  return SignedDistanceField(std::move(d));
}

}  // namespace slipfsi
