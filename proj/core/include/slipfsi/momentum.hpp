#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include "slipfsi/geometry.hpp"
#include "slipfsi/grid.hpp"
#include "slipfsi/material.hpp"
#include "slipfsi/transport.hpp"

namespace slipfsi {

/// Tangential velocities of the top/bottom walls and optional x-periodicity.
/// The normal velocity on every wall is always zero.
struct WallMotion {
  double top_u = 0.0;
  double bottom_u = 0.0;
  bool periodic_x = false;

  bool at_rest() const { return top_u == 0.0 && bottom_u == 0.0; }
};

struct FlowState {
  VelocityField vel;
  GridField p;
  double t = 0.0;

  FlowState() = default;
  explicit FlowState(const Grid& g) : vel(g), p(g, Stagger::cell) {}
};

/// Force density on the x- and y-faces.
struct ForceField {
  GridField fx;
  GridField fy;

  ForceField() = default;
  explicit ForceField(const Grid& g) : fx(g, Stagger::xface), fy(g, Stagger::yface) {}
};

/// rho_face * gravity.
ForceField gravity_force(const GridField& rho, Vec2 gravity);

/// Viscous dissipation rate sum mu |Du|^2 h^2 split by zone.
struct ZoneDissipation {
  double body = 0.0;
  double ring = 0.0;
  double fluid = 0.0;
  double total() const { return body + ring + fluid; }
};

/// Density averaged arithmetically to faces (adjacent cell at the walls).
VelocityField face_density(const GridField& rho, bool periodic_x = false);

/// 1/2 sum rho_face |u|^2 h^2.
double kinetic_energy(const VelocityField& vel, const GridField& rho);

enum class AdvectionScheme { semi_lagrangian, upwind };
AdvectionScheme parse_advection_scheme(std::string_view name);

/// Transport of each velocity component by the velocity itself. The
/// semi-Lagrangian default uses an RK2 backtrace and bilinear sampling with
/// wall ghosts; upwind is first order and throws NumericalError when the CFL
/// number exceeds 0.9.
VelocityField advect_velocity(const VelocityField& vel, double dt,
                              AdvectionScheme scheme = AdvectionScheme::semi_lagrangian,
                              const WallMotion& walls = {});

/// Implicit solve of rho (u - u*)/dt = div(mu Du) + f with the symmetric
/// discretization of Du on the MAC grid. The assembled matrix is
/// M/dt + K with K = sum over strain samples of w mu h^2 c c^T, so u^T K u
/// is exactly the discrete dissipation sum mu |Du|^2 h^2.
class ViscousSolver {
 public:
  explicit ViscousSolver(const Grid& grid, WallMotion walls = {});
  ~ViscousSolver();
  ViscousSolver(ViscousSolver&&) noexcept;
  ViscousSolver& operator=(ViscousSolver&&) noexcept;

  struct Result {
    VelocityField vel;
    ZoneDissipation dissipation;   ///< rates evaluated at the new velocity
    double external_work = 0.0;    ///< dt * sum f . u h^2
    double relative_residual = 0.0;
  };

  /// `zones` is only used to split the dissipation; pass nullptr to book
  /// everything as fluid.
  Result solve(const VelocityField& u_star, const GridField& rho, const GridField& mu,
               const ForceField* force, double dt, const ZoneIndicators* zones = nullptr);

  /// Viscous force -K u + b (per face, already multiplied by h^2).
  VelocityField viscous_force(const VelocityField& vel, const GridField& mu) const;

  /// sum mu |Du|^2 h^2 split by zone.
  ZoneDissipation dissipation(const VelocityField& vel, const GridField& mu,
                              const ZoneIndicators* zones) const;

  double tolerance = 1e-9;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot wrapper around ViscousSolver.
ViscousSolver::Result diffuse(const VelocityField& u_star, const GridField& rho, const GridField& mu,
                              const ForceField* force, double dt,
                              const ZoneIndicators* zones = nullptr, WallMotion walls = {});

/// Variable-density pressure projection with homogeneous Neumann data:
/// div((1/rho) grad p) = div(u**)/dt, u = u** - (dt/rho) grad p, zero-mean p.
class PressureSolver {
 public:
  explicit PressureSolver(const Grid& grid, bool periodic_x = false);
  ~PressureSolver();
  PressureSolver(PressureSolver&&) noexcept;
  PressureSolver& operator=(PressureSolver&&) noexcept;

  struct Result {
    VelocityField vel;
    GridField p;
    int iterations = 0;
    double relative_residual = 0.0;
  };

  Result solve(const VelocityField& u_star, const GridField& rho, double dt);

  /// Zero-mean p whose correction dt/rho grad p cancels a velocity
  /// divergence `div` (the Poisson back-solve on its own).
  GridField pressure_for(const GridField& div, const GridField& rho, double dt);

  double tolerance = 1e-10;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PressureSolver::Result project(const VelocityField& u_star, const GridField& rho, double dt,
                               bool periodic_x = false);

/// Numerical knobs of the time stepper.
struct StepperOptions {
  double cfl = 0.9;
  double dt_max = 1e-2;
  double dt_min = 1e-8;
  LevelSetScheme levelset = LevelSetScheme::weno5;
  AdvectionScheme advection = AdvectionScheme::semi_lagrangian;
  int reinit_every = 5;
  bool mollified_density = false;  ///< transport rho by the mollified field as well
  bool incremental_pressure = true; ///< predictor uses grad p, projection solves for the increment
  int pressure_iterations = 40;     ///< max PCG iterations on the pressure Schur complement
  double pressure_tol = 1e-6;       ///< relative PCG residual on the predictor divergence
  double poisson_tol = 1e-10;       ///< relative residual of each Poisson back-solve
  double divergence_tol = 1e-8;    ///< on max|div u| h / max|u|
};

struct StepReport {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  int poisson_iterations = 0;
  int pressure_sweeps = 0;           ///< Schur-complement PCG iterations
  double max_divergence = 0.0;       ///< normalized
  double max_boundary_normal = 0.0;
  double kinetic_energy_before = 0.0;
  double kinetic_energy = 0.0;
  ZoneDissipation dissipation_rate;   ///< sum mu |Du|^2 h^2 at the implicit velocity
  double dissipation = 0.0;           ///< dt * dissipation_rate.total()
  double external_work = 0.0;
  Vec2 body_force{};                  ///< sum over tracking-zone faces of (viscous + external - grad p) h^2
  double body_torque = 0.0;
  double diffusion_residual = 0.0;
};

/// The penalized mixture model advanced by operator splitting:
/// mollify -> level set -> zones/viscosity -> density -> velocity advection
/// -> implicit viscosity -> projection.
class Simulation {
 public:
  /// `kernel_sdf` is the signed distance of the transported kernel S(zeta);
  /// std::nullopt runs a body-free flow.
  Simulation(const Grid& grid, const PenalizationParams& params, const StepperOptions& options,
             std::optional<SignedDistanceField> kernel_sdf, GridField rho0, VelocityField u0,
             Vec2 gravity = {}, WallMotion walls = {});
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Advances by one step of size <= min(dt_max, cfl h / max|u|).
  StepReport step(double dt_limit);

  /// Steps until `t_end` (last step shortened to land on it).
  void advance_to(double t_end, const std::function<void(const StepReport&)>& on_step = {});

  const Grid& grid() const;
  const FlowState& flow() const;
  const MaterialFields& material() const;
  const std::optional<SignedDistanceField>& kernel_sdf() const;
  const PenalizationParams& params() const;
  const StepperOptions& options() const;
  Vec2 gravity() const;
  int step_count() const;
  bool has_body() const;
  /// Signed distance of the body zone S(phi) = ]S(zeta)[_delta.
  SignedDistanceField body_sdf() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Divergence-free initial velocity obtained by projecting `raw` with density rho.
VelocityField project_initial_velocity(const VelocityField& raw, const GridField& rho);

}  // namespace slipfsi
