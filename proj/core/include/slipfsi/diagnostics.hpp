#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slipfsi/geometry.hpp"
#include "slipfsi/grid.hpp"
#include "slipfsi/material.hpp"
#include "slipfsi/momentum.hpp"

namespace slipfsi {

// ---------------------------------------------------------------------------
// Energy budget

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;      ///< E(t) after the step
  double dissipation = 0.0;  ///< D_k = dt * sum mu |Du|^2 h^2 over the step
  ZoneDissipation dissipation_by_zone;  ///< dt-weighted, per zone
  double work = 0.0;         ///< W_k = dt * sum g . u h^2 over the step
};

/// Append-only, time-ordered record of the kinetic energy budget.
class EnergyLedger {
 public:
  explicit EnergyLedger(double initial_energy = 0.0) : initial_(initial_energy) {}

  /// Throws InvalidArgument if `r.t` does not increase or D_k < 0.
  void append(const EnergyRecord& r);
  void append(const StepReport& report);

  double initial_energy() const { return initial_; }
  std::span<const EnergyRecord> records() const { return records_; }
  bool empty() const { return records_.empty(); }

 private:
  double initial_;
  std::vector<EnergyRecord> records_;
};

struct EnergyCheck {
  std::vector<double> residual;  ///< E_n + sum D - E_0 - sum W, per step
  double final_residual = 0.0;
  double worst_residual = 0.0;   ///< max over n
  double scale = 0.0;            ///< E_0 + sum |W|
  double tolerance = 0.0;
  bool pass = true;
};

/// PASS iff every cumulative residual is <= tol * (E_0 + sum |W_k|).
EnergyCheck energy_check(const EnergyLedger& ledger, double tol = 0.02);

// ---------------------------------------------------------------------------
// Solidification

struct RateFit {
  double alpha = 0.0;    ///< least-squares slope of log r vs log eps
  bool monotone = false; ///< r strictly decreasing as eps decreases
  bool pass = false;     ///< alpha >= min_alpha && monotone
};

/// Fits r_eps ~ eps^alpha. Needs >= 3 points spanning >= 2 decades.
RateFit solidification_rate(std::span<const double> eps, std::span<const double> r,
                            double min_alpha = 0.3);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Rigid-motion and strain measures

/// |Du|^2 at cell centres (node shear averaged to the centre, mirrored
/// zero-velocity ghosts at the walls).
GridField strain_rate_squared(const VelocityField& vel);

/// (sum over cells of w |Du|^2 h^2)^{1/2}.
double rigid_deviation(const VelocityField& vel, const GridField& weight);

// ---------------------------------------------------------------------------
// Slip layer

struct SlipMeasurement {
  double jump = 0.0;     ///< ray-averaged tangential jump (u_f - u_s) . t across the ring
  double stress = 0.0;   ///< ray-averaged mu_f d(u.t)/dn just outside the ring
  std::size_t rays = 0;
  /// Relative mismatch |stress - beta jump| / |stress|.
  double navier_mismatch(double beta) const;
};

/// Samples the tangential velocity traces across the mixture ring of the
/// kernel signed distance (ring = {-2 delta < d <= -delta}). Traces are
/// one-sided linear extrapolations from two samples at h and 2h beyond the
/// ring faces. Throws InvalidArgument when delta < 4h.
SlipMeasurement slip_jump(const VelocityField& vel, const SignedDistanceField& kernel_sdf,
                          double delta, double mu_f);

/// Steady shear flow in an x-periodic box: a slab body of height `slab` on
/// the bottom wall, its mixture ring, then fluid up to a lid moving at
/// `wall_speed`.
struct CouetteSpec {
  int n = 128;              ///< cells per side of the unit box
  double slab = 0.25;
  double wall_speed = 1.0;
  PenalizationParams params;
};

struct CouetteResult {
  SlipMeasurement measured;
  double stress_composite = 0.0;  ///< exact layered-medium stress for the ring model
  double stress_sharp = 0.0;      ///< stress with a sharp Navier interface at the slab
  double jump_composite = 0.0;    ///< stress_composite / beta
  double jump_sharp = 0.0;        ///< stress_sharp / beta
  VelocityField vel;
  double h = 0.0;

  /// Errors compare magnitudes; the ray tangent fixes the sign of the measured jump.
  /// ||measured jump| - jump_composite| / jump_composite.
  double composite_error() const;
  /// ||measured jump| - jump_sharp| / jump_sharp.
  double sharp_error() const;
};

/// Solves the steady problem (implicit viscous operator with a vanishing
/// mass term) and measures the slip jump across the ring.
CouetteResult couette_slip(const CouetteSpec& spec);

/// Rigid-deviation weight: body cells whose 3x3 neighbourhood lies in phi,
/// so every strain sample used is set by body velocities alone.
GridField body_interior(const GridField& phi);

// ---------------------------------------------------------------------------
// Body tracking

/// Mass, momenta and loads are sums over tracking_indicator; the rigid
/// deviation is over body_interior(phi).
struct BodySample {
  double t = 0.0;
  Vec2 q{};          ///< density-weighted centroid
  Vec2 v{};
  double omega = 0.0;
  double mass = 0.0;
  double inertia = 0.0;
  Vec2 momentum{};
  double angular_momentum = 0.0;
  Vec2 force{};
  double torque = 0.0;
  double gap = 0.0;
  double rigid_deviation = 0.0;
  double kernel_area = 0.0;
  Isometry iso;      ///< integrated from (v, omega)
};

/// dist[S, boundary]: smallest wall distance of the linearly interpolated
/// zero crossings of the body signed distance (0 on contact).
double wall_gap(const SignedDistanceField& body_sdf);

/// Rigid summary of the body zone of a running simulation.
BodySample measure_body(const Simulation& sim);
/// Same, with the loads of the step that produced the current state.
BodySample measure_body(const Simulation& sim, const StepReport& report);

class BodyTrack {
 public:
  void append(BodySample s);
  std::span<const BodySample> samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  const BodySample& back() const { return samples_.back(); }

 private:
  std::vector<BodySample> samples_;
};

struct BudgetCheck {
  double linear_residual = 0.0;   ///< ||d(mv)/dt - F|| / max(||F||, ||d(mv)/dt||)
  double angular_residual = 0.0;
  bool pass = true;
};

/// Compares finite differences of the body momenta with the recorded loads.
/// Angular histories below round-off (relative to the linear loads) count as exact.
BudgetCheck body_budget(const BodyTrack& track, double threshold = 0.10);

/// Number of steps where the gap increases, ignoring the first `skip` samples.
int gap_non_monotone_steps(const BodyTrack& track, std::size_t skip = 0, double slack = 0.0);

// ---------------------------------------------------------------------------
// Density structure and weak forms

/// sum |rho - (rho_s phi + eps chi + rho_f theta)| h^2.
double density_renormalization_check(const GridField& rho, const ZoneIndicators& zones,
                                     const PenalizationParams& params);

enum class TestMode { translate_x, translate_y, rotate };

/// Generated test function psi(t, x) = eta(t) curl(c(|x - q(t)|) Phi(x)) with
/// Phi the stream function of a unit rigid mode (rotation about q(t) + pivot),
/// c = 1 inside r_rigid and 0 beyond r_support, eta = (1 - t/t_end)^2.
struct TestFunctionSpec {
  TestMode mode = TestMode::translate_y;
  double t_end = 1.0;
  double r_rigid = 0.2;
  double r_support = 0.3;
  Vec2 pivot{};  ///< rotation centre relative to q; ignored for translations
};

/// Discrete divergence-free test field at time t for a body centred at q.
/// Throws InvalidArgument if the support reaches the walls.
VelocityField make_test_function(const Grid& grid, const TestFunctionSpec& spec, Vec2 q, double t);

/// Online quadrature of the momentum weak form over a simulation history.
/// Feed `start` with the initial state and `record` after every step.
class MomentumWeakForm {
 public:
  MomentumWeakForm(TestFunctionSpec spec, double beta, double delta, double mu_f);

  void start(const Simulation& sim);
  /// Call after each `sim.step`; uses the state stored by the previous call.
  void record(const Simulation& sim, const StepReport& report);

  /// LHS - RHS of the weak identity accumulated so far.
  double residual() const;
  /// Sum of the magnitudes of all accumulated terms (for normalization).
  double magnitude() const { return magnitude_; }

 private:
  struct Snapshot {
    VelocityField vel;
    GridField rho;
    GridField mu;
    Vec2 q{};
    double t = 0.0;
    VelocityField psi;
    std::optional<SignedDistanceField> kernel;
  };
  Snapshot capture(const Simulation& sim) const;

  TestFunctionSpec spec_;
  double beta_, delta_, mu_f_;
  Vec2 gravity_{};
  Snapshot prev_;
  double lhs_ = 0.0;
  double rhs_ = 0.0;
  double magnitude_ = 0.0;
  bool started_ = false;
};

/// Smooth scalar test function for the transport weak form:
/// xi(t,x) = (1 - t/t_end) cos(pi x / Lx) cos(pi y / Ly).
struct ScalarTestFunction {
  double t_end = 1.0;
  double lx = 1.0;
  double ly = 1.0;
  Vec2 origin{};
  double amplitude = 1.0;
  bool constant_in_space = false;  ///< xi = amplitude (1 - t/t_end)

  double value(double t, Vec2 x) const;
  double dt(double t, Vec2 x) const;
  Vec2 grad(double t, Vec2 x) const;
};

/// Online quadrature of the transport weak form
/// sum dt sum rho (xi_t + u . grad xi) h^2 + sum rho_0 xi(0) h^2.
class MassWeakForm {
 public:
  explicit MassWeakForm(ScalarTestFunction xi) : xi_(xi) {}
  void start(const GridField& rho0, const VelocityField& u0, double t0);
  /// State at the end of a step of length dt (the one that started from the previous state).
  void record(const GridField& rho, const VelocityField& u, double t);
  double residual() const { return acc_; }

 private:
  ScalarTestFunction xi_;
  GridField rho_prev_;
  VelocityField u_prev_;
  double t_prev_ = 0.0;
  double acc_ = 0.0;
};

}  // namespace slipfsi
