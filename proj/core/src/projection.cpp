#include <Eigen/Sparse>
#include "sparse_spd.hpp"
#include <cmath>
#include <vector>

#include "slipfsi/error.hpp"
#include "slipfsi/momentum.hpp"

namespace slipfsi {

struct PressureSolver::Impl {
  Grid grid;
  bool periodic_x = false;
  detail::SpdFactorization ldlt;
  bool analyzed = false;
  GridField last_rho;
  VelocityField face_rho;
  Eigen::SparseMatrix<double> last_matrix;

  // Unknown index of a cell; cell 0 is pinned to zero.
  int id(int i, int j) const { return j * grid.nx + i - 1; }

  void factorize(const GridField& rho) {
    if (analyzed && rho == last_rho) return;
    const Grid& g = grid;
    const int n = static_cast<int>(g.cell_count()) - 1;
    face_rho = face_density(rho, periodic_x);
    const VelocityField& rf = face_rho;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * g.cell_count());
    auto couple = [&](int i0, int j0, int i1, int j1, double beta) {
      const int a = id(i0, j0);
      const int b = id(i1, j1);
      if (a >= 0) trip.emplace_back(a, a, beta);
      if (b >= 0) trip.emplace_back(b, b, beta);
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -beta);
        trip.emplace_back(b, a, -beta);
      }
    };
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 1; i < g.nx; ++i) couple(i - 1, j, i, j, 1.0 / rf.u(i, j));
      if (periodic_x && g.nx > 1) couple(g.nx - 1, j, 0, j, 1.0 / rf.u(0, j));
    }
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) couple(i, j - 1, i, j, 1.0 / rf.v(i, j));

    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      ldlt.analyzePattern(a);
      analyzed = true;
    }
    ldlt.factorize(a);
    if (ldlt.info() != Eigen::Success) throw NumericalError("project: factorization failed");
    last_matrix = std::move(a);
    last_rho = rho;
  }

  // Zero-mean p with div(u - dt/rho grad p) = 0 for a field of divergence `div`.
  GridField back_solve(const GridField& div, double dt, double tolerance, int& iterations,
                       double& relative_residual) {
    const Grid& g = grid;
    const int n = static_cast<int>(g.cell_count()) - 1;
    Eigen::VectorXd b(n);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int k = id(i, j);
        if (k >= 0) b[k] = -g.h * g.h * div(i, j) / dt;
      }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    iterations = 0;
    relative_residual = 0.0;
    if (bnorm > 0.0) {
      const Eigen::SparseMatrix<double>& a = last_matrix;
      x = ldlt.solve(b);
      iterations = 1;
      for (int it = 0; it < 3; ++it) {
        const Eigen::VectorXd res = b - a * x;
        relative_residual = res.norm() / bnorm;
        if (relative_residual <= tolerance) break;
        x += ldlt.solve(res);
        ++iterations;
      }
      relative_residual = (b - a * x).norm() / bnorm;
      if (!(relative_residual <= 1e3 * tolerance))
        throw NumericalError("project: Poisson solve did not converge");
    }
    GridField p(g, Stagger::cell);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int k = id(i, j);
        p(i, j) = k < 0 ? 0.0 : x[k];
      }
    const double mean = pairwise_sum(p.values()) / static_cast<double>(g.cell_count());
    for (double& v : p.values()) v -= mean;
    return p;
  }
};

PressureSolver::PressureSolver(const Grid& grid, bool periodic_x) : impl_(std::make_unique<Impl>()) {
  impl_->grid = grid;
  impl_->periodic_x = periodic_x;
}
PressureSolver::~PressureSolver() = default;
PressureSolver::PressureSolver(PressureSolver&&) noexcept = default;
PressureSolver& PressureSolver::operator=(PressureSolver&&) noexcept = default;

PressureSolver::Result PressureSolver::solve(const VelocityField& u_star, const GridField& rho,
                                             double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("project: dt must be positive");
  if (rho.min() <= 0.0) throw InvalidArgument("project: density must be positive");
  Impl& m = *impl_;
  const Grid& g = m.grid;

  VelocityField ustar = u_star;
  if (m.periodic_x)
    for (int j = 0; j < g.ny; ++j) ustar.u(g.nx, j) = ustar.u(0, j);

  Result r;
  r.p = GridField(g, Stagger::cell);
  if (g.cell_count() <= 1) {
    r.vel = ustar;
    return r;
  }
  m.factorize(rho);
  r.p = m.back_solve(divergence(ustar), dt, tolerance, r.iterations, r.relative_residual);

  const VelocityField& rf = m.face_rho;
  r.vel = ustar;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      r.vel.u(i, j) -= dt / rf.u(i, j) * (r.p(i, j) - r.p(i - 1, j)) / g.h;
  if (m.periodic_x)
    for (int j = 0; j < g.ny; ++j) {
      r.vel.u(0, j) -= dt / rf.u(0, j) * (r.p(0, j) - r.p(g.nx - 1, j)) / g.h;
      r.vel.u(g.nx, j) = r.vel.u(0, j);
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      r.vel.v(i, j) -= dt / rf.v(i, j) * (r.p(i, j) - r.p(i, j - 1)) / g.h;
  return r;
}

GridField PressureSolver::pressure_for(const GridField& div, const GridField& rho, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("project: dt must be positive");
  Impl& m = *impl_;
  if (m.grid.cell_count() <= 1) return GridField(m.grid, Stagger::cell);
  m.factorize(rho);
  int iterations = 0;
  double residual = 0.0;
  return m.back_solve(div, dt, tolerance, iterations, residual);
}

PressureSolver::Result project(const VelocityField& u_star, const GridField& rho, double dt,
                               bool periodic_x) {
  PressureSolver solver(u_star.grid(), periodic_x);
  return solver.solve(u_star, rho, dt);
}

VelocityField project_initial_velocity(const VelocityField& raw, const GridField& rho) {
  VelocityField v = raw;
  zero_boundary_normal(v);
  return project(v, rho, 1.0).vel;
}

}  // namespace slipfsi
