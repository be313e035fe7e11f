#include <Eigen/Sparse>
#include "sparse_spd.hpp"
#include <array>
#include <cmath>
#include <vector>

#include "slipfsi/error.hpp"
#include "slipfsi/momentum.hpp"

namespace slipfsi {

namespace {

void zero_walls(VelocityField& vel, bool periodic_x) {
  const Grid& g = vel.grid();
  if (!periodic_x)
    for (int j = 0; j < g.ny; ++j) vel.u(0, j) = vel.u(g.nx, j) = 0.0;
  for (int i = 0; i < g.nx; ++i) vel.v(i, 0) = vel.v(i, g.ny) = 0.0;
}

// One sample of the strain-rate tensor as an affine function of the unknown
// face velocities: e = sum c_k u_{idx_k} + c0. Its dissipation weight is
// weight * mu * h^2 * e^2 where mu comes from a cell or a node.
struct StrainSample {
  std::array<int, 4> idx{};
  std::array<double, 4> coef{};
  int terms = 0;
  double c0 = 0.0;
  double weight = 1.0;
  bool at_node = false;
  int mi = 0;  // cell (i,j) or node (i,j) providing mu
  int mj = 0;

  void add(int id, double c) {
    if (id < 0) return;
    for (int k = 0; k < terms; ++k)
      if (idx[k] == id) {
        coef[k] += c;
        return;
      }
    idx[terms] = id;
    coef[terms] = c;
    ++terms;
  }
};

}  // namespace

struct ViscousSolver::Impl {
  Grid grid;
  WallMotion walls;
  int nu = 0;  // number of u unknowns
  int n = 0;
  std::vector<int> uid;  // per xface sample, -1 when fixed to zero
  std::vector<int> vid;  // per yface sample
  std::vector<StrainSample> samples;
  detail::SpdFactorization ldlt;
  bool analyzed = false;
  // Inputs of the current factorization; reused when unchanged.
  GridField last_rho;
  GridField last_mu;
  double last_dt = 0.0;
  Eigen::SparseMatrix<double> last_matrix;

  Impl(const Grid& g, WallMotion w) : grid(g), walls(w) {
    const GridField ux(g, Stagger::xface);
    const GridField vy(g, Stagger::yface);
    uid.assign(ux.size(), -1);
    vid.assign(vy.size(), -1);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) {
        const bool wall = i == 0 || i == g.nx;
        if (walls.periodic_x ? i == g.nx : wall) continue;
        uid[ux.index(i, j)] = n++;
      }
    if (walls.periodic_x)
      for (int j = 0; j < g.ny; ++j) uid[ux.index(g.nx, j)] = uid[ux.index(0, j)];
    nu = n;
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) vid[vy.index(i, j)] = n++;
    build_samples(ux, vy);
  }

  int u_at(const GridField& ux, int i, int j) const { return uid[ux.index(i, j)]; }
  int v_at(const GridField& vy, int i, int j) const {
    if (walls.periodic_x) i = (i % grid.nx + grid.nx) % grid.nx;
    return vid[vy.index(i, j)];
  }

  void build_samples(const GridField& ux, const GridField& vy) {
    const double ih = 1.0 / grid.h;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        StrainSample exx;
        exx.add(u_at(ux, i + 1, j), ih);
        exx.add(u_at(ux, i, j), -ih);
        exx.mi = i;
        exx.mj = j;
        samples.push_back(exx);
        StrainSample eyy;
        eyy.add(v_at(vy, i, j + 1), ih);
        eyy.add(v_at(vy, i, j), -ih);
        eyy.mi = i;
        eyy.mj = j;
        samples.push_back(eyy);
      }
    const int ni = walls.periodic_x ? grid.nx - 1 : grid.nx;
    for (int j = 0; j <= grid.ny; ++j)
      for (int i = 0; i <= ni; ++i) {
        StrainSample e;
        e.at_node = true;
        e.mi = i;
        e.mj = j;
        // du/dy, with mirrored ghosts across the top and bottom walls
        if (j == 0) {
          e.add(u_at(ux, i, 0), 2.0 * ih * 0.5);
          e.c0 += -2.0 * walls.bottom_u * ih * 0.5;
        } else if (j == grid.ny) {
          e.add(u_at(ux, i, grid.ny - 1), -2.0 * ih * 0.5);
          e.c0 += 2.0 * walls.top_u * ih * 0.5;
        } else {
          e.add(u_at(ux, i, j), ih * 0.5);
          e.add(u_at(ux, i, j - 1), -ih * 0.5);
        }
        // dv/dx
        if (j > 0 && j < grid.ny) {
          if (!walls.periodic_x && i == 0) {
            e.add(v_at(vy, 0, j), 2.0 * ih * 0.5);
          } else if (!walls.periodic_x && i == grid.nx) {
            e.add(v_at(vy, grid.nx - 1, j), -2.0 * ih * 0.5);
          } else {
            e.add(v_at(vy, i, j), ih * 0.5);
            e.add(v_at(vy, i - 1, j), -ih * 0.5);
          }
        }
        double w = 2.0;  // |Du|^2 counts the off-diagonal entry twice
        if (j == 0 || j == grid.ny) w *= 0.5;
        if (!walls.periodic_x && (i == 0 || i == grid.nx)) w *= 0.5;
        e.weight = w;
        if (e.terms > 0 || e.c0 != 0.0) samples.push_back(e);
      }
  }

  // Cells adjacent to node (i,j), wrapped when periodic.
  int node_cells(int i, int j, std::array<std::size_t, 4>& out) const {
    int n_cells = 0;
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di) {
        int ci = i + di;
        const int cj = j + dj;
        if (cj < 0 || cj >= grid.ny) continue;
        if (walls.periodic_x) ci = (ci % grid.nx + grid.nx) % grid.nx;
        else if (ci < 0 || ci >= grid.nx) continue;
        out[n_cells++] = static_cast<std::size_t>(cj) * grid.nx + ci;
      }
    return n_cells;
  }

  double sample_mu(const StrainSample& s, const GridField& mu) const {
    if (!s.at_node) return mu(s.mi, s.mj);
    std::array<std::size_t, 4> cells{};
    const int nc = node_cells(s.mi, s.mj, cells);
    double inv = 0.0;
    for (int k = 0; k < nc; ++k) inv += 1.0 / mu[cells[k]];
    return nc / inv;
  }

  std::vector<double> pack(const VelocityField& vel) const {
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < uid.size(); ++k)
      if (uid[k] >= 0) x[uid[k]] = vel.u[k];
    for (std::size_t k = 0; k < vid.size(); ++k)
      if (vid[k] >= 0) x[vid[k]] = vel.v[k];
    return x;
  }

  template <class Vec>
  VelocityField unpack(const Vec& x) const {
    VelocityField vel(grid);
    for (std::size_t k = 0; k < uid.size(); ++k)
      if (uid[k] >= 0) vel.u[k] = x[uid[k]];
    for (std::size_t k = 0; k < vid.size(); ++k)
      if (vid[k] >= 0) vel.v[k] = x[vid[k]];
    return vel;
  }

  double strain(const StrainSample& s, const std::vector<double>& x) const {
    double e = s.c0;
    for (int k = 0; k < s.terms; ++k) e += s.coef[k] * x[s.idx[k]];
    return e;
  }

  ZoneDissipation dissipation(const std::vector<double>& x, const GridField& mu,
                              const ZoneIndicators* zones) const {
    const double area = grid.h * grid.h;
    std::vector<double> body, ring, fluid;
    body.reserve(samples.size());
    ring.reserve(samples.size());
    fluid.reserve(samples.size());
    auto book = [&](std::size_t cell, double value) {
      if (!zones) fluid.push_back(value);
      else if (zones->phi[cell] > 0.5) body.push_back(value);
      else if (zones->chi[cell] > 0.5) ring.push_back(value);
      else fluid.push_back(value);
    };
    for (const StrainSample& s : samples) {
      const double e = strain(s, x);
      const double rate = s.weight * sample_mu(s, mu) * area * e * e;
      if (!s.at_node) {
        book(static_cast<std::size_t>(s.mj) * grid.nx + s.mi, rate);
      } else {
        std::array<std::size_t, 4> cells{};
        const int nc = node_cells(s.mi, s.mj, cells);
        for (int k = 0; k < nc; ++k) book(cells[k], rate / nc);
      }
    }
    return {pairwise_sum(body), pairwise_sum(ring), pairwise_sum(fluid)};
  }
};

ViscousSolver::ViscousSolver(const Grid& grid, WallMotion walls)
    : impl_(std::make_unique<Impl>(grid, walls)) {}
ViscousSolver::~ViscousSolver() = default;
ViscousSolver::ViscousSolver(ViscousSolver&&) noexcept = default;
ViscousSolver& ViscousSolver::operator=(ViscousSolver&&) noexcept = default;

ViscousSolver::Result ViscousSolver::solve(const VelocityField& u_star, const GridField& rho,
                                           const GridField& mu, const ForceField* force, double dt,
                                           const ZoneIndicators* zones) {
  if (!(dt > 0.0)) throw InvalidArgument("diffuse: dt must be positive");
  if (rho.min() <= 0.0) throw InvalidArgument("diffuse: density must be positive");
  if (mu.min() <= 0.0) throw InvalidArgument("diffuse: viscosity must be positive");
  Impl& m = *impl_;
  const double area = m.grid.h * m.grid.h;
  const VelocityField rf = face_density(rho, m.walls.periodic_x);

  const bool reuse = m.analyzed && dt == m.last_dt && rho == m.last_rho && mu == m.last_mu;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m.n);
  std::vector<double> mass(m.n, 0.0);
  for (std::size_t k = 0; k < m.uid.size(); ++k)
    if (m.uid[k] >= 0) mass[m.uid[k]] = rf.u[k] * area;
  for (std::size_t k = 0; k < m.vid.size(); ++k)
    if (m.vid[k] >= 0) mass[m.vid[k]] = rf.v[k] * area;
  const std::vector<double> x_star = m.pack(u_star);
  std::vector<double> fvec(m.n, 0.0);
  if (force) {
    for (std::size_t k = 0; k < m.uid.size(); ++k)
      if (m.uid[k] >= 0) fvec[m.uid[k]] = force->fx[k] * area;
    for (std::size_t k = 0; k < m.vid.size(); ++k)
      if (m.vid[k] >= 0) fvec[m.vid[k]] = force->fy[k] * area;
  }
  for (int k = 0; k < m.n; ++k) b[k] = mass[k] / dt * x_star[k] + fvec[k];
  std::vector<Eigen::Triplet<double>> trip;
  if (!reuse) {
    trip.reserve(m.samples.size() * 9 + m.n);
    for (int k = 0; k < m.n; ++k) trip.emplace_back(k, k, mass[k] / dt);
  }
  for (const StrainSample& s : m.samples) {
    const double w = s.weight * m.sample_mu(s, mu) * area;
    for (int a = 0; a < s.terms; ++a) {
      if (!reuse)
        for (int c = 0; c < s.terms; ++c) trip.emplace_back(s.idx[a], s.idx[c], w * s.coef[a] * s.coef[c]);
      b[s.idx[a]] -= w * s.c0 * s.coef[a];
    }
  }
  if (!reuse) {
    Eigen::SparseMatrix<double> assembled(m.n, m.n);
    assembled.setFromTriplets(trip.begin(), trip.end());
    if (!m.analyzed) {
      m.ldlt.analyzePattern(assembled);
      m.analyzed = true;
    }
    m.ldlt.factorize(assembled);
    if (m.ldlt.info() != Eigen::Success) throw NumericalError("diffuse: factorization failed");
    m.last_matrix = std::move(assembled);
    m.last_rho = rho;
    m.last_mu = mu;
    m.last_dt = dt;
  }
  const Eigen::SparseMatrix<double>& a = m.last_matrix;

  Result r;
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.n);
  if (bnorm > 0.0) {
    x = m.ldlt.solve(b);
    for (int it = 0; it < 3; ++it) {
      const Eigen::VectorXd res = b - a * x;
      r.relative_residual = res.norm() / bnorm;
      if (r.relative_residual <= tolerance) break;
      x += m.ldlt.solve(res);
    }
    r.relative_residual = (b - a * x).norm() / bnorm;
    if (!(r.relative_residual <= tolerance))
      throw NumericalError("diffuse: linear solve did not reach the residual tolerance");
  }
  r.vel = m.unpack(x);
  zero_walls(r.vel, m.walls.periodic_x);
  std::vector<double> xs(x.data(), x.data() + m.n);
  r.dissipation = m.dissipation(xs, mu, zones);
  std::vector<double> work(m.n);
  for (int k = 0; k < m.n; ++k) work[k] = fvec[k] * xs[k];
  r.external_work = dt * pairwise_sum(work);
  return r;
}

VelocityField ViscousSolver::viscous_force(const VelocityField& vel, const GridField& mu) const {
  const Impl& m = *impl_;
  const double area = m.grid.h * m.grid.h;
  const std::vector<double> x = m.pack(vel);
  std::vector<double> f(m.n, 0.0);
  for (const StrainSample& s : m.samples) {
    const double w = s.weight * m.sample_mu(s, mu) * area;
    const double e = m.strain(s, x);
    for (int a = 0; a < s.terms; ++a) f[s.idx[a]] -= w * e * s.coef[a];
  }
  VelocityField out = m.unpack(f);
  zero_walls(out, m.walls.periodic_x);
  return out;
}

ZoneDissipation ViscousSolver::dissipation(const VelocityField& vel, const GridField& mu,
                                           const ZoneIndicators* zones) const {
  return impl_->dissipation(impl_->pack(vel), mu, zones);
}

ViscousSolver::Result diffuse(const VelocityField& u_star, const GridField& rho, const GridField& mu,
                              const ForceField* force, double dt, const ZoneIndicators* zones,
                              WallMotion walls) {
  ViscousSolver solver(u_star.grid(), walls);
  return solver.solve(u_star, rho, mu, force, dt, zones);
}

}  // namespace slipfsi
