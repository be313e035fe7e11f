// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [names...]    run a subset (default: all)
//   acceptance --list

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slipfsi/diagnostics.hpp"
#include "slipfsi/geometry.hpp"
#include "slipfsi/harness.hpp"

using namespace slipfsi;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Every step of every scenario run here feeds this.
struct StepGuard {
  double max_div = 0.0;
  double max_wall = 0.0;
  long steps = 0;
  void add(double div, double wall) {
    max_div = std::max(max_div, div);
    max_wall = std::max(max_wall, wall);
    ++steps;
  }
  void add(const std::vector<SeriesRow>& rows) {
    for (const auto& r : rows) add(r.max_div, r.max_wall_normal);
  }
} guard;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

SimConfig config(const std::string& name) {
  SimConfig c = load_config(std::string(SLIPFSI_CONFIG_DIR) + "/" + name + ".ini");
  c.output.csv_every = 1;
  c.validate();
  return c;
}

// --- energy ---------------------------------------------------------------

Verdict energy() {
  SimConfig c = config("vortex");
  auto residual = [&](double dt) {
    SimConfig v = c;
    v.stepper.dt_max = dt;
    RunSummary s = run(v);
    guard.add(s.series);
    return std::pair{s.series.back().energy_residual, s.series.front().E_kin};
  };
  auto [r1, e0] = residual(0.01);
  auto [r2, e0b] = residual(0.005);
  (void)e0b;
  const double rel = std::abs(r1) / e0;
  const double ratio = std::abs(r1) / std::abs(r2);
  Verdict v;
  v.pass = r1 <= 0.0 && r2 <= 0.0 && rel <= 0.02 && ratio >= 1.5 && ratio <= 3.0;
  v.detail = "residual/E0 " + fmt(r1 / e0) + " (dt 0.01), " + fmt(r2 / e0) + " (dt 0.005), ratio " + fmt(ratio) +
             " in [1.5, 3]";
  return v;
}

// --- solidification -------------------------------------------------------

Verdict solidification() {
  SimConfig c = config("rotating_disk");
  SweepReport rep = sweep(c, "epsilon", {1e-1, 1e-2, 1e-3});
  Verdict v;
  std::vector<double> r;
  for (const auto& m : rep.members) {
    if (!m.summary) return {false, "member eps=" + fmt(m.value) + " failed: " + m.error};
    guard.add(m.summary->series);
    r.push_back(m.summary->series.back().r_eps);
  }
  const bool decreasing = r[1] < r[0] && r[2] < r[1];
  const double alpha = rep.solidification ? rep.solidification->alpha : std::nan("");
  v.pass = decreasing && alpha >= 0.3;
  v.detail = "r_eps " + fmt(r[0]) + ", " + fmt(r[1]) + ", " + fmt(r[2]) + "; alpha " + fmt(alpha) + " >= 0.3";
  return v;
}

// --- slip -----------------------------------------------------------------

Verdict slip() {
  SimConfig c = config("couette");
  const double h = c.h();
  SweepReport deltas = sweep(c, "delta", {16 * h, 8 * h, 4 * h});
  std::vector<double> sharp;
  double composite = std::nan("");
  for (const auto& m : deltas.members) {
    if (!m.summary || !m.summary->couette) return {false, "delta=" + fmt(m.value) + " failed: " + m.error};
    sharp.push_back(m.summary->couette->sharp_error());
    if (m.value == 8 * h) composite = m.summary->couette->composite_error();
  }
  const bool decreasing = sharp[1] < sharp[0] && sharp[2] < sharp[1];

  bool rejected = false;
  try {
    SimConfig thin = apply_sweep_value(c, "delta", 3 * h);
    thin.validate();
    run(thin);
  } catch (const std::exception&) {
    rejected = true;
  }

  SweepReport betas = sweep(c, "beta", {1, 10, 100});
  const double slope = betas.slope.value_or(std::nan(""));
  const bool inverse = std::abs(slope + 1.0) <= 0.10;

  Verdict v;
  v.pass = composite <= 0.05 && decreasing && rejected && inverse;
  v.detail = "composite error " + fmt(composite) + " <= 0.05 at 8h; sharp error " + fmt(sharp[0]) + ", " +
             fmt(sharp[1]) + ", " + fmt(sharp[2]) + " at 16h/8h/4h; 3h " + (rejected ? "rejected" : "accepted") +
             "; jump-beta slope " + fmt(slope);
  return v;
}

// --- rigid kinematics -----------------------------------------------------

Verdict rigid_kinematics() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  double dist_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Isometry iso{{U(rng), U(rng)}, Mat2::rotation(3.2 * U(rng)), {U(rng), U(rng)}};
    Vec2 a{U(rng), U(rng)}, b{U(rng), U(rng)};
    dist_err = std::max(dist_err, std::abs(norm(apply_isometry(iso, a) - apply_isometry(iso, b)) - norm(a - b)));
  }

  RigidState s;
  s.iso = Isometry::at_rest({0.5, 0.5});
  s.v = {0.3, -0.2};
  s.omega = 2.7;
  for (int k = 0; k < 100000; ++k) s.iso = advance_isometry(s, 1e-3);
  const double ortho = orthogonality_defect(s.iso.rot);

  // symmetric gradient of rigid_velocity, by central differences and on the MAC grid
  double sym = 0.0;
  const double e = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    Vec2 x{U(rng), U(rng)};
    Vec2 ux = (rigid_velocity(s, x + Vec2{e, 0}) - rigid_velocity(s, x - Vec2{e, 0})) * (0.5 / e);
    Vec2 uy = (rigid_velocity(s, x + Vec2{0, e}) - rigid_velocity(s, x - Vec2{0, e})) * (0.5 / e);
    sym = std::max({sym, std::abs(ux.x), std::abs(uy.y), std::abs(0.5 * (ux.y + uy.x))});
  }
  Grid g(64, 64, 1.0 / 64);
  VelocityField vel(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) vel.u(i, j) = rigid_velocity(s, {i * g.h, (j + 0.5) * g.h}).x;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) vel.v(i, j) = rigid_velocity(s, {(i + 0.5) * g.h, j * g.h}).y;
  // wall ghosts are zero, so only cells away from the walls see the rigid field
  const GridField strain = strain_rate_squared(vel);
  double grid_strain = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) grid_strain = std::max(grid_strain, std::sqrt(strain(i, j)));

  Verdict v;
  v.pass = dist_err <= 1e-12 && ortho < 1e-10 && sym <= 1e-10 && grid_strain <= 1e-10;
  v.detail = "distance error " + fmt(dist_err) + " <= 1e-12; orthogonality drift " + fmt(ortho) +
             " < 1e-10 after 1e5 steps; |Du| " + fmt(sym) + " (pointwise), " + fmt(grid_strain) + " (grid)";
  return v;
}

// --- falling disk: collision and body volume/mass ----------------------------

struct FallingDisk {
  BodyTrack track;
  double h = 0.0, t_end = 0.0, seconds = 0.0;
  bool done = false;
};
FallingDisk falling;

void run_falling_disk() {
  if (falling.done) return;
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig c = config("falling_disk");
  Simulation sim = build_simulation(c);
  falling.h = c.h();
  falling.t_end = c.t_end;
  falling.track.append(measure_body(sim));
  sim.advance_to(c.t_end, [&](const StepReport& r) {
    guard.add(r.max_divergence, r.max_boundary_normal);
    falling.track.append(measure_body(sim, r));
  });
  falling.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  falling.done = true;
}

Verdict collision() {
  run_falling_disk();
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& s : falling.track.samples()) min_gap = std::min(min_gap, s.gap);
  const int rises = gap_non_monotone_steps(falling.track, 10);
  Verdict v;
  v.pass = min_gap < falling.h && rises <= 3;
  v.detail = "min gap " + fmt(min_gap) + " < h = " + fmt(falling.h) + "; non-monotone steps " + std::to_string(rises) +
             " <= 3";
  return v;
}

Verdict body_volume_mass() {
  run_falling_disk();
  const auto samples = falling.track.samples();
  const double a0 = samples.front().kernel_area, m0 = samples.front().mass;
  double area = 0.0, mass = 0.0;
  for (const auto& s : samples) {
    area = std::max(area, std::abs(s.kernel_area - a0) / a0);
    mass = std::max(mass, std::abs(s.mass - m0) / m0);
  }
  const double rate = area / falling.t_end;
  Verdict v;
  v.pass = rate < 0.01 && mass <= 0.01;
  v.detail = "kernel area drift " + fmt(rate) + " per unit time < 0.01; mass drift " + fmt(mass) + " <= 0.01";
  return v;
}

// --- weak forms -----------------------------------------------------------

struct WeakResiduals {
  std::vector<double> momentum;
  double mass = 0.0;
};

// Falling disk with delta = 1/16 so that delta >= 4h holds at both resolutions.
WeakResiduals weak_residuals(int n, double t_end) {
  Grid g(n, n, 1.0 / n);
  PenalizationParams p;
  p.delta = 1.0 / 16;
  Disk disk{{0.5, 0.7}, 0.125};
  GridField k = sample_signed_distance(g, disk, Isometry::at_rest(disk.center)).values;
  for (double& x : k.values()) x -= p.delta;
  SignedDistanceField kernel(k);
  ZoneIndicators z = zone_indicators(kernel, p.delta);
  StepperOptions o;
  o.dt_max = 0.64 / n;
  Simulation sim(g, p, o, kernel, init_density(z.phi, z.chi, z.theta, p), VelocityField(g), {0, -1});

  std::vector<MomentumWeakForm> wf;
  wf.emplace_back(TestFunctionSpec{TestMode::translate_y, t_end, 0.21, 0.27}, p.beta, p.delta, p.mu_f);
  wf.emplace_back(TestFunctionSpec{TestMode::rotate, t_end, 0.21, 0.27, {0.1, 0}}, p.beta, p.delta, p.mu_f);
  wf.emplace_back(TestFunctionSpec{TestMode::rotate, 0.5 * t_end, 0.21, 0.27, {-0.05, 0.05}}, p.beta, p.delta,
                  p.mu_f);
  for (auto& w : wf) w.start(sim);
  ScalarTestFunction xi;
  xi.t_end = t_end;
  xi.lx = xi.ly = 2;
  MassWeakForm mw(xi);
  mw.start(sim.material().rho, sim.flow().vel, 0.0);
  sim.advance_to(t_end, [&](const StepReport& r) {
    guard.add(r.max_divergence, r.max_boundary_normal);
    for (auto& w : wf) w.record(sim, r);
    mw.record(sim.material().rho, sim.flow().vel, r.t);
  });
  WeakResiduals out;
  for (const auto& w : wf) out.momentum.push_back(std::abs(w.residual()));
  out.mass = std::abs(mw.residual());
  return out;
}

Verdict weak_form() {
  const WeakResiduals coarse = weak_residuals(64, 1.0), fine = weak_residuals(128, 1.0);
  Verdict v;
  std::string d;
  for (std::size_t k = 0; k < coarse.momentum.size(); ++k) {
    v.pass = v.pass && fine.momentum[k] < coarse.momentum[k];
    d += "psi" + std::to_string(k + 1) + " " + fmt(coarse.momentum[k]) + " -> " + fmt(fine.momentum[k]) + "; ";
  }
  v.pass = v.pass && fine.mass < coarse.mass;
  v.detail = d + "mass " + fmt(coarse.mass) + " -> " + fmt(fine.mass);
  return v;
}

Verdict incompressibility() {
  Verdict v;
  v.pass = guard.steps > 0 && guard.max_div <= 1e-8 && guard.max_wall == 0.0;
  v.detail = "max divergence " + fmt(guard.max_div) + " <= 1e-8, max wall normal velocity " + fmt(guard.max_wall) +
             " == 0 over " + std::to_string(guard.steps) + " steps";
  return v;
}

struct Criterion {
  std::string name;
  double budget_s;  // runtime allowance; 0 means none
  std::function<Verdict()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  // incompressibility is last: it reads the steps of everything before it
  const std::vector<Criterion> all = {
      {"energy_inequality", 120, energy},
      {"solidification", 900, solidification},
      {"slip_recovery", 300, slip},
      {"rigid_kinematics", 10, rigid_kinematics},
      {"collision", 600, collision},
      {"body_volume_mass", 0, body_volume_mass},
      {"weak_form_residuals", 1200, weak_form},
      {"incompressibility", 0, incompressibility},
  };

  CLI::App app{"slipfsi acceptance suite"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("names", only, "criteria to run (default: all)");
  app.add_flag("--list", list, "print the criterion names");
  CLI11_PARSE(app, argc, argv);
  if (list) {
    for (const auto& c : all) std::printf("%s\n", c.name.c_str());
    return 0;
  }
  for (const auto& n : only)
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.name == n; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", n.c_str());
      return 2;
    }

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // the shared falling-disk run is charged to the collision criterion
    if (c.name == "collision") secs = std::max(secs, falling.seconds);
    std::string time = fmt(secs) + " s";
    if (c.budget_s > 0) {
      time += " <= " + fmt(c.budget_s) + " s";
      if (secs > c.budget_s) v.pass = false;
    }
    std::printf("%s %s: %s [%s]\n", v.pass ? "PASS" : "FAIL", c.name.c_str(), v.detail.c_str(), time.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed ? 1 : 0;
}
