#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "slipfsi/error.hpp"
#include "slipfsi/harness.hpp"

#ifndef SLIPFSI_VERSION
#define SLIPFSI_VERSION "unknown"
#endif

namespace slipfsi {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string short_num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

// JSON has no NaN; store it as null.
ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json config_json(const SimConfig& c) {
  ordered_json out = ordered_json::object();
  std::istringstream in(to_ini(c));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      out[section] = ordered_json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    out[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

ordered_json check_json(const CheckResult& c) {
  return {{"name", c.name},         {"pass", c.pass},
          {"measured", jnum(c.measured)}, {"relation", c.relation},
          {"threshold", jnum(c.threshold)}, {"informational", c.informational}};
}

ordered_json summary_json(const RunSummary& s) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : s.checks) checks.push_back(check_json(c));
  ordered_json out{{"name", s.name}, {"pass", s.pass()}, {"steps", s.steps}, {"t", s.t},
                   {"warnings", s.warnings}, {"checks", checks}};
  if (s.couette) {
    out["couette"] = {{"jump", s.couette->measured.jump},
                      {"stress", s.couette->measured.stress},
                      {"jump_composite", s.couette->jump_composite},
                      {"jump_sharp", s.couette->jump_sharp},
                      {"composite_error", s.couette->composite_error()},
                      {"sharp_error", s.couette->sharp_error()}};
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_summary_files(const fs::path& dir, const RunSummary& s, const std::string& stem) {
  write_text(dir / (stem + ".json"), summary_json(s).dump(2) + "\n");
  std::string text;
  for (const auto& w : s.warnings) text += "WARN " + w + "\n";
  for (const auto& c : s.checks) text += c.line() + "\n";
  text += std::string(s.pass() ? "PASS" : "FAIL") + " overall\n";
  write_text(dir / (stem + ".txt"), text);
}

CheckResult make_check(std::string name, double measured, const std::string& relation, double threshold,
                       bool informational = false) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.relation = relation;
  c.threshold = threshold;
  c.informational = informational;
  if (relation == "<=") c.pass = measured <= threshold;
  else if (relation == "<") c.pass = measured < threshold;
  else if (relation == ">=") c.pass = measured >= threshold;
  else c.pass = measured > threshold;
  return c;
}

SeriesRow row_from(const Simulation& sim, const BodySample* body, const SeriesRow* prev,
                   const StepReport* rep, double e0) {
  SeriesRow r;
  r.step = sim.step_count();
  r.t = sim.flow().t;
  if (rep) {
    r.dt = rep->dt;
    r.E_kin = rep->kinetic_energy;
    r.max_div = rep->max_divergence;
    r.max_wall_normal = rep->max_boundary_normal;
    r.pressure_sweeps = rep->pressure_sweeps;
  } else {
    r.E_kin = e0;
    r.max_div = normalized_max_divergence(sim.flow().vel);
    r.max_wall_normal = max_boundary_normal_velocity(sim.flow().vel);
  }
  // dissipation and work are cumulative from t = 0
  if (prev) {
    r.D_fluid = prev->D_fluid;
    r.D_ring = prev->D_ring;
    r.D_body = prev->D_body;
    r.W_ext = prev->W_ext;
  }
  if (rep) {
    r.D_fluid += rep->dt * rep->dissipation_rate.fluid;
    r.D_ring += rep->dt * rep->dissipation_rate.ring;
    r.D_body += rep->dt * rep->dissipation_rate.body;
    r.W_ext += rep->external_work;
  }
  r.energy_residual = r.E_kin + r.D_fluid + r.D_ring + r.D_body - e0 - r.W_ext;
  if (body) {
    r.qx = body->q.x;
    r.qy = body->q.y;
    r.vx = body->v.x;
    r.vy = body->v.y;
    r.omega = body->omega;
    r.mass = body->mass;
    r.inertia = body->inertia;
    r.px = body->momentum.x;
    r.py = body->momentum.y;
    r.L = body->angular_momentum;
    r.fx = body->force.x;
    r.fy = body->force.y;
    r.torque = body->torque;
    r.gap = body->gap;
    r.r_eps = body->rigid_deviation;
  } else {
    r.qx = r.qy = r.vx = r.vy = r.omega = kNaN;
    r.mass = r.inertia = r.px = r.py = r.L = kNaN;
    r.fx = r.fy = r.torque = r.gap = r.r_eps = kNaN;
  }
  return r;
}

// Primary vortex centre of a lid-driven cavity: minimum of the stream
// function integrated upward from the bottom wall, refined by a quadratic fit.
Vec2 cavity_vortex_centre(const VelocityField& vel) {
  const Grid& g = vel.grid();
  GridField psi(g, Stagger::node);
  for (int i = 0; i <= g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double u = i == 0 || i == g.nx ? 0.0 : vel.u(i, j);
      psi(i, j + 1) = psi(i, j) + u * g.h;
    }
  int bi = 1, bj = 1;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      if (psi(i, j) < psi(bi, bj)) {
        bi = i;
        bj = j;
      }
  auto vertex = [](double a, double b, double c) {
    const double den = a - 2 * b + c;
    return den != 0.0 ? 0.5 * (a - c) / den : 0.0;
  };
  const double di = vertex(psi(bi - 1, bj), psi(bi, bj), psi(bi + 1, bj));
  const double dj = vertex(psi(bi, bj - 1), psi(bi, bj), psi(bi, bj + 1));
  return psi.position(bi, bj) + Vec2{di * g.h, dj * g.h};
}

std::vector<CheckResult> couette_checks(const SimConfig& c, const CouetteResult& r) {
  return {make_check("slip_jump_composite", r.composite_error(), "<=", c.checks.slip_tol),
          make_check("navier_balance", r.measured.navier_mismatch(c.params.beta), "<=", c.checks.slip_tol),
          make_check("slip_jump_sharp", r.sharp_error(), "<=", c.checks.slip_tol, true)};
}

std::string snapshot_name(int step, bool binary) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06d.%s", step, binary ? "bin" : "txt");
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Time series

const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> cols = {
      "schema", "step",  "t",      "dt",     "qx",     "qy",     "vx",     "vy",
      "omega",  "mass",  "inertia", "px",    "py",     "L",      "fx",     "fy",
      "torque", "gap",   "r_eps",  "E_kin",  "D_fluid", "D_ring", "D_body", "W_ext",
      "energy_residual", "max_div", "max_wall_normal", "pressure_sweeps"};
  return cols;
}

void write_series_header(std::ostream& out) {
  const auto& cols = timeseries_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
}

void write_series_row(std::ostream& out, const SeriesRow& r) {
  out << kCsvSchema << ',' << r.step;
  for (double v : {r.t, r.dt, r.qx, r.qy, r.vx, r.vy, r.omega, r.mass, r.inertia, r.px, r.py, r.L, r.fx,
                   r.fy, r.torque, r.gap, r.r_eps, r.E_kin, r.D_fluid, r.D_ring, r.D_body, r.W_ext,
                   r.energy_residual, r.max_div, r.max_wall_normal})
    out << ',' << num(v);
  out << ',' << r.pressure_sweeps << '\n';
}

std::vector<SeriesRow> read_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("timeseries: empty file");
  {
    std::ostringstream expect;
    write_series_header(expect);
    if (line + "\n" != expect.str()) throw InvalidArgument("timeseries: unsupported header '" + line + "'");
  }
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      double x = 0.0;
      const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
        throw InvalidArgument("timeseries: bad value '" + tok + "'");
      v.push_back(x);
    }
    if (v.size() != timeseries_columns().size()) throw InvalidArgument("timeseries: wrong column count");
    if (static_cast<int>(v[0]) != kCsvSchema) throw InvalidArgument("timeseries: unsupported schema");
    SeriesRow r;
    std::size_t k = 1;
    r.step = static_cast<int>(v[k++]);
    for (double* f : {&r.t, &r.dt, &r.qx, &r.qy, &r.vx, &r.vy, &r.omega, &r.mass, &r.inertia, &r.px, &r.py,
                      &r.L, &r.fx, &r.fy, &r.torque, &r.gap, &r.r_eps, &r.E_kin, &r.D_fluid, &r.D_ring,
                      &r.D_body, &r.W_ext, &r.energy_residual, &r.max_div, &r.max_wall_normal})
      *f = v[k++];
    r.pressure_sweeps = static_cast<int>(v[k]);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Checks

std::string CheckResult::line() const {
  std::string s = informational ? "INFO " : (pass ? "PASS " : "FAIL ");
  s += name + ": measured " + short_num(measured) + " " + relation + " " + short_num(threshold);
  return s;
}

bool RunSummary::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.informational || c.pass; });
}

const CheckResult* RunSummary::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<CheckResult> evaluate_series(const SimConfig& config, const std::vector<SeriesRow>& rows) {
  std::vector<CheckResult> out;
  if (rows.empty()) return out;
  double div = 0.0, wall = 0.0;
  for (const auto& r : rows) {
    div = std::max(div, r.max_div);
    wall = std::max(wall, r.max_wall_normal);
  }
  out.push_back(make_check("divergence", div, "<=", config.stepper.divergence_tol));
  out.push_back(make_check("wall_normal_velocity", wall, "<=", 0.0));

  // wall-driven flows receive work through the lid, which the ledger does not see
  if (config.kind != ScenarioKind::cavity) {
    EnergyLedger ledger(rows.front().E_kin);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const SeriesRow& a = rows[k - 1];
      const SeriesRow& b = rows[k];
      EnergyRecord e;
      e.t = b.t;
      e.kinetic = b.E_kin;
      e.dissipation_by_zone = {b.D_body - a.D_body, b.D_ring - a.D_ring, b.D_fluid - a.D_fluid};
      e.dissipation = std::max(0.0, e.dissipation_by_zone.total());
      e.work = b.W_ext - a.W_ext;
      ledger.append(e);
    }
    const EnergyCheck ec = energy_check(ledger, config.checks.energy_tol);
    out.push_back(make_check("energy_budget", ec.scale > 0 ? ec.worst_residual / ec.scale : 0.0, "<=",
                             config.checks.energy_tol));
    if (config.gravity.x == 0.0 && config.gravity.y == 0.0) {
      const double noise = 10.0 * std::numeric_limits<double>::epsilon() *
                           static_cast<double>(config.grid().cell_count()) * rows.back().step * ec.scale;
      out.push_back(make_check("energy_dissipative", ec.worst_residual, "<=", noise));
    }
  }

  if (config.has_body()) {
    BodyTrack track;
    bool consecutive = true;
    double m0 = rows.front().mass, drift = 0.0, min_gap = rows.front().gap;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const SeriesRow& r = rows[k];
      if (k && r.step != rows[k - 1].step + 1) consecutive = false;
      BodySample s;
      s.t = r.t;
      s.q = {r.qx, r.qy};
      s.v = {r.vx, r.vy};
      s.omega = r.omega;
      s.mass = r.mass;
      s.inertia = r.inertia;
      s.momentum = {r.px, r.py};
      s.angular_momentum = r.L;
      s.force = {r.fx, r.fy};
      s.torque = r.torque;
      s.gap = r.gap;
      s.rigid_deviation = r.r_eps;
      track.append(s);
      drift = std::max(drift, std::abs(r.mass / m0 - 1.0));
      min_gap = std::min(min_gap, r.gap);
    }
    out.push_back(make_check("body_mass", drift, "<=", config.checks.mass_tol));
    if (consecutive && rows.size() > 2) {
      const BudgetCheck b = body_budget(track, config.checks.budget_tol);
      out.push_back(make_check("body_budget_linear", b.linear_residual, "<=", config.checks.budget_tol));
      out.push_back(make_check("body_budget_angular", b.angular_residual, "<=", config.checks.budget_tol));
    }
    const double h = config.h();
    out.push_back(make_check("contact_gap", min_gap, "<", h, !config.checks.contact));
    const auto skip = static_cast<std::size_t>(config.checks.contact_transient);
    out.push_back(make_check("gap_monotone", gap_non_monotone_steps(track, skip), "<=",
                             config.checks.contact_non_monotone, !config.checks.contact));
    out.push_back(make_check("rigid_deviation", rows.back().r_eps, ">=", 0.0, true));
  }
  return out;
}

// ---------------------------------------------------------------------------
// run

fs::path output_root() {
  if (const char* root = std::getenv("SLIPFSI_OUTPUT_ROOT"); root && *root) return root;
  return "runs";
}

RunSummary run(const SimConfig& config_in, const RunOptions& options) {
  SimConfig config = config_in;
  config.validate();

  RunSummary summary;
  summary.name = config.name;
  summary.warnings = config.warnings;
  const bool files = !options.out_dir.empty();
  const fs::path dir = options.out_dir;
  if (files) {
    fs::create_directories(dir / "snapshots");
    const Grid g = config.grid();
    ordered_json manifest{{"format", "slipfsi-run"},
                          {"code_version", SLIPFSI_VERSION},
                          {"csv_schema", kCsvSchema},
                          {"scenario", config.name},
                          {"kind", to_string(config.kind)},
                          {"grid", {{"nx", g.nx}, {"ny", g.ny}, {"h", g.h}, {"origin", {g.origin.x, g.origin.y}}}},
                          {"warnings", config.warnings},
                          {"config", config_json(config)},
                          {"config_ini", to_ini(config)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  for (const auto& w : config.warnings)
    if (options.log) *options.log << "warning: " << w << "\n";

  if (config.kind == ScenarioKind::couette) {
    CouetteResult r = couette_slip(couette_spec(config));
    summary.checks = couette_checks(config, r);
    if (files) {
      std::ofstream csv(dir / "timeseries.csv", std::ios::binary);
      write_series_header(csv);
      std::ofstream prof(dir / "profile.csv", std::ios::binary);
      prof << "y,u\n";
      const Grid& g = r.vel.grid();
      for (int j = 0; j < g.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += r.vel.u(i, j);
        prof << num(g.cell_center(0, j).y) << ',' << num(s / g.nx) << '\n';
      }
    }
    summary.couette = std::move(r);
    if (files) write_summary_files(dir, summary, "summary");
    return summary;
  }

  Simulation sim = build_simulation(config);
  const double e0 = kinetic_energy(sim.flow().vel, sim.material().rho);
  std::ofstream csv;
  if (files) {
    csv.open(dir / "timeseries.csv", std::ios::binary);
    write_series_header(csv);
  }
  auto snapshot = [&] {
    if (!files) return;
    const Snapshot s = take_snapshot(sim);
    std::ofstream out(dir / "snapshots" / snapshot_name(s.step, config.output.binary_snapshots), std::ios::binary);
    if (config.output.binary_snapshots) write_snapshot_binary(s, out);
    else write_snapshot(s, out);
  };

  std::vector<SeriesRow>& rows = summary.series;
  {
    std::optional<BodySample> b;
    if (sim.has_body()) b = measure_body(sim);
    rows.push_back(row_from(sim, b ? &*b : nullptr, nullptr, nullptr, e0));
    if (files) write_series_row(csv, rows.back());
    snapshot();
  }
  double next_log = 0.1 * config.t_end;
  try {
    sim.advance_to(config.t_end, [&](const StepReport& rep) {
      std::optional<BodySample> b;
      if (sim.has_body()) b = measure_body(sim, rep);
      rows.push_back(row_from(sim, b ? &*b : nullptr, &rows.back(), &rep, e0));
      const bool last = rep.t >= config.t_end;
      if (files && (rep.step % config.output.csv_every == 0 || last)) write_series_row(csv, rows.back());
      if (config.output.snapshot_every > 0 && rep.step % config.output.snapshot_every == 0 && !last) snapshot();
      if (options.log && rep.t >= next_log) {
        *options.log << config.name << ": t=" << short_num(rep.t) << " step " << rep.step << "\n";
        next_log += 0.1 * config.t_end;
      }
    });
  } catch (const std::exception& e) {
    if (files) csv.flush();
    throw NumericalError("t=" + num(sim.flow().t) + " step " + std::to_string(sim.step_count()) + ": " + e.what());
  }
  snapshot();
  summary.steps = sim.step_count();
  summary.t = sim.flow().t;

  // every step is in memory even when the file holds a subsample
  summary.checks = evaluate_series(config, rows);
  if (config.kind == ScenarioKind::cavity) {
    const Vec2 c = cavity_vortex_centre(sim.flow().vel);
    const Vec2 rel = (c - config.origin) * (1.0 / config.width);
    // Re = 100 reference centre of the primary vortex (Ghia, Ghia & Shin 1982)
    const Vec2 ref{0.6172, 0.7344};
    const double re = config.params.rho_f * config.lid_speed * config.width / config.params.mu_f;
    const bool at_100 = std::abs(re - 100.0) < 1e-9;
    summary.checks.push_back(make_check("cavity_vortex_centre", norm(rel - ref), "<=", config.checks.cavity_tol, !at_100));
  }
  if (files) {
    csv.close();
    write_summary_files(dir, summary, "summary");
  }
  return summary;
}

// ---------------------------------------------------------------------------
// check

RunSummary check_run(const fs::path& dir) {
  const ordered_json manifest = ordered_json::parse(read_text(dir / "manifest.json"));
  if (manifest.value("csv_schema", 0) != kCsvSchema) throw InvalidArgument("check: unsupported csv schema");
  SimConfig config = parse_config(manifest.at("config_ini").get<std::string>());
  config.validate();

  RunSummary summary;
  summary.name = config.name;
  summary.warnings = config.warnings;
  if (config.kind == ScenarioKind::couette) {
    // steady oracle: no history to replay, so it is solved again
    CouetteResult r = couette_slip(couette_spec(config));
    summary.checks = couette_checks(config, r);
    summary.couette = std::move(r);
  } else {
    std::ifstream csv(dir / "timeseries.csv", std::ios::binary);
    if (!csv) throw Error("check: missing timeseries.csv");
    summary.series = read_series(csv);
    summary.checks = evaluate_series(config, summary.series);
    if (!summary.series.empty()) {
      summary.steps = summary.series.back().step;
      summary.t = summary.series.back().t;
    }

    // stored snapshots must agree with the series
    std::vector<fs::path> snaps;
    if (fs::exists(dir / "snapshots"))
      for (const auto& e : fs::directory_iterator(dir / "snapshots")) snaps.push_back(e.path());
    std::sort(snaps.begin(), snaps.end());
    double worst_time = 0.0, worst_energy = 0.0, worst_density = 0.0;
    int matched = 0;
    for (const auto& p : snaps) {
      const Snapshot s = read_snapshot(p);
      const auto it = std::find_if(summary.series.begin(), summary.series.end(),
                                   [&](const SeriesRow& r) { return r.step == s.step; });
      if (it == summary.series.end()) continue;
      ++matched;
      worst_time = std::max(worst_time, std::abs(s.t - it->t));
      const auto& rho = s.field("rho");
      const auto& ux = s.field("ux");
      const auto& uy = s.field("uy");
      double e = 0.0;
      for (std::size_t k = 0; k < rho.size(); ++k) e += 0.5 * rho[k] * (ux[k] * ux[k] + uy[k] * uy[k]) * s.h * s.h;
      if (it->E_kin > 0.0) worst_energy = std::max(worst_energy, std::abs(e - it->E_kin) / it->E_kin);
      if (config.has_body()) {
        const Grid g(s.nx, s.ny, s.h, s.origin);
        GridField rf(g, Stagger::cell), df(g, Stagger::cell);
        std::copy(rho.begin(), rho.end(), rf.values().begin());
        const auto& d = s.field("d");
        std::copy(d.begin(), d.end(), df.values().begin());
        const ZoneIndicators z = zone_indicators(SignedDistanceField(df), config.params.delta);
        double body = 0.0;
        for (std::size_t k = 0; k < rho.size(); ++k) body += config.params.rho_s * z.phi[k] * s.h * s.h;
        if (body > 0.0)
          worst_density = std::max(worst_density, density_renormalization_check(rf, z, config.params) / body);
      }
    }
    summary.checks.push_back(make_check("snapshot_time", worst_time, "<=", 0.0));
    summary.checks.push_back(make_check("snapshot_count", matched, ">=", snaps.empty() ? 0 : 1));
    summary.checks.push_back(make_check("snapshot_energy", worst_energy, "<=", 0.05, true));
    if (config.has_body())
      summary.checks.push_back(make_check("density_renormalization", worst_density, "<=", 0.05, true));
  }
  write_summary_files(dir, summary, "check");
  return summary;
}

// ---------------------------------------------------------------------------
// sweep

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {"epsilon", "delta", "beta", "h"};
  return names;
}

SimConfig apply_sweep_value(const SimConfig& base, const std::string& param, double value) {
  SimConfig c = base;
  if (param == "epsilon") c.params.epsilon = value;
  else if (param == "delta") c.params.delta = value;
  else if (param == "beta") c.params.beta = value;
  else if (param == "h") {
    if (!(value > 0.0)) throw ConfigError("h", "must be > 0");
    c.cells = static_cast<int>(std::lround(c.width / value));
    if (std::abs(c.cells * value - c.width) > 1e-9 * c.width)
      throw ConfigError("h", "width must be a multiple of h = " + num(value));
  } else {
    throw ConfigError("param", "unknown sweep parameter '" + param + "' (epsilon, delta, beta, h)");
  }
  c.name = base.name + "_" + param + "_" + short_num(value);
  return c;
}

bool SweepReport::pass() const {
  for (const auto& m : members)
    if (!m.error.empty() || !m.summary || !m.summary->pass()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.informational || c.pass; });
}

SweepReport sweep(const SimConfig& base, const std::string& param, const std::vector<double>& values,
                  const RunOptions& options, unsigned workers) {
  if (values.empty()) throw ConfigError("values", "at least one value is required");
  SweepReport report;
  report.param = param;
  std::vector<SimConfig> configs;
  for (double v : values) {
    configs.push_back(apply_sweep_value(base, param, v));
    configs.back().validate();
    SweepMember m;
    m.value = v;
    m.dir = param + "_" + short_num(v);
    report.members.push_back(m);
  }

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(values.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      RunOptions o;
      if (!options.out_dir.empty()) o.out_dir = options.out_dir / report.members[k].dir;
      try {
        report.members[k].summary = run(configs[k], o);
      } catch (const std::exception& e) {
        report.members[k].error = e.what();
      }
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  // convergence over the members that finished
  std::vector<double> xs, metric;
  for (const auto& m : report.members) {
    if (!m.summary) continue;
    xs.push_back(m.value);
    if (m.summary->couette) {
      metric.push_back(param == "beta" ? std::abs(m.summary->couette->measured.jump)
                                       : m.summary->couette->sharp_error());
    } else if (!m.summary->series.empty()) {
      metric.push_back(m.summary->series.back().r_eps);
    } else {
      metric.push_back(kNaN);
    }
  }
  const bool complete = xs.size() == values.size();
  if (base.kind == ScenarioKind::body && param == "epsilon" && complete && xs.size() >= 3) {
    try {
      const RateFit fit = solidification_rate(xs, metric);
      report.solidification = fit;
      report.slope = fit.alpha;
      report.checks.push_back(make_check("solidification_alpha", fit.alpha, ">=", 0.3));
      report.checks.push_back(make_check("solidification_monotone", fit.monotone ? 1.0 : 0.0, ">=", 1.0));
    } catch (const InvalidArgument&) {
      report.checks.push_back(make_check("solidification_alpha", kNaN, ">=", 0.3, true));
    }
  }
  if (base.kind == ScenarioKind::couette && complete && xs.size() >= 2) {
    if (param == "beta") {
      report.slope = loglog_slope(xs, metric);
      report.checks.push_back(make_check("jump_inverse_beta", std::abs(*report.slope + 1.0), "<=", 0.10));
    } else {
      // sharp-interface error must shrink with the swept length
      std::vector<std::size_t> order(xs.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] > xs[b]; });
      int rises = 0;
      for (std::size_t k = 1; k < order.size(); ++k)
        if (metric[order[k]] > metric[order[k - 1]] + 1e-12) ++rises;
      report.checks.push_back(make_check("slip_error_decreasing", rises, "<=", 0.0));
    }
  }

  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    std::ostringstream csv;
    csv << "param,value,status,steps,t,r_eps,energy_residual,slip_jump,composite_error,sharp_error,pass\n";
    ordered_json members = ordered_json::array();
    for (const auto& m : report.members) {
      double r_eps = kNaN, energy = kNaN, jump = kNaN, ce = kNaN, se = kNaN;
      int steps = 0;
      double t = 0.0;
      if (m.summary) {
        steps = m.summary->steps;
        t = m.summary->t;
        if (!m.summary->series.empty()) {
          r_eps = m.summary->series.back().r_eps;
          energy = m.summary->series.back().energy_residual;
        }
        if (m.summary->couette) {
          jump = m.summary->couette->measured.jump;
          ce = m.summary->couette->composite_error();
          se = m.summary->couette->sharp_error();
        }
      }
      const std::string status = m.error.empty() ? "ok" : "failed";
      csv << param << ',' << num(m.value) << ',' << status << ',' << steps << ',' << num(t) << ',' << num(r_eps)
          << ',' << num(energy) << ',' << num(jump) << ',' << num(ce) << ',' << num(se) << ','
          << (m.summary && m.summary->pass() ? 1 : 0) << '\n';
      ordered_json j{{"value", m.value}, {"dir", m.dir}, {"status", status}};
      if (!m.error.empty()) j["error"] = m.error;
      if (m.summary) j["summary"] = summary_json(*m.summary);
      members.push_back(j);
    }
    write_text(options.out_dir / "sweep.csv", csv.str());
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) checks.push_back(check_json(c));
    ordered_json out{{"param", param}, {"pass", report.pass()}, {"members", members}, {"checks", checks}};
    if (report.slope) out["slope"] = *report.slope;
    if (report.solidification)
      out["solidification"] = {{"alpha", report.solidification->alpha},
                               {"monotone", report.solidification->monotone},
                               {"pass", report.solidification->pass}};
    write_text(options.out_dir / "sweep.json", out.dump(2) + "\n");
  }
  return report;
}

}  // namespace slipfsi
