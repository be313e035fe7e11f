#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slipfsi/diagnostics.hpp"
#include "slipfsi/geometry.hpp"
#include "slipfsi/material.hpp"
#include "slipfsi/momentum.hpp"
#include "slipfsi/transport.hpp"

namespace slipfsi {

// ---------------------------------------------------------------------------
// Configuration

enum class ScenarioKind { body, vortex, cavity, couette };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

struct BodyConfig {
  std::string shape = "disk";  ///< disk | polygon
  double radius = 0.125;
  Vec2 center{0.5, 0.7};
  std::vector<Vec2> vertices;  ///< polygon, counter-clockwise
  Vec2 velocity{};
  double omega = 0.0;

  /// The body S0; the transported kernel is S0 eroded by delta.
  BodyShape shape_value() const;
};

struct CheckConfig {
  double energy_tol = 0.02;
  double budget_tol = 0.10;
  double mass_tol = 0.01;
  double slip_tol = 0.05;
  double cavity_tol = 0.05;
  bool contact = false;          ///< require gap < h before t_end
  int contact_transient = 10;    ///< samples skipped by the monotonicity count
  int contact_non_monotone = 3;
};

struct OutputConfig {
  int csv_every = 1;             ///< steps between CSV rows
  int snapshot_every = 0;        ///< steps between field snapshots; 0 = initial and final only
  bool binary_snapshots = false;
};

/// Flat key-value configuration with sections (INI syntax). Defaults are the
/// falling-disk scenario: unit box, disk r=0.125 at (0.5, 0.7), h=1/128, T=2.
struct SimConfig {
  std::string name = "falling_disk";
  ScenarioKind kind = ScenarioKind::body;

  Vec2 origin{};
  double width = 1.0;
  double height = 1.0;
  int cells = 128;  ///< along x; h = width / cells

  PenalizationParams params;
  BodyConfig body;
  Vec2 gravity{0.0, -1.0};

  double t_end = 2.0;
  StepperOptions stepper;

  double vortex_amplitude = 0.01;
  double lid_speed = 1.0;
  double couette_slab = 0.25;
  double couette_wall_speed = 1.0;

  CheckConfig checks;
  OutputConfig output;
  unsigned seed = 0;

  std::vector<std::string> warnings;  ///< filled by validate()

  double h() const { return width / cells; }
  int ny() const;
  Grid grid() const;
  bool has_body() const { return kind == ScenarioKind::body; }

  /// Throws ConfigError naming the offending key ("section.key"). Soft
  /// violations (delta < 4h) are recorded in `warnings`.
  void validate();
};

/// Parses INI text. Unknown sections or keys are errors.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);

/// Sets one "section.key" to a textual value, with the same parsing rules.
void set_config_value(SimConfig& config, const std::string& key, const std::string& value);

/// INI text that parses back to an identical configuration.
std::string to_ini(const SimConfig& config);

// ---------------------------------------------------------------------------
// Scenarios

/// Initial state of a time-dependent scenario (body, vortex, cavity).
Simulation build_simulation(const SimConfig& config);

/// Couette oracle parameters of a couette scenario.
CouetteSpec couette_spec(const SimConfig& config);

// ---------------------------------------------------------------------------
// Field snapshots

struct Snapshot {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Vec2 origin{};
  double t = 0.0;
  int step = 0;
  std::vector<std::string> names;           ///< ux uy p rho mu d
  std::vector<std::vector<double>> fields;  ///< row-major, nx*ny each

  const std::vector<double>& field(const std::string& name) const;
};

/// Cell-centred snapshot of the current state; d is the kernel signed
/// distance (zero when there is no body).
Snapshot take_snapshot(const Simulation& sim);

/// Text format: header lines then one block of ny rows per field, printed
/// with 17 significant digits.
void write_snapshot(const Snapshot& s, std::ostream& out);
/// Packed little-endian binary twin of the text format.
void write_snapshot_binary(const Snapshot& s, std::ostream& out);
/// Reads either format (detected from the first bytes).
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Runs

inline constexpr int kCsvSchema = 1;

/// Column names of timeseries.csv, in order.
const std::vector<std::string>& timeseries_columns();

/// One row of timeseries.csv. Body columns are NaN without a body.
struct SeriesRow {
  int step = 0;
  double t = 0.0, dt = 0.0;
  double qx = 0.0, qy = 0.0, vx = 0.0, vy = 0.0, omega = 0.0;
  double mass = 0.0, inertia = 0.0, px = 0.0, py = 0.0, L = 0.0;
  double fx = 0.0, fy = 0.0, torque = 0.0;
  double gap = 0.0, r_eps = 0.0;
  double E_kin = 0.0, D_fluid = 0.0, D_ring = 0.0, D_body = 0.0, W_ext = 0.0;
  double energy_residual = 0.0;
  double max_div = 0.0, max_wall_normal = 0.0;
  int pressure_sweeps = 0;
};

void write_series_header(std::ostream& out);
void write_series_row(std::ostream& out, const SeriesRow& row);
std::vector<SeriesRow> read_series(std::istream& in);

struct CheckResult {
  std::string name;
  bool pass = true;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  ///< how measured compares to threshold, e.g. "<="
  bool informational = false;  ///< reported but not part of the verdict

  /// "PASS name: measured 0.0123 <= 0.02" or the FAIL equivalent.
  std::string line() const;
};

struct RunSummary {
  std::string name;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  int steps = 0;
  double t = 0.0;
  std::vector<SeriesRow> series;
  std::optional<CouetteResult> couette;

  bool pass() const;
  const CheckResult* find(const std::string& name) const;
};

/// Diagnostics from a recorded time series (shared by run and check).
std::vector<CheckResult> evaluate_series(const SimConfig& config, const std::vector<SeriesRow>& rows);

struct RunOptions {
  std::filesystem::path out_dir;  ///< empty: no files are written
  std::ostream* log = nullptr;    ///< progress lines; nullptr is quiet
};

/// Runs a scenario. With an output directory it writes, in order,
/// manifest.json, timeseries.csv, snapshots/, summary.json and summary.txt.
/// Step failures are rethrown as NumericalError prefixed with the time.
RunSummary run(const SimConfig& config, const RunOptions& options = {});

/// Re-evaluates a run directory from manifest.json, timeseries.csv and the
/// stored snapshots; writes check.json.
RunSummary check_run(const std::filesystem::path& run_dir);

struct SweepMember {
  double value = 0.0;
  std::string dir;
  std::optional<RunSummary> summary;
  std::string error;  ///< non-empty when the member failed
};

struct SweepReport {
  std::string param;
  std::vector<SweepMember> members;
  std::vector<CheckResult> checks;  ///< convergence checks over the members
  std::optional<RateFit> solidification;
  std::optional<double> slope;  ///< log-log slope of the swept metric

  bool pass() const;
};

/// Parameters accepted by sweep().
const std::vector<std::string>& sweep_parameters();

/// Applies a swept value to a copy of `base` (h sets cells = width / h).
SimConfig apply_sweep_value(const SimConfig& base, const std::string& param, double value);

/// Runs each value in its own worker and aggregates sweep.csv / sweep.json.
/// Failed members are kept and marked; they fail the sweep.
SweepReport sweep(const SimConfig& base, const std::string& param,
                  const std::vector<double>& values, const RunOptions& options = {},
                  unsigned workers = 0);

/// SLIPFSI_OUTPUT_ROOT if set, else "runs".
std::filesystem::path output_root();

}  // namespace slipfsi
