#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "slipfsi/error.hpp"
#include "slipfsi/harness.hpp"

namespace {

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    slipfsi::SimConfig probe;
    // reuse the config number syntax, which accepts fractions such as 1/64
    slipfsi::set_config_value(probe, "domain.width", item);
    out.push_back(probe.width);
  }
  return out;
}

void print(const slipfsi::RunSummary& s, std::ostream& out) {
  for (const auto& w : s.warnings) out << "WARN " << w << "\n";
  for (const auto& c : s.checks) out << c.line() << "\n";
  out << (s.pass() ? "PASS" : "FAIL") << " " << s.name << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized rigid-body / fluid simulations with Navier slip"};
  app.require_subcommand(1);
  std::string out_dir;
  bool quiet = false;
  app.add_option("--out", out_dir, "Output directory (default: $SLIPFSI_OUTPUT_ROOT or ./runs, plus the run name)");
  app.add_flag("--quiet", quiet, "Only print the verdict");

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario");
  run_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--set", overrides, "Override a key, e.g. --set time.t_end=0.5");

  std::string param, values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("config", config_path, "Base configuration file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--param", param, "epsilon, delta, beta or h")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values, e.g. 1e-1,1e-2,1e-3")->required();
  sweep_cmd->add_option("--set", overrides, "Override a key of the base configuration");
  unsigned workers = 0;
  sweep_cmd->add_option("--workers", workers, "Concurrent members (default: hardware threads)");

  std::string run_dir;
  auto* check_cmd = app.add_subcommand("check", "Re-evaluate the diagnostics of a run directory");
  check_cmd->add_option("run-dir", run_dir, "Directory written by `run`")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  std::ostream& out = std::cout;
  try {
    auto load = [&] {
      slipfsi::SimConfig c = slipfsi::load_config(config_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw slipfsi::ConfigError(kv, "--set expects key=value");
        slipfsi::set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
      }
      return c;
    };

    if (*run_cmd) {
      const slipfsi::SimConfig c = load();
      slipfsi::RunOptions o;
      o.out_dir = out_dir.empty() ? slipfsi::output_root() / c.name : std::filesystem::path(out_dir);
      if (!quiet) o.log = &std::cerr;
      const auto s = slipfsi::run(c, o);
      if (!quiet) print(s, out);
      else out << (s.pass() ? "PASS" : "FAIL") << "\n";
      if (!quiet) out << "output: " << o.out_dir.string() << "\n";
      return s.pass() ? 0 : 1;
    }
    if (*sweep_cmd) {
      const slipfsi::SimConfig c = load();
      slipfsi::RunOptions o;
      o.out_dir = out_dir.empty() ? slipfsi::output_root() / (c.name + "_sweep_" + param)
                                  : std::filesystem::path(out_dir);
      const auto r = slipfsi::sweep(c, param, parse_values(values), o, workers);
      if (!quiet) {
        for (const auto& m : r.members) {
          out << param << "=" << m.value << ": ";
          if (!m.error.empty()) out << "FAILED " << m.error << "\n";
          else out << (m.summary->pass() ? "PASS" : "FAIL") << "\n";
        }
        if (r.slope) out << "slope " << *r.slope << "\n";
        for (const auto& ch : r.checks) out << ch.line() << "\n";
        out << "output: " << o.out_dir.string() << "\n";
      }
      out << (r.pass() ? "PASS" : "FAIL") << " sweep " << param << "\n";
      return r.pass() ? 0 : 1;
    }
    if (*check_cmd) {
      const auto s = slipfsi::check_run(run_dir);
      if (!quiet) print(s, out);
      else out << (s.pass() ? "PASS" : "FAIL") << "\n";
      return s.pass() ? 0 : 1;
    }
  } catch (const slipfsi::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
