#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "slipfsi/error.hpp"
#include "slipfsi/harness.hpp"

namespace slipfsi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  // "a/b" is accepted so grid spacings can be written as 1/128
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    return parse_double(key, s.substr(0, slash)) / parse_double(key, s.substr(slash + 1));
  }
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

Vec2 parse_vec2(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 2) throw ConfigError(key, "expected 'x, y', got '" + text + "'");
  return {v[0], v[1]};
}

std::string format_vec2(Vec2 v) { return format_double(v.x) + ", " + format_double(v.y); }

// "x y; x y; ..." counter-clockwise
std::vector<Vec2> parse_vertices(const std::string& key, const std::string& text) {
  std::vector<Vec2> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ';')) {
    if (trim(item).empty()) continue;
    std::istringstream pair(item);
    std::string a, b, rest;
    if (!(pair >> a >> b) || (pair >> rest)) throw ConfigError(key, "expected 'x y; x y; ...'");
    out.push_back({parse_double(key, a), parse_double(key, b)});
  }
  return out;
}

std::string format_vertices(const std::vector<Vec2>& vs) {
  std::string out;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (k) out += "; ";
    out += format_double(vs[k].x) + " " + format_double(vs[k].y);
  }
  return out;
}

std::string advection_name(AdvectionScheme s) {
  return s == AdvectionScheme::upwind ? "upwind" : "semi_lagrangian";
}

struct Key {
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, const std::string& key, const std::string&)> set;
};

// Ordered table of every configurable key.
const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> table = [] {
    std::vector<std::pair<std::string, Key>> t;
    auto num = [&t](const std::string& name, auto member) {
      t.push_back({name, {[member](const SimConfig& c) { return format_double(member(c)); },
                          [member](SimConfig& c, const std::string& k, const std::string& v) {
                            member(c) = parse_double(k, v);
                          }}});
    };
    auto integer = [&t](const std::string& name, auto member) {
      t.push_back({name, {[member](const SimConfig& c) { return std::to_string(member(c)); },
                          [member](SimConfig& c, const std::string& k, const std::string& v) {
                            member(c) = parse_int(k, v);
                          }}});
    };
    auto flag = [&t](const std::string& name, auto member) {
      t.push_back({name, {[member](const SimConfig& c) {
                            return std::string(member(c) ? "true" : "false");
                          },
                          [member](SimConfig& c, const std::string& k, const std::string& v) {
                            member(c) = parse_bool(k, v);
                          }}});
    };
    auto vec = [&t](const std::string& name, auto member) {
      t.push_back({name, {[member](const SimConfig& c) { return format_vec2(member(c)); },
                          [member](SimConfig& c, const std::string& k, const std::string& v) {
                            member(c) = parse_vec2(k, v);
                          }}});
    };

    t.push_back({"scenario.name", {[](const SimConfig& c) { return c.name; },
                                   [](SimConfig& c, const std::string&, const std::string& v) { c.name = trim(v); }}});
    t.push_back({"scenario.kind",
                 {[](const SimConfig& c) { return to_string(c.kind); },
                  [](SimConfig& c, const std::string& k, const std::string& v) {
                    try {
                      c.kind = parse_scenario_kind(trim(v));
                    } catch (const InvalidArgument& e) {
                      throw ConfigError(k, e.what());
                    }
                  }}});
    vec("domain.origin", [](auto& c) -> auto& { return c.origin; });
    num("domain.width", [](auto& c) -> auto& { return c.width; });
    num("domain.height", [](auto& c) -> auto& { return c.height; });
    integer("domain.cells", [](auto& c) -> auto& { return c.cells; });

    num("material.epsilon", [](auto& c) -> auto& { return c.params.epsilon; });
    num("material.delta", [](auto& c) -> auto& { return c.params.delta; });
    num("material.beta_slip", [](auto& c) -> auto& { return c.params.beta; });
    num("material.mu_f", [](auto& c) -> auto& { return c.params.mu_f; });
    num("material.rho_s", [](auto& c) -> auto& { return c.params.rho_s; });
    num("material.rho_f", [](auto& c) -> auto& { return c.params.rho_f; });

    t.push_back({"body.shape", {[](const SimConfig& c) { return c.body.shape; },
                                [](SimConfig& c, const std::string&, const std::string& v) { c.body.shape = trim(v); }}});
    num("body.radius", [](auto& c) -> auto& { return c.body.radius; });
    vec("body.center", [](auto& c) -> auto& { return c.body.center; });
    t.push_back({"body.vertices",
                 {[](const SimConfig& c) { return format_vertices(c.body.vertices); },
                  [](SimConfig& c, const std::string& k, const std::string& v) {
                    c.body.vertices = parse_vertices(k, v);
                  }}});
    vec("body.velocity", [](auto& c) -> auto& { return c.body.velocity; });
    num("body.omega", [](auto& c) -> auto& { return c.body.omega; });

    vec("force.gravity", [](auto& c) -> auto& { return c.gravity; });

    num("time.t_end", [](auto& c) -> auto& { return c.t_end; });
    num("time.cfl", [](auto& c) -> auto& { return c.stepper.cfl; });
    num("time.dt_max", [](auto& c) -> auto& { return c.stepper.dt_max; });
    num("time.dt_min", [](auto& c) -> auto& { return c.stepper.dt_min; });

    t.push_back({"solver.levelset",
                 {[](const SimConfig& c) { return std::string(to_string(c.stepper.levelset)); },
                  [](SimConfig& c, const std::string& k, const std::string& v) {
                    try {
                      c.stepper.levelset = parse_levelset_scheme(trim(v));
                    } catch (const InvalidArgument& e) {
                      throw ConfigError(k, e.what());
                    }
                  }}});
    t.push_back({"solver.advection",
                 {[](const SimConfig& c) { return advection_name(c.stepper.advection); },
                  [](SimConfig& c, const std::string& k, const std::string& v) {
                    try {
                      c.stepper.advection = parse_advection_scheme(trim(v));
                    } catch (const InvalidArgument& e) {
                      throw ConfigError(k, e.what());
                    }
                  }}});
    integer("solver.reinit_every", [](auto& c) -> auto& { return c.stepper.reinit_every; });
    flag("solver.mollified_density", [](auto& c) -> auto& { return c.stepper.mollified_density; });
    flag("solver.incremental_pressure", [](auto& c) -> auto& { return c.stepper.incremental_pressure; });
    integer("solver.pressure_iterations", [](auto& c) -> auto& { return c.stepper.pressure_iterations; });
    num("solver.pressure_tol", [](auto& c) -> auto& { return c.stepper.pressure_tol; });
    num("solver.poisson_tol", [](auto& c) -> auto& { return c.stepper.poisson_tol; });
    num("solver.divergence_tol", [](auto& c) -> auto& { return c.stepper.divergence_tol; });

    num("vortex.amplitude", [](auto& c) -> auto& { return c.vortex_amplitude; });
    num("cavity.lid_speed", [](auto& c) -> auto& { return c.lid_speed; });
    num("couette.slab", [](auto& c) -> auto& { return c.couette_slab; });
    num("couette.wall_speed", [](auto& c) -> auto& { return c.couette_wall_speed; });

    num("checks.energy_tol", [](auto& c) -> auto& { return c.checks.energy_tol; });
    num("checks.budget_tol", [](auto& c) -> auto& { return c.checks.budget_tol; });
    num("checks.mass_tol", [](auto& c) -> auto& { return c.checks.mass_tol; });
    num("checks.slip_tol", [](auto& c) -> auto& { return c.checks.slip_tol; });
    num("checks.cavity_tol", [](auto& c) -> auto& { return c.checks.cavity_tol; });
    flag("checks.contact", [](auto& c) -> auto& { return c.checks.contact; });
    integer("checks.contact_transient", [](auto& c) -> auto& { return c.checks.contact_transient; });
    integer("checks.contact_non_monotone", [](auto& c) -> auto& { return c.checks.contact_non_monotone; });

    integer("output.csv_every", [](auto& c) -> auto& { return c.output.csv_every; });
    integer("output.snapshot_every", [](auto& c) -> auto& { return c.output.snapshot_every; });
    flag("output.binary_snapshots", [](auto& c) -> auto& { return c.output.binary_snapshots; });

    t.push_back({"random.seed",
                 {[](const SimConfig& c) { return std::to_string(c.seed); },
                  [](SimConfig& c, const std::string& k, const std::string& v) {
                    const int s = parse_int(k, v);
                    if (s < 0) throw ConfigError(k, "must be >= 0");
                    c.seed = static_cast<unsigned>(s);
                  }}});
    return t;
  }();
  return table;
}

const Key& find_key(const std::string& name) {
  for (const auto& [k, v] : keys())
    if (k == name) return v;
  throw ConfigError(name, "unknown key");
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::body: return "body";
    case ScenarioKind::vortex: return "vortex";
    case ScenarioKind::cavity: return "cavity";
    case ScenarioKind::couette: return "couette";
  }
  return "body";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "body") return ScenarioKind::body;
  if (name == "vortex") return ScenarioKind::vortex;
  if (name == "cavity") return ScenarioKind::cavity;
  if (name == "couette") return ScenarioKind::couette;
  throw InvalidArgument("unknown scenario kind '" + name + "' (body, vortex, cavity, couette)");
}

BodyShape BodyConfig::shape_value() const {
  if (shape == "disk") return Disk{center, radius};
  if (shape == "polygon") return ConvexPolygon{vertices};
  throw ConfigError("body.shape", "expected disk or polygon, got '" + shape + "'");
}

int SimConfig::ny() const { return static_cast<int>(std::lround(height / h())); }

Grid SimConfig::grid() const { return Grid(cells, ny(), h(), origin); }

void SimConfig::validate() {
  warnings.clear();
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(std::isfinite(origin.x) && std::isfinite(origin.y), "domain.origin", "must be finite");
  require(width > 0.0 && std::isfinite(width), "domain.width", "must be finite and > 0");
  require(height > 0.0 && std::isfinite(height), "domain.height", "must be finite and > 0");
  require(cells >= 8, "domain.cells", "must be >= 8");
  require(ny() >= 8 && std::abs(ny() * h() - height) <= 1e-9 * height, "domain.height",
          "must be a multiple of the cell size width / cells");
  try {
    params.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("material." + e.field(), "must be finite and > 0");
  }
  require(t_end > 0.0 && std::isfinite(t_end), "time.t_end", "must be finite and > 0");
  require(stepper.cfl > 0.0 && stepper.cfl <= 1.0, "time.cfl", "must be in (0, 1]");
  require(stepper.dt_max > 0.0, "time.dt_max", "must be > 0");
  require(stepper.dt_min > 0.0 && stepper.dt_min <= stepper.dt_max, "time.dt_min", "must be in (0, dt_max]");
  require(stepper.reinit_every >= 0, "solver.reinit_every", "must be >= 0");
  require(stepper.pressure_iterations >= 1, "solver.pressure_iterations", "must be >= 1");
  require(stepper.pressure_tol > 0.0, "solver.pressure_tol", "must be > 0");
  require(stepper.poisson_tol > 0.0, "solver.poisson_tol", "must be > 0");
  require(stepper.divergence_tol > 0.0, "solver.divergence_tol", "must be > 0");
  require(std::isfinite(gravity.x) && std::isfinite(gravity.y), "force.gravity", "must be finite");
  require(checks.energy_tol > 0.0, "checks.energy_tol", "must be > 0");
  require(checks.budget_tol > 0.0, "checks.budget_tol", "must be > 0");
  require(checks.mass_tol > 0.0, "checks.mass_tol", "must be > 0");
  require(checks.slip_tol > 0.0, "checks.slip_tol", "must be > 0");
  require(checks.cavity_tol > 0.0, "checks.cavity_tol", "must be > 0");
  require(checks.contact_transient >= 0, "checks.contact_transient", "must be >= 0");
  require(checks.contact_non_monotone >= 0, "checks.contact_non_monotone", "must be >= 0");
  require(output.csv_every >= 1, "output.csv_every", "must be >= 1");
  require(output.snapshot_every >= 0, "output.snapshot_every", "must be >= 0");

  const double hh = h();
  if (kind == ScenarioKind::body || kind == ScenarioKind::couette) {
    // the mollifier and ring sampling need a resolved ring
    require(params.delta >= 2.0 * hh, "material.delta", "must be >= 2h = " + format_double(2.0 * hh));
    if (params.delta < 4.0 * hh)
      warnings.push_back("material.delta = " + format_double(params.delta) + " is below 4h = " +
                         format_double(4.0 * hh) + "; the mixture ring is under-resolved");
  }
  switch (kind) {
    case ScenarioKind::body: {
      BodyShape shape;
      try {
        shape = body.shape_value();
        validate_shape(shape);
      } catch (const InvalidArgument& e) {
        throw ConfigError(body.shape == "polygon" ? "body.vertices" : "body.radius", e.what());
      }
      const Grid g = grid();
      double wall = 0.0;
      if (const auto* d = std::get_if<Disk>(&shape)) {
        wall = g.wall_distance(d->center) - d->radius;
      } else {
        wall = std::numeric_limits<double>::infinity();
        for (const Vec2& v : std::get<ConvexPolygon>(shape).vertices) wall = std::min(wall, g.wall_distance(v));
      }
      require(wall > 2.0 * params.delta, body.shape == "disk" ? "body.center" : "body.vertices",
              "body must stay more than 2 delta from the walls (distance " + format_double(wall) + ")");
      require(signed_distance(shape, shape_centroid(shape)) > params.delta + hh,
              body.shape == "disk" ? "body.radius" : "body.vertices",
              "body must be thicker than delta + h so the kernel is resolved");
      require(std::isfinite(body.velocity.x) && std::isfinite(body.velocity.y), "body.velocity", "must be finite");
      require(std::isfinite(body.omega), "body.omega", "must be finite");
      break;
    }
    case ScenarioKind::vortex:
      require(std::isfinite(vortex_amplitude), "vortex.amplitude", "must be finite");
      break;
    case ScenarioKind::cavity:
      require(lid_speed > 0.0, "cavity.lid_speed", "must be > 0");
      require(ny() == cells, "domain.height", "the cavity must be square");
      break;
    case ScenarioKind::couette:
      require(couette_slab > 0.0 && couette_slab < 1.0, "couette.slab", "must be in (0, 1)");
      require(couette_wall_speed > 0.0, "couette.wall_speed", "must be > 0");
      require(width == 1.0 && height == 1.0, "domain.width", "the Couette box is the unit square");
      require(params.delta >= 4.0 * hh, "material.delta", "slip sampling needs delta >= 4h");
      break;
  }
}

void set_config_value(SimConfig& config, const std::string& key, const std::string& value) {
  find_key(key).set(config, key, value);
}

SimConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("<file>", std::string("line ") + std::to_string(e.line()) + ": " + e.message());
  }
  SimConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(section, "keys must be inside a [section]");
    for (const auto& [key, value] : body) set_config_value(c, section + "." + key, value.data());
  }
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_ini(const SimConfig& config) {
  std::string out, section;
  for (const auto& [name, key] : keys()) {
    const auto dot = name.find('.');
    const std::string sec = name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += name.substr(dot + 1) + " = " + key.get(config) + "\n";
  }
  return out;
}

}  // namespace slipfsi
