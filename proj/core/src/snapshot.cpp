#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "slipfsi/error.hpp"
#include "slipfsi/harness.hpp"

namespace slipfsi {

static_assert(std::endian::native == std::endian::little, "binary snapshots assume a little-endian host");

namespace {

constexpr const char* kTextMagic = "slipfsi-snapshot";
constexpr char kBinaryMagic[8] = {'S', 'L', 'P', 'F', 'S', 'N', 'B', '1'};

void put_double(std::ostream& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, r.ptr - buf);
}

double get_double(const std::string& tok) {
  double v = 0.0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw InvalidArgument("snapshot: bad number '" + tok + "'");
  return v;
}

template <class T>
void put_raw(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw InvalidArgument("snapshot: truncated binary file");
  return v;
}

void check_shape(const Snapshot& s) {
  if (s.nx <= 0 || s.ny <= 0) throw InvalidArgument("snapshot: bad dimensions");
  if (s.names.size() != s.fields.size()) throw InvalidArgument("snapshot: field count mismatch");
  for (const auto& f : s.fields)
    if (f.size() != static_cast<std::size_t>(s.nx) * s.ny)
      throw InvalidArgument("snapshot: field size does not match nx*ny");
}

Snapshot read_text(std::istream& in) {
  Snapshot s;
  std::string line;
  int version = 0;
  {
    std::getline(in, line);
    std::istringstream head(line);
    std::string magic;
    head >> magic >> version;
    if (magic != kTextMagic || version != 1) throw InvalidArgument("snapshot: unsupported header '" + line + "'");
  }
  bool have_fields = false;
  while (!have_fields && std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::string a, b;
    if (key == "nx") { ls >> s.nx; }
    else if (key == "ny") { ls >> s.ny; }
    else if (key == "h") { ls >> a; s.h = get_double(a); }
    else if (key == "origin") { ls >> a >> b; s.origin = {get_double(a), get_double(b)}; }
    else if (key == "t") { ls >> a; s.t = get_double(a); }
    else if (key == "step") { ls >> s.step; }
    else if (key == "fields") {
      std::string name;
      while (ls >> name) s.names.push_back(name);
      have_fields = true;
    } else {
      throw InvalidArgument("snapshot: unknown header line '" + line + "'");
    }
  }
  if (!have_fields) throw InvalidArgument("snapshot: missing fields line");
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny;
  for (const std::string& name : s.names) {
    std::getline(in, line);
    if (line != "# " + name) throw InvalidArgument("snapshot: expected block '# " + name + "'");
    std::vector<double> values;
    values.reserve(n);
    std::string tok;
    while (values.size() < n && in >> tok) values.push_back(get_double(tok));
    if (values.size() != n) throw InvalidArgument("snapshot: field '" + name + "' is truncated");
    std::getline(in, line);  // rest of the last row
    s.fields.push_back(std::move(values));
  }
  check_shape(s);
  return s;
}

Snapshot read_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kBinaryMagic, 8) != 0) throw InvalidArgument("snapshot: bad binary magic");
  Snapshot s;
  s.nx = get_raw<std::int32_t>(in);
  s.ny = get_raw<std::int32_t>(in);
  s.step = get_raw<std::int32_t>(in);
  s.h = get_raw<double>(in);
  s.origin.x = get_raw<double>(in);
  s.origin.y = get_raw<double>(in);
  s.t = get_raw<double>(in);
  const auto count = get_raw<std::uint32_t>(in);
  if (s.nx <= 0 || s.ny <= 0 || count > 64) throw InvalidArgument("snapshot: bad binary header");
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny;
  for (std::uint32_t f = 0; f < count; ++f) {
    const auto len = get_raw<std::uint32_t>(in);
    if (len > 256) throw InvalidArgument("snapshot: bad field name");
    std::string name(len, '\0');
    in.read(name.data(), len);
    std::vector<double> values(n);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw InvalidArgument("snapshot: truncated binary file");
    s.names.push_back(std::move(name));
    s.fields.push_back(std::move(values));
  }
  check_shape(s);
  return s;
}

}  // namespace

const std::vector<double>& Snapshot::field(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return fields[k];
  throw InvalidArgument("snapshot: no field '" + name + "'");
}

Snapshot take_snapshot(const Simulation& sim) {
  const Grid& g = sim.grid();
  Snapshot s;
  s.nx = g.nx;
  s.ny = g.ny;
  s.h = g.h;
  s.origin = g.origin;
  s.t = sim.flow().t;
  s.step = sim.step_count();
  s.names = {"ux", "uy", "p", "rho", "mu", "d"};
  const std::size_t n = g.cell_count();
  std::vector<double> ux(n), uy(n);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 c = sim.flow().vel.at_cell(i, j);
      ux[static_cast<std::size_t>(j) * g.nx + i] = c.x;
      uy[static_cast<std::size_t>(j) * g.nx + i] = c.y;
    }
  auto copy = [](const GridField& f) { return std::vector<double>(f.values().begin(), f.values().end()); };
  s.fields.push_back(std::move(ux));
  s.fields.push_back(std::move(uy));
  s.fields.push_back(copy(sim.flow().p));
  s.fields.push_back(copy(sim.material().rho));
  s.fields.push_back(copy(sim.material().mu));
  s.fields.push_back(sim.kernel_sdf() ? copy(sim.kernel_sdf()->values) : std::vector<double>(n, 0.0));
  return s;
}

void write_snapshot(const Snapshot& s, std::ostream& out) {
  check_shape(s);
  out << kTextMagic << " 1\n";
  out << "nx " << s.nx << "\n";
  out << "ny " << s.ny << "\n";
  out << "h ";
  put_double(out, s.h);
  out << "\norigin ";
  put_double(out, s.origin.x);
  out << ' ';
  put_double(out, s.origin.y);
  out << "\nt ";
  put_double(out, s.t);
  out << "\nstep " << s.step << "\nfields";
  for (const auto& name : s.names) out << ' ' << name;
  out << '\n';
  for (std::size_t f = 0; f < s.fields.size(); ++f) {
    out << "# " << s.names[f] << '\n';
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        if (i) out << ' ';
        put_double(out, s.fields[f][static_cast<std::size_t>(j) * s.nx + i]);
      }
      out << '\n';
    }
  }
  if (!out) throw Error("snapshot: write failed");
}

void write_snapshot_binary(const Snapshot& s, std::ostream& out) {
  check_shape(s);
  out.write(kBinaryMagic, 8);
  put_raw<std::int32_t>(out, s.nx);
  put_raw<std::int32_t>(out, s.ny);
  put_raw<std::int32_t>(out, s.step);
  put_raw(out, s.h);
  put_raw(out, s.origin.x);
  put_raw(out, s.origin.y);
  put_raw(out, s.t);
  put_raw<std::uint32_t>(out, static_cast<std::uint32_t>(s.names.size()));
  for (std::size_t f = 0; f < s.fields.size(); ++f) {
    put_raw<std::uint32_t>(out, static_cast<std::uint32_t>(s.names[f].size()));
    out.write(s.names[f].data(), static_cast<std::streamsize>(s.names[f].size()));
    out.write(reinterpret_cast<const char*>(s.fields[f].data()),
              static_cast<std::streamsize>(s.fields[f].size() * sizeof(double)));
  }
  if (!out) throw Error("snapshot: write failed");
}

Snapshot read_snapshot(std::istream& in) {
  const int first = in.peek();
  if (first == 'S') return read_binary(in);
  return read_text(in);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("snapshot: cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace slipfsi
