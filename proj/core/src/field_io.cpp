#include "morrey/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "morrey/error.hpp"

namespace morrey {

namespace {

constexpr const char* kMagic = "morrey-field";
constexpr int kVersion = 1;

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(std::string("checkpoint truncated before ") + what);
  return line;
}

template <class... T>
void parse(const std::string& line, const char* key, T&... out) {
  std::istringstream ls(line);
  std::string k;
  ls >> k;
  if (k != key) throw FormatError("checkpoint: expected '" + std::string(key) + "', got '" + line + "'");
  ((ls >> out), ...);
  std::string rest;
  if (ls.fail() || (ls >> rest)) throw FormatError("checkpoint: malformed '" + std::string(key) + "' line");
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(std::ostream& os, const ScalarField& field, double p) {
  const GridSpec& g = field.grid().spec();
  os << kMagic << ' ' << kVersion << '\n';
  os << "p " << format_real(p) << '\n';
  os << "grid " << format_real(g.r_min) << ' ' << format_real(g.r_max) << ' ' << g.n_s << ' '
     << g.n_phi << '\n';
  if (const auto& pin = field.pin()) {
    os << "pin " << pin->i << ' ' << pin->j << ' ' << format_real(pin->value) << '\n';
  } else {
    os << "pin none\n";
  }
  const auto v = field.values();
  for (std::size_t i = 0; i < g.n_s; ++i) {
    for (std::size_t j = 0; j < g.n_phi; ++j) {
      if (j > 0) os << ' ';
      os << format_real(v[i * g.n_phi + j]);
    }
    os << '\n';
  }
}

StoredField read_field(std::istream& is) {
  std::string magic;
  int version = 0;
  {
    std::istringstream ls(next_line(is, "header"));
    ls >> magic >> version;
    if (magic != kMagic || version != kVersion) throw FormatError("not a morrey-field v1 checkpoint");
  }
  double p = 0.0;
  parse(next_line(is, "p"), "p", p);
  GridSpec spec;
  parse(next_line(is, "grid"), "grid", spec.r_min, spec.r_max, spec.n_s, spec.n_phi);
  std::optional<PinnedNode> pin;
  {
    const std::string line = next_line(is, "pin");
    if (line != "pin none") {
      PinnedNode n;
      parse(line, "pin", n.i, n.j, n.value);
      pin = n;
    }
  }
  LogPolarGrid grid = [&] {
    try {
      return LogPolarGrid(spec);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("checkpoint grid: ") + e.what());
    }
  }();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < spec.n_s; ++i) {
    std::istringstream ls(next_line(is, "values"));
    for (std::size_t j = 0; j < spec.n_phi; ++j) {
      std::string tok;
      if (!(ls >> tok)) throw FormatError("checkpoint: short value row");
      try {
        std::size_t used = 0;
        values[i * spec.n_phi + j] = std::stod(tok, &used);
        if (used != tok.size()) throw FormatError("checkpoint: bad number '" + tok + "'");
      } catch (const std::logic_error&) {
        throw FormatError("checkpoint: bad number '" + tok + "'");
      }
    }
    std::string rest;
    if (ls >> rest) throw FormatError("checkpoint: long value row");
  }
  std::string rest;
  if (is >> rest) throw FormatError("checkpoint: trailing data");
  ScalarField field(std::move(grid), std::move(values));
  try {
    field.set_pin(pin);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint pin: ") + e.what());
  }
  return StoredField{std::move(field), p};
}

void save_field(const std::string& path, const ScalarField& field, double p) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(os, field, p);
  if (!os) throw std::runtime_error("failed writing " + path);
}

StoredField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field(is);
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
  const LogPolarGrid& g = field.grid();
  os << "r,phi,value\n";
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      os << format_real(g.r(i)) << ',' << format_real(g.phi(j)) << ',' << format_real(field(i, j))
         << '\n';
    }
  }
}

}  // namespace morrey
