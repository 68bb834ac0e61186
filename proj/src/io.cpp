#include <npslab/io.hpp>
#include <npslab/error.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace npslab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw IoError("not a number: '" + text + "'");
  return v;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw IoError("csv row width does not match header");
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, table);
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv");
  strip_cr(line);
  t.header = split(line, ',');
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw IoError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                    " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in);
}

CsvTable state_table(const SteadyState1D& s) {
  CsvTable t;
  t.header = {"x", "c1", "c2", "phi", "eta1", "eta2", "mu1", "mu2"};
  const auto eta1 = s.eta(0), eta2 = s.eta(1), mu1 = s.mu(0), mu2 = s.mu(1);
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    t.rows.push_back({s.grid[k], s.c1[k], s.c2[k], s.phi[k], eta1[k], eta2[k], mu1[k], mu2[k]});
  }
  return t;
}

void write_snapshot(std::ostream& out, const StripState2D& s) {
  const auto& g = s.grid;
  out << "# nx=" << g.nx << " ny=" << g.ny << " L=" << format_double(g.length) << " time=" << format_double(s.time)
      << " columns=x,y,c1,c2,phi,ux,uy,pressure\n";
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const std::size_t jm = g.jm(j);
      double uy = 0.0;
      if (i > 0 && i + 1 < g.nx) uy = 0.25 * (s.uy(i - 1, jm) + s.uy(i, jm) + s.uy(i - 1, j) + s.uy(i, j));
      double p;
      if (i == 0) {
        p = s.pressure(0, j);
      } else if (i + 1 == g.nx) {
        p = s.pressure(i - 1, j);
      } else {
        p = 0.5 * (s.pressure(i - 1, j) + s.pressure(i, j));
      }
      out << format_double(g.x(i)) << ' ' << format_double(g.y(j)) << ' ' << format_double(s.c1(i, j)) << ' '
          << format_double(s.c2(i, j)) << ' ' << format_double(s.phi(i, j)) << ' ' << format_double(s.ux(i, j))
          << ' ' << format_double(uy) << ' ' << format_double(p) << '\n';
    }
  }
}

void write_snapshot_file(const std::string& path, const StripState2D& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_snapshot(out, state);
  if (!out) throw IoError("write failed for '" + path + "'");
}

StripState2D read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw IoError("snapshot: missing header line");
  std::map<std::string, std::string> kv;
  {
    std::istringstream ss(line.substr(1));
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  for (const char* key : {"nx", "ny", "L", "time"}) {
    if (!kv.count(key)) throw IoError(std::string("snapshot header lacks ") + key);
  }
  const auto nx = static_cast<std::size_t>(std::stoul(kv["nx"]));
  const auto ny = static_cast<std::size_t>(std::stoul(kv["ny"]));
  StripGrid grid(nx, ny, parse_double(kv["L"]));
  StripState2D s = StripState2D::zeros(grid);
  s.time = parse_double(kv["time"]);
  Field2D uyn(nx, ny), pn(nx, ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      if (!std::getline(in, line)) throw IoError("snapshot: truncated data");
      std::istringstream ss(line);
      std::string v[8];
      for (auto& x : v) {
        if (!(ss >> x)) throw IoError("snapshot: expected 8 columns");
      }
      s.c1(i, j) = parse_double(v[2]);
      s.c2(i, j) = parse_double(v[3]);
      s.phi(i, j) = parse_double(v[4]);
      s.ux(i, j) = parse_double(v[5]);
      uyn(i, j) = parse_double(v[6]);
      pn(i, j) = parse_double(v[7]);
    }
  }
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t jp = grid.jp(j);
      s.uy(i, j) = 0.25 * (uyn(i, j) + uyn(i + 1, j) + uyn(i, jp) + uyn(i + 1, jp));
      s.pressure(i, j) = 0.5 * (pn(i, j) + pn(i + 1, j));
    }
  }
  return s;
}

StripState2D read_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

}  // namespace npslab
