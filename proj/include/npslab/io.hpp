#pragma once

// Plain-text artifacts: CSV tables, steady state tables and strip field snapshots.
// Numbers are written with 17 significant digits so every file reads back bit-exact.

#include <npslab/core.hpp>
#include <npslab/strip.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace npslab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Shortest round-trip text for a double ("%.17g"; nan and inf spelled out).
std::string format_double(double v);
double parse_double(const std::string& text);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Columns x, c1, c2, phi, eta1, eta2, mu1, mu2.
CsvTable state_table(const SteadyState1D& state);

/// Snapshot text: header line "# nx=.. ny=.. L=.. time=.. columns=x,y,c1,c2,phi,ux,uy,pressure",
/// then one whitespace-separated row per node. ux is exact at nodes; uy and pressure are
/// averaged from the staggered locations (walls give uy = 0, pressure is taken from the
/// adjacent cell).
void write_snapshot(std::ostream& out, const StripState2D& state);
void write_snapshot_file(const std::string& path, const StripState2D& state);

/// Reads a snapshot back. c1, c2, phi and ux are restored exactly; uy is rebuilt on the
/// staggered grid by averaging nodal values, and pressure by averaging in x.
StripState2D read_snapshot(std::istream& in);
StripState2D read_snapshot_file(const std::string& path);

}  // namespace npslab
