#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "chds/scheme.hpp"

namespace chds {

/// VTK legacy ASCII of a state: the P1 mesh with point data phi, mu, xi, p and the vertex
/// values of u as a 3-vector (zero z component).
void write_state_vtk(const State& state, std::ostream& out);
void write_state_vtk(const State& state, const std::filesystem::path& path);

/// Numbers in CSV files: scientific notation with 12 fractional digits.
std::string format_number(double v);

/// Minimal CSV table: a header and rows of numbers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // throws if absent
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Opens a file for writing, creating parent directories. Throws chds::Error (Io) naming the path.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace chds
