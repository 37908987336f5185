#include "chds/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "chds/error.hpp"

namespace chds {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.precision(17);
  return out;
}

void write_state_vtk(const State& s, std::ostream& out) {
  const Mesh& mesh = s.phi.fe_space().mesh();
  const int nv = mesh.vertex_count();
  out << "# vtk DataFile Version 3.0\n";
  out << "chds state step " << s.step << " time " << s.time << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Point& p : mesh.vertices()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
  for (const Triangle& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.triangle_count() << '\n';
  for (int t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
  out << "POINT_DATA " << nv << '\n';
  auto scalar = [&](const char* name, const FeFunction& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nv; ++i) out << (f.space ? f.coefficients[i] : 0.0) << '\n';
  };
  scalar("phi", s.phi);
  scalar("mu", s.mu);
  scalar("xi", s.xi);
  scalar("p", s.p);
  out << "VECTORS u double\n";
  const int stride = s.u.space ? s.u.fe_space().scalar_dof_count() : 0;
  for (int i = 0; i < nv; ++i) {
    if (s.u.space)
      out << s.u.coefficients[i] << ' ' << s.u.coefficients[stride + i] << " 0\n";
    else
      out << "0 0 0\n";
  }
}

void write_state_vtk(const State& s, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  write_state_vtk(s, out);
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw Error(ErrorKind::InvalidArgument, "CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const int c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty CSV: " + path.string());
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != table.header.size())
      throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace chds
