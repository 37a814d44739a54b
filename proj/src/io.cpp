#include "cracktip/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cracktip/errors.hpp"

namespace cracktip {
namespace io {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

std::string fnv1a64_hex(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt17(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string render_vtk(const std::string& title,
                       const std::vector<std::array<double, 2>>& points,
                       const std::vector<std::array<int, 3>>& tris,
                       const std::vector<VtkPointVectors>& point_vectors,
                       const std::vector<VtkPointScalars>& point_scalars,
                       const std::vector<VtkCellTensors>& cell_tensors) {
  for (const auto& pv : point_vectors)
    if (pv.second.size() != points.size())
      throw IoError("point data size mismatch for " + pv.first);
  for (const auto& ps : point_scalars)
    if (ps.second.size() != points.size())
      throw IoError("point data size mismatch for " + ps.first);
  for (const auto& ct : cell_tensors)
    if (ct.second.size() != tris.size())
      throw IoError("cell data size mismatch for " + ct.first);

  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points)
    out << fmt17(p[0]) << ' ' << fmt17(p[1]) << " 0\n";
  out << "CELLS " << tris.size() << ' ' << 4 * tris.size() << '\n';
  for (const auto& t : tris)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << tris.size() << '\n';
  for (size_t i = 0; i < tris.size(); ++i) out << "5\n";

  if (!point_vectors.empty() || !point_scalars.empty()) {
    out << "POINT_DATA " << points.size() << '\n';
    for (const auto& pv : point_vectors) {
      out << "VECTORS " << pv.first << " double\n";
      for (const auto& v : pv.second)
        out << fmt17(v[0]) << ' ' << fmt17(v[1]) << " 0\n";
    }
    for (const auto& ps : point_scalars) {
      out << "SCALARS " << ps.first << " double 1\nLOOKUP_TABLE default\n";
      for (const double v : ps.second) out << fmt17(v) << '\n';
    }
  }
  if (!cell_tensors.empty()) {
    out << "CELL_DATA " << tris.size() << '\n';
    for (const auto& ct : cell_tensors) {
      out << "TENSORS " << ct.first << " double\n";
      for (const auto& s : ct.second) {
        out << fmt17(s[0]) << ' ' << fmt17(s[1]) << " 0\n";
        out << fmt17(s[1]) << ' ' << fmt17(s[2]) << " 0\n";
        out << "0 0 0\n";
      }
    }
  }
  return out.str();
}

}  // namespace io
}  // namespace cracktip
