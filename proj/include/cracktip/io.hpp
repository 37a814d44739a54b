#ifndef CRACKTIP_IO_HPP
#define CRACKTIP_IO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cracktip {
namespace io {

// Shortest 17-significant-digit decimal form; reproducible across runs.
std::string fmt17(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

// FNV-1a 64-bit content hash, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);

// CSV with fmt17-rendered numeric cells and a '\n' line ending per row.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

// Legacy-ASCII VTK unstructured grid of triangles in the z = 0 plane.
// Point vectors are (x, y) pairs, cell tensors symmetric (xx, xy, yy).
using VtkPointVectors =
    std::pair<std::string, std::vector<std::array<double, 2>>>;
using VtkPointScalars = std::pair<std::string, std::vector<double>>;
using VtkCellTensors =
    std::pair<std::string, std::vector<std::array<double, 3>>>;
std::string render_vtk(const std::string& title,
                       const std::vector<std::array<double, 2>>& points,
                       const std::vector<std::array<int, 3>>& tris,
                       const std::vector<VtkPointVectors>& point_vectors = {},
                       const std::vector<VtkPointScalars>& point_scalars = {},
                       const std::vector<VtkCellTensors>& cell_tensors = {});

}  // namespace io
}  // namespace cracktip

#endif
