#pragma once

// Mesh text format and VTK legacy export.
//
// Text format (ASCII, lossless round-trip):
//   line 1:            dim nv nc nbf
//   next nv lines:     vertex coordinates (dim doubles, %.17g)
//   next nc lines:     cell vertex indices (dim+1 ints, 0-based)
//   next nbf lines:    facet vertex indices (dim ints) + parent cell index

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "maxp1/errors.hpp"
#include "maxp1/fields.hpp"
#include "maxp1/mesh.hpp"

namespace maxp1 {

class MeshIoError : public IoError {
 public:
  explicit MeshIoError(const std::string& what) : IoError(what) {}
};

inline void save_mesh(const SimplicialMesh& mesh, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw MeshIoError("save_mesh: cannot open " + path);
  std::fprintf(fp, "%d %d %d %d\n", mesh.dim, mesh.num_vertices(), mesh.num_cells(),
               mesh.num_facets());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    for (int c = 0; c < mesh.dim; ++c)
      std::fprintf(fp, "%s%.17g", c ? " " : "", mesh.coords[static_cast<std::size_t>(i) * mesh.dim + c]);
    std::fprintf(fp, "\n");
  }
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const int* cell = mesh.cell(k);
    for (int a = 0; a <= mesh.dim; ++a) std::fprintf(fp, "%s%d", a ? " " : "", cell[a]);
    std::fprintf(fp, "\n");
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const int* verts = mesh.facet(f);
    for (int a = 0; a < mesh.dim; ++a) std::fprintf(fp, "%d ", verts[a]);
    std::fprintf(fp, "%d\n", mesh.facet_parent[f]);
  }
  std::fclose(fp);
}

inline SimplicialMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshIoError("load_mesh: cannot open " + path);
  int line_no = 0;
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw MeshIoError("load_mesh: " + path + ": unexpected end of file at line " +
                        std::to_string(line_no + 1) + " (expected " + what + ")");
    ++line_no;
    return std::istringstream(line);
  };

  SimplicialMesh mesh;
  int nv = 0, nc = 0, nbf = 0;
  {
    auto ss = next_line("header `dim nv nc nbf`");
    if (!(ss >> mesh.dim >> nv >> nc >> nbf) || (mesh.dim != 2 && mesh.dim != 3) || nv < 0 ||
        nc < 0 || nbf < 0)
      throw MeshIoError("load_mesh: " + path + ": malformed header at line 1");
  }
  mesh.coords.resize(static_cast<std::size_t>(nv) * mesh.dim);
  for (int i = 0; i < nv; ++i) {
    auto ss = next_line("vertex coordinates");
    for (int c = 0; c < mesh.dim; ++c)
      if (!(ss >> mesh.coords[static_cast<std::size_t>(i) * mesh.dim + c]))
        throw MeshIoError("load_mesh: " + path + ": malformed vertex at line " +
                          std::to_string(line_no));
  }
  mesh.cells.resize(static_cast<std::size_t>(nc) * (mesh.dim + 1));
  for (int k = 0; k < nc; ++k) {
    auto ss = next_line("cell indices");
    for (int a = 0; a <= mesh.dim; ++a)
      if (!(ss >> mesh.cells[static_cast<std::size_t>(k) * (mesh.dim + 1) + a]))
        throw MeshIoError("load_mesh: " + path + ": malformed cell at line " +
                          std::to_string(line_no));
  }
  mesh.facets.resize(static_cast<std::size_t>(nbf) * mesh.dim);
  mesh.facet_parent.resize(nbf);
  for (int f = 0; f < nbf; ++f) {
    auto ss = next_line("facet indices");
    for (int a = 0; a < mesh.dim; ++a)
      if (!(ss >> mesh.facets[static_cast<std::size_t>(f) * mesh.dim + a]))
        throw MeshIoError("load_mesh: " + path + ": malformed facet at line " +
                          std::to_string(line_no));
    if (!(ss >> mesh.facet_parent[f]))
      throw MeshIoError("load_mesh: " + path + ": missing facet parent at line " +
                        std::to_string(line_no));
  }
  detail::scan_edge_extrema(mesh);
  validate_mesh(mesh);
  return mesh;
}

/// VTK legacy ASCII export of the mesh, optionally with one point vector
/// field (padded to 3 components).
inline void export_vtk(const SimplicialMesh& mesh, const NodalVectorField* field,
                       const std::string& path, const std::string& field_name = "e") {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw MeshIoError("export_vtk: cannot open " + path);
  std::fprintf(fp, "# vtk DataFile Version 3.0\n");
  std::fprintf(fp, "maxp1 mesh export\n");
  std::fprintf(fp, "ASCII\n");
  std::fprintf(fp, "DATASET UNSTRUCTURED_GRID\n");
  std::fprintf(fp, "POINTS %d double\n", mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Point p = mesh.vertex(i);
    std::fprintf(fp, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
  }
  const int nvc = mesh.dim + 1;
  std::fprintf(fp, "CELLS %d %d\n", mesh.num_cells(), mesh.num_cells() * (nvc + 1));
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const int* cell = mesh.cell(k);
    std::fprintf(fp, "%d", nvc);
    for (int a = 0; a < nvc; ++a) std::fprintf(fp, " %d", cell[a]);
    std::fprintf(fp, "\n");
  }
  std::fprintf(fp, "CELL_TYPES %d\n", mesh.num_cells());
  const int vtk_type = mesh.dim == 2 ? 5 : 10;  // triangle / tetra
  for (int k = 0; k < mesh.num_cells(); ++k) std::fprintf(fp, "%d\n", vtk_type);
  if (field) {
    std::fprintf(fp, "POINT_DATA %d\n", mesh.num_vertices());
    std::fprintf(fp, "VECTORS %s double\n", field_name.c_str());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      double v[3] = {0.0, 0.0, 0.0};
      for (int c = 0; c < mesh.dim; ++c) v[c] = (*field)(i, c);
      std::fprintf(fp, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
    }
  }
  std::fclose(fp);
}

}  // namespace maxp1
