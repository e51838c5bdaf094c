#pragma once

// Simplicial meshes (triangles in 2D, tetrahedra in 3D) with the structured
// square -> unit-disk mesh family used by the convergence studies.
//
// Conventions:
//  * vertices are stored flat, `dim` doubles per vertex, row-major over the
//    generating grid so runs are reproducible across platforms;
//  * cells are (dim+1)-tuples of vertex indices with positive signed volume;
//  * boundary facets are dim-tuples, each annotated with its unique parent
//    cell, listed in cell-traversal order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxp1 {

using Point = std::array<double, 3>;  // z unused in 2D

class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

struct SimplicialMesh {
  int dim = 2;
  std::vector<double> coords;      // nv * dim
  std::vector<int> cells;          // nc * (dim+1)
  std::vector<int> facets;         // nbf * dim, boundary only
  std::vector<int> facet_parent;   // nbf, owning cell of each boundary facet
  double h_max = 0.0;
  double h_min = 0.0;

  int num_vertices() const { return static_cast<int>(coords.size()) / dim; }
  int num_cells() const { return static_cast<int>(cells.size()) / (dim + 1); }
  int num_facets() const { return static_cast<int>(facets.size()) / dim; }

  Point vertex(int i) const {
    Point p{0.0, 0.0, 0.0};
    for (int c = 0; c < dim; ++c) p[c] = coords[static_cast<std::size_t>(i) * dim + c];
    return p;
  }
  const int* cell(int k) const { return &cells[static_cast<std::size_t>(k) * (dim + 1)]; }
  const int* facet(int f) const { return &facets[static_cast<std::size_t>(f) * dim]; }
};

/// Refinement level of the structured disk family: 2*2^(2l+2) cells, grid
/// spacing 2^(-l) on the generating square.
struct MeshLevel {
  int l;
  long expected_cells;
  double h_ref;

  explicit MeshLevel(int level)
      : l(level),
        expected_cells(level >= 1 ? (2L << (2 * level + 2)) : 0),
        h_ref(std::ldexp(1.0, -level)) {
    if (level < 1) throw std::invalid_argument("MeshLevel: level must be >= 1");
  }
};

struct CellGeometry {
  double volume = 0.0;
  Point centroid{0.0, 0.0, 0.0};
  std::array<Point, 4> p1_gradients{};  // gradients of barycentric functions, dim+1 used
};

namespace detail {

inline void scan_edge_extrema(SimplicialMesh& mesh) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const int nvc = mesh.dim + 1;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const int* cell = mesh.cell(k);
    for (int a = 0; a < nvc; ++a) {
      for (int b = a + 1; b < nvc; ++b) {
        const Point pa = mesh.vertex(cell[a]);
        const Point pb = mesh.vertex(cell[b]);
        double d2 = 0.0;
        for (int c = 0; c < mesh.dim; ++c) d2 += (pa[c] - pb[c]) * (pa[c] - pb[c]);
        const double d = std::sqrt(d2);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
  }
  mesh.h_min = lo;
  mesh.h_max = hi;
}

// Facets appearing in exactly one cell form the boundary. Listed in the
// deterministic order of first appearance over the cell loop.
inline void extract_boundary_facets(SimplicialMesh& mesh) {
  const int d = mesh.dim;
  const int nvc = d + 1;
  struct FacetRec {
    int count = 0;
    int parent = -1;
    std::array<int, 3> verts{};  // orientation as seen from the first parent
    int order = -1;
  };
  std::map<std::array<int, 3>, FacetRec> table;
  int order = 0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const int* cell = mesh.cell(k);
    for (int skip = 0; skip < nvc; ++skip) {
      std::array<int, 3> verts{-1, -1, -1};
      int n = 0;
      for (int a = 0; a < nvc; ++a)
        if (a != skip) verts[n++] = cell[a];
      std::array<int, 3> key = verts;
      std::sort(key.begin(), key.begin() + d);
      auto& rec = table[key];
      if (rec.count == 0) {
        rec.parent = k;
        rec.verts = verts;
        rec.order = order++;
      }
      ++rec.count;
    }
  }
  std::vector<const FacetRec*> boundary;
  for (const auto& [key, rec] : table) {
    if (rec.count == 1) boundary.push_back(&rec);
    if (rec.count > 2) throw MeshError("mesh is not a manifold: facet shared by >2 cells");
  }
  std::sort(boundary.begin(), boundary.end(),
            [](const FacetRec* a, const FacetRec* b) { return a->order < b->order; });
  mesh.facets.clear();
  mesh.facet_parent.clear();
  for (const FacetRec* rec : boundary) {
    for (int a = 0; a < d; ++a) mesh.facets.push_back(rec->verts[a]);
    mesh.facet_parent.push_back(rec->parent);
  }
}

}  // namespace detail

/// Post-construction bookkeeping: boundary facets and edge-length extrema.
inline void finalize_mesh(SimplicialMesh& mesh) {
  detail::extract_boundary_facets(mesh);
  detail::scan_edge_extrema(mesh);
}

/// Uniform triangulation of the square (-1,1)^2 with 2*2^(2l+2) triangles.
/// Symmetric about both axes; in each quadrant the diagonals run parallel to
/// x1=x2 where x1*x2 >= 0 and parallel to x1=-x2 otherwise.
inline SimplicialMesh build_square_mesh(MeshLevel level) {
  const int n = 1 << (level.l + 1);  // grid cells per side
  const double h = 2.0 / n;
  SimplicialMesh mesh;
  mesh.dim = 2;
  mesh.coords.reserve(static_cast<std::size_t>(n + 1) * (n + 1) * 2);
  for (int iy = 0; iy <= n; ++iy) {
    for (int ix = 0; ix <= n; ++ix) {
      mesh.coords.push_back(-1.0 + ix * h);
      mesh.coords.push_back(-1.0 + iy * h);
    }
  }
  auto vid = [n](int ix, int iy) { return iy * (n + 1) + ix; };
  mesh.cells.reserve(static_cast<std::size_t>(n) * n * 6);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int ll = vid(ix, iy), lr = vid(ix + 1, iy);
      const int ul = vid(ix, iy + 1), ur = vid(ix + 1, iy + 1);
      const double cx = -1.0 + (ix + 0.5) * h;
      const double cy = -1.0 + (iy + 0.5) * h;
      if (cx * cy >= 0.0) {
        // diagonal parallel to x1 = x2
        mesh.cells.insert(mesh.cells.end(), {ll, lr, ur});
        mesh.cells.insert(mesh.cells.end(), {ll, ur, ul});
      } else {
        // diagonal parallel to x1 = -x2
        mesh.cells.insert(mesh.cells.end(), {ll, lr, ul});
        mesh.cells.insert(mesh.cells.end(), {lr, ur, ul});
      }
    }
  }
  finalize_mesh(mesh);
  return mesh;
}

inline SimplicialMesh build_square_mesh(int l) { return build_square_mesh(MeshLevel(l)); }

namespace detail {

// Concentric map: the square ring {‖.‖_inf = s} lands on the circle of radius
// s, arc-length proportionally along each ring; rays through corners map to
// the diagonals. Fixed point at the origin.
inline std::array<double, 2> square_to_disk_point(double x, double y) {
  if (x == 0.0 && y == 0.0) return {0.0, 0.0};
  constexpr double quarter = 3.14159265358979323846 / 4.0;
  double r, phi;
  if (x * x > y * y) {
    r = x;
    phi = quarter * (y / x);
  } else {
    r = y;
    phi = 2.0 * quarter - quarter * (x / y);
  }
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace detail

/// Vertex-wise map of a build_square_mesh output onto the closed unit disk;
/// connectivity is unchanged and boundary vertices land on the unit circle.
inline SimplicialMesh map_square_to_disk(const SimplicialMesh& square) {
  if (square.dim != 2) throw MeshError("map_square_to_disk: expected a 2D mesh");
  double extent = 0.0;
  for (double c : square.coords) extent = std::max(extent, std::abs(c));
  if (std::abs(extent - 1.0) > 1e-12)
    throw MeshError("map_square_to_disk: expected the square (-1,1)^2");
  SimplicialMesh disk = square;
  const int nv = square.num_vertices();
  for (int i = 0; i < nv; ++i) {
    const auto p = detail::square_to_disk_point(square.coords[2 * i], square.coords[2 * i + 1]);
    disk.coords[2 * i] = p[0];
    disk.coords[2 * i + 1] = p[1];
  }
  detail::scan_edge_extrema(disk);
  return disk;
}

/// Structured disk mesh at a refinement level (square mesh pushed through the
/// concentric map).
inline SimplicialMesh build_disk_mesh(int l) {
  return map_square_to_disk(build_square_mesh(MeshLevel(l)));
}

/// Kuhn split of the unit cube into n^3 * 6 tetrahedra. Used by invariant and
/// property tests; the convergence experiments are 2D.
inline SimplicialMesh build_cube_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_cube_mesh: n must be >= 1");
  SimplicialMesh mesh;
  mesh.dim = 3;
  const int s = n + 1;
  auto vid = [s](int ix, int iy, int iz) { return (iz * s + iy) * s + ix; };
  const double h = 1.0 / n;
  for (int iz = 0; iz < s; ++iz)
    for (int iy = 0; iy < s; ++iy)
      for (int ix = 0; ix < s; ++ix) {
        mesh.coords.push_back(ix * h);
        mesh.coords.push_back(iy * h);
        mesh.coords.push_back(iz * h);
      }
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        for (const auto& perm : perms) {
          int corner[3] = {ix, iy, iz};
          std::array<int, 4> tet{};
          tet[0] = vid(corner[0], corner[1], corner[2]);
          for (int step = 0; step < 3; ++step) {
            ++corner[perm[step]];
            tet[step + 1] = vid(corner[0], corner[1], corner[2]);
          }
          // enforce positive orientation
          const Point a = mesh.vertex(tet[0]), b = mesh.vertex(tet[1]);
          const Point c = mesh.vertex(tet[2]), d = mesh.vertex(tet[3]);
          double u[3], v[3], w[3];
          for (int j = 0; j < 3; ++j) {
            u[j] = b[j] - a[j];
            v[j] = c[j] - a[j];
            w[j] = d[j] - a[j];
          }
          const double det = u[0] * (v[1] * w[2] - v[2] * w[1]) -
                             u[1] * (v[0] * w[2] - v[2] * w[0]) +
                             u[2] * (v[0] * w[1] - v[1] * w[0]);
          if (det < 0.0) std::swap(tet[2], tet[3]);
          mesh.cells.insert(mesh.cells.end(), tet.begin(), tet.end());
        }
  finalize_mesh(mesh);
  return mesh;
}

/// Signed volume, centroid and the constant P1 barycentric gradients of one
/// cell. Throws on degenerate (non-positive volume) cells.
inline CellGeometry cell_geometry(const SimplicialMesh& mesh, int k) {
  if (k < 0 || k >= mesh.num_cells()) throw MeshError("cell_geometry: cell index out of range");
  const int d = mesh.dim;
  const int* cell = mesh.cell(k);
  CellGeometry geo;
  const Point p0 = mesh.vertex(cell[0]);
  for (int c = 0; c < d; ++c) {
    geo.centroid[c] = p0[c];
    for (int a = 1; a <= d; ++a) geo.centroid[c] += mesh.vertex(cell[a])[c];
    geo.centroid[c] /= (d + 1);
  }
  if (d == 2) {
    const Point p1 = mesh.vertex(cell[1]), p2 = mesh.vertex(cell[2]);
    const double ax = p1[0] - p0[0], ay = p1[1] - p0[1];
    const double bx = p2[0] - p0[0], by = p2[1] - p0[1];
    const double det = ax * by - ay * bx;  // 2 * area
    geo.volume = 0.5 * det;
    if (!(geo.volume > 0.0))
      throw MeshError("cell_geometry: degenerate or inverted cell " + std::to_string(k));
    // rows of J^{-T}
    geo.p1_gradients[1] = {by / det, -bx / det, 0.0};
    geo.p1_gradients[2] = {-ay / det, ax / det, 0.0};
  } else {
    const Point p1 = mesh.vertex(cell[1]), p2 = mesh.vertex(cell[2]), p3 = mesh.vertex(cell[3]);
    double J[3][3];
    for (int j = 0; j < 3; ++j) {
      J[j][0] = p1[j] - p0[j];
      J[j][1] = p2[j] - p0[j];
      J[j][2] = p3[j] - p0[j];
    }
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    geo.volume = det / 6.0;
    if (!(geo.volume > 0.0))
      throw MeshError("cell_geometry: degenerate or inverted cell " + std::to_string(k));
    double inv[3][3];
    inv[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) / det;
    inv[0][1] = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) / det;
    inv[0][2] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) / det;
    inv[1][0] = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) / det;
    inv[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) / det;
    inv[1][2] = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) / det;
    inv[2][0] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) / det;
    inv[2][1] = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) / det;
    inv[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) / det;
    // gradient of barycentric function a is row a-1 of J^{-1}
    for (int a = 1; a <= 3; ++a)
      geo.p1_gradients[a] = {inv[a - 1][0], inv[a - 1][1], inv[a - 1][2]};
  }
  for (int c = 0; c < d; ++c) {
    double sum = 0.0;
    for (int a = 1; a <= d; ++a) sum += geo.p1_gradients[a][c];
    geo.p1_gradients[0][c] = -sum;
  }
  return geo;
}

/// Length of a boundary edge (2D) or area of a boundary triangle (3D).
inline double facet_measure(const SimplicialMesh& mesh, int f) {
  if (f < 0 || f >= mesh.num_facets()) throw MeshError("facet_measure: facet index out of range");
  const int* verts = mesh.facet(f);
  double measure = 0.0;
  if (mesh.dim == 2) {
    const Point a = mesh.vertex(verts[0]), b = mesh.vertex(verts[1]);
    measure = std::hypot(b[0] - a[0], b[1] - a[1]);
  } else {
    const Point a = mesh.vertex(verts[0]), b = mesh.vertex(verts[1]), c = mesh.vertex(verts[2]);
    const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const double cx = u[1] * v[2] - u[2] * v[1];
    const double cy = u[2] * v[0] - u[0] * v[2];
    const double cz = u[0] * v[1] - u[1] * v[0];
    measure = 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
  }
  if (!(measure > 0.0)) throw MeshError("facet_measure: degenerate facet " + std::to_string(f));
  return measure;
}

/// Structural validation used after file loads and by property tests: index
/// ranges, cell orientation, facet-parent consistency, h bookkeeping.
inline void validate_mesh(const SimplicialMesh& mesh) {
  if (mesh.dim != 2 && mesh.dim != 3) throw MeshError("validate_mesh: dim must be 2 or 3");
  const int nv = mesh.num_vertices();
  const int nvc = mesh.dim + 1;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const int* cell = mesh.cell(k);
    for (int a = 0; a < nvc; ++a) {
      if (cell[a] < 0 || cell[a] >= nv)
        throw MeshError("validate_mesh: cell " + std::to_string(k) + " has out-of-range vertex");
      for (int b = a + 1; b < nvc; ++b)
        if (cell[a] == cell[b])
          throw MeshError("validate_mesh: cell " + std::to_string(k) + " repeats a vertex");
    }
    cell_geometry(mesh, k);  // throws on non-positive volume
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const int* verts = mesh.facet(f);
    const int parent = mesh.facet_parent[f];
    if (parent < 0 || parent >= mesh.num_cells())
      throw MeshError("validate_mesh: facet " + std::to_string(f) + " has invalid parent cell");
    const int* cell = mesh.cell(parent);
    for (int a = 0; a < mesh.dim; ++a) {
      if (verts[a] < 0 || verts[a] >= nv)
        throw MeshError("validate_mesh: facet " + std::to_string(f) + " has out-of-range vertex");
      bool found = false;
      for (int b = 0; b < nvc; ++b) found = found || (cell[b] == verts[a]);
      if (!found)
        throw MeshError("validate_mesh: facet " + std::to_string(f) +
                        " is not a facet of its parent cell");
    }
  }
  SimplicialMesh rescanned = mesh;
  detail::scan_edge_extrema(rescanned);
  if (std::abs(rescanned.h_max - mesh.h_max) > 1e-12 * rescanned.h_max ||
      std::abs(rescanned.h_min - mesh.h_min) > 1e-12 * rescanned.h_min)
    throw MeshError("validate_mesh: stored edge-length extrema are stale");
}

}  // namespace maxp1
