#pragma once

// Scalar coefficient fields, P1 nodal vector fields and the discrete norms of
// the lumped scheme. Fields are immutable after construction and safe for
// concurrent reads provided user-supplied callables are pure.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxp1/mesh.hpp"

namespace maxp1 {

/// Relative permittivity with analytic gradient and the norm constants the
/// stability theory consumes. Callers supply closed forms; assembly never
/// differentiates numerically.
struct PermittivityField {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  double sup_norm = 1.0;    // ||eps||_{0,inf}
  double seminorm_1 = 0.0;  // |eps|_{1,inf}
  double seminorm_2 = 0.0;  // |eps|_{2,inf}
};

inline PermittivityField constant_permittivity(double c) {
  PermittivityField eps;
  eps.value = [c](const Point&) { return c; };
  eps.gradient = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  eps.sup_norm = c;
  return eps;
}

inline PermittivityField unit_permittivity() { return constant_permittivity(1.0); }

/// dim components per mesh vertex, vertex-major/component-minor, matching the
/// DOF ordering of the assembled operators.
struct NodalVectorField {
  const SimplicialMesh* mesh = nullptr;
  std::vector<double> values;

  NodalVectorField() = default;
  explicit NodalVectorField(const SimplicialMesh& m)
      : mesh(&m), values(static_cast<std::size_t>(m.num_vertices()) * m.dim, 0.0) {}

  int dim() const { return mesh->dim; }
  double& operator()(int vertex, int comp) {
    return values[static_cast<std::size_t>(vertex) * mesh->dim + comp];
  }
  double operator()(int vertex, int comp) const {
    return values[static_cast<std::size_t>(vertex) * mesh->dim + comp];
  }
  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Vertex interpolant: values[i] = f(vertex_i).
template <class F>
NodalVectorField interpolate(const F& f, const SimplicialMesh& mesh) {
  NodalVectorField field(mesh);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Point value = f(mesh.vertex(i));
    for (int c = 0; c < mesh.dim; ++c) {
      if (!std::isfinite(value[c]))
        throw std::runtime_error("interpolate: non-finite value at vertex " + std::to_string(i));
      field(i, c) = value[c];
    }
  }
  return field;
}

/// The piecewise-constant surrogate eps_h: eps evaluated at cell centroids.
inline std::vector<double> centroid_epsilon(const SimplicialMesh& mesh,
                                            const PermittivityField& eps) {
  std::vector<double> values(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k)
    values[k] = eps.value(cell_geometry(mesh, k).centroid);
  return values;
}

// ---------------------------------------------------------------------------
// Discrete norms. All are sums of per-cell (per-facet) quadratic forms of the
// vertex values; no global matrices are involved.

/// ||v||_{eps_h,h}: vertex-rule (lumped) eps_h-weighted L2 norm.
inline double norm_lumped(const NodalVectorField& v, const std::vector<double>& eps_h) {
  const SimplicialMesh& mesh = *v.mesh;
  const int d = mesh.dim;
  double sum = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    double local = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c) local += v(cell[a], c) * v(cell[a], c);
    sum += eps_h[k] * geo.volume / (d + 1) * local;
  }
  return std::sqrt(sum);
}

/// ||v||_{eps_h}: consistent eps_h-weighted L2 norm of the P1 field, via the
/// exact local mass matrix volume*(1+delta_ij)/((d+1)(d+2)).
inline double norm_consistent(const NodalVectorField& v, const std::vector<double>& eps_h) {
  const SimplicialMesh& mesh = *v.mesh;
  const int d = mesh.dim;
  const double scale = 1.0 / ((d + 1) * (d + 2));
  double sum = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    double local = 0.0;
    for (int c = 0; c < d; ++c) {
      double diag = 0.0, all = 0.0;
      for (int a = 0; a <= d; ++a) {
        const double val = v(cell[a], c);
        diag += val * val;
        all += val;
      }
      // sum_{a,b} (1+delta_ab) v_a v_b = (sum v)^2 + sum v^2
      local += all * all + diag;
    }
    sum += eps_h[k] * geo.volume * scale * local;
  }
  return std::sqrt(sum);
}

/// (u,v)_{eps_h,h}: vertex-rule inner product.
inline double inner_lumped(const NodalVectorField& u, const NodalVectorField& v,
                           const std::vector<double>& eps_h) {
  const SimplicialMesh& mesh = *u.mesh;
  const int d = mesh.dim;
  double sum = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    double local = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c) local += u(cell[a], c) * v(cell[a], c);
    sum += eps_h[k] * geo.volume / (d + 1) * local;
  }
  return sum;
}

/// (u,v)_{eps_h}: exact integral of the P1 product.
inline double inner_consistent(const NodalVectorField& u, const NodalVectorField& v,
                               const std::vector<double>& eps_h) {
  const SimplicialMesh& mesh = *u.mesh;
  const int d = mesh.dim;
  const double scale = 1.0 / ((d + 1) * (d + 2));
  double sum = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    double local = 0.0;
    for (int c = 0; c < d; ++c) {
      double dot = 0.0, su = 0.0, sv = 0.0;
      for (int a = 0; a <= d; ++a) {
        dot += u(cell[a], c) * v(cell[a], c);
        su += u(cell[a], c);
        sv += v(cell[a], c);
      }
      local += su * sv + dot;
    }
    sum += eps_h[k] * geo.volume * scale * local;
  }
  return sum;
}

/// ||v||_{dOmega,h}: lumped boundary norm over the boundary facets.
inline double norm_boundary_lumped(const NodalVectorField& v) {
  const SimplicialMesh& mesh = *v.mesh;
  const int d = mesh.dim;
  double sum = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const double measure = facet_measure(mesh, f);
    const int* verts = mesh.facet(f);
    double local = 0.0;
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) local += v(verts[a], c) * v(verts[a], c);
    sum += measure / d * local;
  }
  return std::sqrt(sum);
}

/// ||v||_{dOmega}: consistent boundary L2 norm (facets are (d-1)-simplices).
inline double norm_boundary_consistent(const NodalVectorField& v) {
  const SimplicialMesh& mesh = *v.mesh;
  const int d = mesh.dim;
  const double scale = 1.0 / (d * (d + 1));
  double sum = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const double measure = facet_measure(mesh, f);
    const int* verts = mesh.facet(f);
    double local = 0.0;
    for (int c = 0; c < d; ++c) {
      double diag = 0.0, all = 0.0;
      for (int a = 0; a < d; ++a) {
        const double val = v(verts[a], c);
        diag += val * val;
        all += val;
      }
      local += all * all + diag;
    }
    sum += measure * scale * local;
  }
  return std::sqrt(sum);
}

/// ||grad v||: broken H1 seminorm of the P1 field (Frobenius over components).
inline double seminorm_gradient(const NodalVectorField& v) {
  const SimplicialMesh& mesh = *v.mesh;
  const int d = mesh.dim;
  double sum = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    for (int c = 0; c < d; ++c) {
      double g[3] = {0.0, 0.0, 0.0};
      for (int a = 0; a <= d; ++a)
        for (int j = 0; j < d; ++j) g[j] += v(cell[a], c) * geo.p1_gradients[a][j];
      for (int j = 0; j < d; ++j) sum += geo.volume * g[j] * g[j];
    }
  }
  return std::sqrt(sum);
}

/// ||div v||_w with a per-cell weight (pass 1s for the plain divergence norm).
inline double seminorm_divergence(const NodalVectorField& v, const std::vector<double>& weight) {
  const SimplicialMesh& mesh = *v.mesh;
  const int d = mesh.dim;
  double sum = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    double div = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c) div += v(cell[a], c) * geo.p1_gradients[a][c];
    sum += weight[k] * geo.volume * div * div;
  }
  return std::sqrt(sum);
}

}  // namespace maxp1
