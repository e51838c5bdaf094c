#pragma once

// Assembly of the bilinear forms of the explicit scheme. Vector DOFs are
// ordered vertex-major, component-minor (u1x, u1y, u2x, ...), so the lumped
// mass solve is a strided diagonal scale.
//
// Quadrature choices:
//  * stiffness and div-div integrands are cellwise constant for P1 and are
//    integrated exactly;
//  * the weighted divergence form (div(eps u), div v) expands into
//    (eps div u, div v) + (grad(eps).u, div v): the first part samples eps at
//    the cell centroid (exact once eps is replaced by eps_h), the second is
//    integrated by the vertex rule with grad(eps) evaluated at vertices;
//  * interior and boundary mass use the vertex rule, which makes them
//    diagonal.

#include <vector>

#include "maxp1/fields.hpp"
#include "maxp1/mesh.hpp"
#include "maxp1/sparse.hpp"

namespace maxp1 {

inline int dof_index(int vertex, int comp, int dim) { return vertex * dim + comp; }

/// (grad u, grad v): block-diagonal over components, identical scalar
/// stiffness block per component.
inline SparseMatrix assemble_stiffness(const SimplicialMesh& mesh) {
  const int d = mesh.dim;
  const int n = mesh.num_vertices() * d;
  std::vector<Triplet> coo;
  coo.reserve(static_cast<std::size_t>(mesh.num_cells()) * (d + 1) * (d + 1) * d);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b) {
        double dot = 0.0;
        for (int j = 0; j < d; ++j) dot += geo.p1_gradients[a][j] * geo.p1_gradients[b][j];
        const double value = geo.volume * dot;
        for (int c = 0; c < d; ++c)
          coo.push_back({dof_index(cell[a], c, d), dof_index(cell[b], c, d), value});
      }
  }
  return SparseMatrix::from_coo(n, n, std::move(coo));
}

/// (div u, div v): rank-one per cell, couples components.
inline SparseMatrix assemble_div_div(const SimplicialMesh& mesh) {
  const int d = mesh.dim;
  const int n = mesh.num_vertices() * d;
  std::vector<Triplet> coo;
  coo.reserve(static_cast<std::size_t>(mesh.num_cells()) * (d + 1) * (d + 1) * d * d);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c) {
        const double row_div = geo.p1_gradients[a][c];
        for (int b = 0; b <= d; ++b)
          for (int e = 0; e < d; ++e)
            coo.push_back({dof_index(cell[a], c, d), dof_index(cell[b], e, d),
                           geo.volume * row_div * geo.p1_gradients[b][e]});
      }
  }
  return SparseMatrix::from_coo(n, n, std::move(coo));
}

/// (div(eps u), div v) = (eps div u, div v) + (grad(eps).u, div v).
inline SparseMatrix assemble_weighted_div(const SimplicialMesh& mesh,
                                          const PermittivityField& eps) {
  const int d = mesh.dim;
  const int n = mesh.num_vertices() * d;
  std::vector<Triplet> coo;
  coo.reserve(static_cast<std::size_t>(mesh.num_cells()) * (d + 1) * (d + 1) * d * d);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    const double eps_c = eps.value(geo.centroid);
    Point grad_eps[4];
    for (int b = 0; b <= d; ++b) grad_eps[b] = eps.gradient(mesh.vertex(cell[b]));
    const double lump = geo.volume / (d + 1);
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c) {
        const double row_div = geo.p1_gradients[a][c];
        for (int b = 0; b <= d; ++b)
          for (int e = 0; e < d; ++e) {
            const double centroid_part = eps_c * geo.volume * geo.p1_gradients[b][e];
            const double vertex_part = lump * grad_eps[b][e];
            coo.push_back({dof_index(cell[a], c, d), dof_index(cell[b], e, d),
                           row_div * (centroid_part + vertex_part)});
          }
      }
  }
  return SparseMatrix::from_coo(n, n, std::move(coo));
}

/// Vertex-rule mass with eps sampled at centroids: diagonal, entry at vertex i
/// (each component) is sum_{K ∋ i} eps(G_K) volume(K)/(d+1).
inline DiagonalMatrix assemble_lumped_mass(const SimplicialMesh& mesh,
                                           const PermittivityField& eps) {
  const int d = mesh.dim;
  DiagonalMatrix M;
  M.diag.assign(static_cast<std::size_t>(mesh.num_vertices()) * d, 0.0);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    const double contrib = eps.value(geo.centroid) * geo.volume / (d + 1);
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c) M.diag[dof_index(cell[a], c, d)] += contrib;
  }
  return M;
}

/// Vertex-rule boundary mass: measure(F)/(#facet vertices) per incident facet,
/// zero at interior vertices.
inline DiagonalMatrix assemble_boundary_lumped_mass(const SimplicialMesh& mesh) {
  const int d = mesh.dim;
  DiagonalMatrix B;
  B.diag.assign(static_cast<std::size_t>(mesh.num_vertices()) * d, 0.0);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const double contrib = facet_measure(mesh, f) / d;
    const int* verts = mesh.facet(f);
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) B.diag[dof_index(verts[a], c, d)] += contrib;
  }
  return B;
}

}  // namespace maxp1
