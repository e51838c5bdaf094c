#pragma once

// Simplex quadrature. The vertex rule is the trapezoidal-type rule behind
// mass lumping; the degree-4 rule is reserved for error-norm integration so
// quadrature error cannot pollute observed convergence rates.

#include <array>
#include <stdexcept>
#include <vector>

#include "maxp1/mesh.hpp"

namespace maxp1 {

enum class QuadRuleKind { vertex, centroid, degree4 };

/// Rule in barycentric coordinates; weights sum to one and scale by cell
/// volume on application.
struct SimplexRule {
  int npoints = 0;
  std::array<std::array<double, 4>, 6> bary{};  // npoints x (dim+1)
  std::array<double, 6> weights{};
};

inline SimplexRule simplex_rule(QuadRuleKind kind, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("simplex_rule: dim must be 2 or 3");
  SimplexRule rule;
  switch (kind) {
    case QuadRuleKind::vertex: {
      rule.npoints = dim + 1;
      for (int i = 0; i <= dim; ++i) {
        rule.bary[i].fill(0.0);
        rule.bary[i][i] = 1.0;
        rule.weights[i] = 1.0 / (dim + 1);
      }
      return rule;
    }
    case QuadRuleKind::centroid: {
      rule.npoints = 1;
      rule.bary[0].fill(0.0);
      for (int i = 0; i <= dim; ++i) rule.bary[0][i] = 1.0 / (dim + 1);
      rule.weights[0] = 1.0;
      return rule;
    }
    case QuadRuleKind::degree4: {
      if (dim != 2)
        throw std::invalid_argument("simplex_rule: degree4 rule is only provided in 2D");
      // Dunavant 6-point rule, exact for total degree <= 4.
      constexpr double w1 = 0.223381589678011;
      constexpr double a1 = 0.445948490915965;
      constexpr double w2 = 0.109951743655322;
      constexpr double a2 = 0.091576213509771;
      rule.npoints = 6;
      const double groups[2][2] = {{w1, a1}, {w2, a2}};
      int p = 0;
      for (const auto& g : groups) {
        const double w = g[0], a = g[1];
        const double b = 1.0 - 2.0 * a;
        const double coords[3][3] = {{b, a, a}, {a, b, a}, {a, a, b}};
        for (const auto& c : coords) {
          rule.bary[p] = {c[0], c[1], c[2], 0.0};
          rule.weights[p] = w;
          ++p;
        }
      }
      return rule;
    }
  }
  throw std::invalid_argument("simplex_rule: unknown rule");
}

struct QuadPoint {
  Point x{0.0, 0.0, 0.0};
  double w = 0.0;
};

/// Physical quadrature points of one cell; weights sum to the cell volume.
inline std::vector<QuadPoint> quadrature(const SimplicialMesh& mesh, QuadRuleKind kind, int cell) {
  const SimplexRule rule = simplex_rule(kind, mesh.dim);
  const CellGeometry geo = cell_geometry(mesh, cell);
  const int* verts = mesh.cell(cell);
  std::vector<QuadPoint> points(rule.npoints);
  for (int q = 0; q < rule.npoints; ++q) {
    QuadPoint& pt = points[q];
    for (int a = 0; a <= mesh.dim; ++a) {
      const Point v = mesh.vertex(verts[a]);
      for (int c = 0; c < mesh.dim; ++c) pt.x[c] += rule.bary[q][a] * v[c];
    }
    pt.w = rule.weights[q] * geo.volume;
  }
  return points;
}

}  // namespace maxp1
