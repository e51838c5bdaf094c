#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "maxp1/quadrature.hpp"
#include "test_helpers.hpp"

using namespace maxp1;
using Catch::Approx;

namespace {

// Exact integral of x^p y^q over the reference triangle: p! q! / (p+q+2)!.
double reference_monomial_integral(int p, int q) {
  auto factorial = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return factorial(p) * factorial(q) / factorial(p + q + 2);
}

}  // namespace

TEST_CASE("weights sum to the cell volume for every rule", "[quadrature]") {
  const SimplicialMesh tri = testing::single_triangle({{{0.3, 0.1}, {1.4, 0.5}, {0.2, 1.9}}});
  const SimplicialMesh tet = testing::unit_tet();
  for (QuadRuleKind kind : {QuadRuleKind::vertex, QuadRuleKind::centroid, QuadRuleKind::degree4}) {
    double sum = 0.0;
    for (const QuadPoint& pt : quadrature(tri, kind, 0)) sum += pt.w;
    CHECK(sum == Approx(cell_geometry(tri, 0).volume));
  }
  for (QuadRuleKind kind : {QuadRuleKind::vertex, QuadRuleKind::centroid}) {
    double sum = 0.0;
    for (const QuadPoint& pt : quadrature(tet, kind, 0)) sum += pt.w;
    CHECK(sum == Approx(1.0 / 6.0));
  }
}

TEST_CASE("vertex rule places equal weights at the vertices", "[quadrature]") {
  const SimplicialMesh tet = testing::unit_tet();
  const auto points = quadrature(tet, QuadRuleKind::vertex, 0);
  REQUIRE(points.size() == 4);
  for (const QuadPoint& pt : points) CHECK(pt.w == Approx(1.0 / 24.0));
  // each point coincides with a vertex
  for (int a = 0; a < 4; ++a) {
    const Point v = tet.vertex(tet.cell(0)[a]);
    bool matched = false;
    for (const QuadPoint& pt : points)
      matched = matched || (std::abs(pt.x[0] - v[0]) + std::abs(pt.x[1] - v[1]) +
                                std::abs(pt.x[2] - v[2]) <
                            1e-14);
    CHECK(matched);
  }
}

TEST_CASE("centroid rule is exact for linears", "[quadrature]") {
  const SimplicialMesh tri = testing::single_triangle({{{0.2, 0.3}, {1.1, 0.4}, {0.5, 1.2}}});
  const CellGeometry geo = cell_geometry(tri, 0);
  const auto points = quadrature(tri, QuadRuleKind::centroid, 0);
  REQUIRE(points.size() == 1);
  double integral = 0.0;
  for (const QuadPoint& pt : points) integral += pt.w * pt.x[0];
  CHECK(integral == Approx(geo.volume * geo.centroid[0]));
}

TEST_CASE("degree-4 rule integrates all monomials of degree <= 4 exactly", "[quadrature]") {
  const SimplicialMesh tri = testing::reference_triangle();
  for (int p = 0; p <= 4; ++p) {
    for (int q = 0; p + q <= 4; ++q) {
      double integral = 0.0;
      for (const QuadPoint& pt : quadrature(tri, QuadRuleKind::degree4, 0))
        integral += pt.w * std::pow(pt.x[0], p) * std::pow(pt.x[1], q);
      INFO("monomial x^" << p << " y^" << q);
      CHECK(integral == Approx(reference_monomial_integral(p, q)).epsilon(1e-12));
    }
  }
  // the spec's spot value
  double xxyy = 0.0;
  for (const QuadPoint& pt : quadrature(tri, QuadRuleKind::degree4, 0))
    xxyy += pt.w * pt.x[0] * pt.x[0] * pt.x[1] * pt.x[1];
  CHECK(xxyy == Approx(1.0 / 180.0).epsilon(1e-12));
}

TEST_CASE("unsupported rules are rejected", "[quadrature]") {
  CHECK_THROWS_AS(simplex_rule(QuadRuleKind::degree4, 3), std::invalid_argument);
  CHECK_THROWS_AS(simplex_rule(QuadRuleKind::vertex, 4), std::invalid_argument);
}
