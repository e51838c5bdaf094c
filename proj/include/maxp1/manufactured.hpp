#pragma once

// Manufactured rotating-field solution on the unit disk used by the
// convergence studies:
//
//   e = (-x2, x1) v(r,t),   v(r,t) = exp(r - 2t) / eps(r),
//   eps(r) = 1 + (1 - 4r^2)^m for r < 1/2, and 1 otherwise  (m >= 2),
//
// together with the source f = eps e_tt - Lap e + grad(div e) and closed-form
// radial derivatives. The field satisfies the absorbing condition
// dn(e) + dt(e) = 0 on r = 1 and dt(e) = -2 e everywhere.

#include <cmath>
#include <stdexcept>

#include "maxp1/fields.hpp"
#include "maxp1/mesh.hpp"

namespace maxp1 {

struct EpsDerivatives {
  double eps;
  double deps;
  double ddeps;
};

/// eps(r), eps'(r), eps''(r); identically (1,0,0) for r > 1/2.
inline EpsDerivatives epsilon_derivatives(double r, int m) {
  if (r < 0.0) throw std::invalid_argument("epsilon_derivatives: r must be >= 0");
  if (r >= 0.5) return {1.0, 0.0, 0.0};
  const double q = 1.0 - 4.0 * r * r;
  const double qm2 = std::pow(q, m - 2);
  const double qm1 = qm2 * q;
  EpsDerivatives d;
  d.eps = 1.0 + qm1 * q;
  d.deps = -8.0 * m * r * qm1;
  // second derivative of 1 + (1-4r^2)^m; the factor is 8mr^2 - 4r^2 - 1
  d.ddeps = 8.0 * m * (8.0 * m * r * r - 4.0 * r * r - 1.0) * qm2;
  return d;
}

class ManufacturedCase {
 public:
  int m;
  double T;
  PermittivityField eps;

  explicit ManufacturedCase(int m_exponent, double final_time = 0.5)
      : m(m_exponent), T(final_time) {
    if (m < 2) throw std::invalid_argument("ManufacturedCase: m must be >= 2");
    const int mm = m;
    eps.value = [mm](const Point& x) {
      return epsilon_derivatives(std::hypot(x[0], x[1]), mm).eps;
    };
    eps.gradient = [mm](const Point& x) -> Point {
      const double r = std::hypot(x[0], x[1]);
      if (r == 0.0) return {0.0, 0.0, 0.0};
      const double deps = epsilon_derivatives(r, mm).deps;
      return {deps * x[0] / r, deps * x[1] / r, 0.0};
    };
    // one-sided sups of the closed forms over [0, 1/2]
    eps.sup_norm = 2.0;
    const int samples = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double r = 0.5 * i / samples;
      const double q = 1.0 - 4.0 * r * r;
      const double qm2 = std::pow(q, m - 2);
      s1 = std::max(s1, std::abs(-8.0 * m * r * qm2 * q));
      s2 = std::max(s2, std::abs(8.0 * m * (8.0 * m * r * r - 4.0 * r * r - 1.0) * qm2));
    }
    eps.seminorm_1 = s1;
    eps.seminorm_2 = s2;
  }

  /// v, v', v'' of the angular profile v(r,t) = exp(r-2t)/eps(r).
  struct Profile {
    double v;
    double dv;
    double ddv;
  };
  Profile profile(double r, double t) const {
    const EpsDerivatives d = epsilon_derivatives(r, m);
    const double E = std::exp(r - 2.0 * t);
    Profile p;
    p.v = E / d.eps;
    p.dv = E * (d.eps - d.deps) / (d.eps * d.eps);
    p.ddv = E * (d.eps * d.eps - 2.0 * d.eps * d.deps - d.eps * d.ddeps + 2.0 * d.deps * d.deps) /
            (d.eps * d.eps * d.eps);
    return p;
  }

  Point exact(const Point& x, double t) const {
    const double r = std::hypot(x[0], x[1]);
    const double v = profile(r, t).v;
    return {-x[1] * v, x[0] * v, 0.0};
  }

  Point exact_time_derivative(const Point& x, double t) const {
    Point e = exact(x, t);
    return {-2.0 * e[0], -2.0 * e[1], 0.0};
  }

  /// grad[c][j] = d e_c / d x_j.
  std::array<Point, 3> exact_gradient(const Point& x, double t) const {
    const double r = std::hypot(x[0], x[1]);
    const Profile p = profile(r, t);
    std::array<Point, 3> grad{};
    if (r == 0.0) {
      grad[0] = {0.0, -p.v, 0.0};
      grad[1] = {p.v, 0.0, 0.0};
      return grad;
    }
    const double rx = x[0] / r, ry = x[1] / r;
    grad[0] = {-x[1] * p.dv * rx, -p.v - x[1] * p.dv * ry, 0.0};
    grad[1] = {p.v + x[0] * p.dv * rx, x[0] * p.dv * ry, 0.0};
    return grad;
  }

  Point initial_value(const Point& x) const { return exact(x, 0.0); }
  Point initial_velocity(const Point& x) const { return exact_time_derivative(x, 0.0); }

  /// f = eps e_tt - Lap e + grad(div e); the origin takes the odd-symmetry
  /// limit value (0,0).
  Point source(const Point& x, double t) const {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const Profile p = profile(r, t);
    const double E = std::exp(r - 2.0 * t);
    const double lap1 = -3.0 * x[1] / r * p.dv - x[1] * p.ddv;
    const double lap2 = 3.0 * x[0] / r * p.dv + x[0] * p.ddv;
    return {-4.0 * x[1] * E - lap1, 4.0 * x[0] * E - lap2, 0.0};
  }
};

inline ManufacturedCase manufactured_case(int m, double T = 0.5) {
  return ManufacturedCase(m, T);
}

}  // namespace maxp1
