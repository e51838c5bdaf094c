#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "maxp1/manufactured.hpp"

using namespace maxp1;
using Catch::Approx;

namespace {

// 4th-order central differences
template <class F>
double fd1(const F& g, double s) {
  return (g(-2.0 * s) - 8.0 * g(-s) + 8.0 * g(s) - g(2.0 * s)) / (12.0 * s);
}
template <class F>
double fd2(const F& g, double s) {
  return (-g(-2.0 * s) + 16.0 * g(-s) - 30.0 * g(0.0) + 16.0 * g(s) - g(2.0 * s)) /
         (12.0 * s * s);
}

}  // namespace

TEST_CASE("epsilon derivatives honor the closed forms", "[manufactured]") {
  SECTION("values at the origin") {
    for (int m : {2, 3, 4, 5}) {
      const EpsDerivatives d = epsilon_derivatives(0.0, m);
      CHECK(d.eps == Approx(2.0));
      CHECK(d.deps == Approx(0.0).margin(1e-15));
      CHECK(d.ddeps == Approx(-8.0 * m));
    }
  }
  SECTION("Heaviside cutoff") {
    const EpsDerivatives d = epsilon_derivatives(0.6, 3);
    CHECK(d.eps == 1.0);
    CHECK(d.deps == 0.0);
    CHECK(d.ddeps == 0.0);
  }
  SECTION("spot value and finite-difference cross-check at r=0.25, m=2") {
    const EpsDerivatives d = epsilon_derivatives(0.25, 2);
    CHECK(d.eps == Approx(1.5625));
    const double h = 1e-5;
    auto eps_at = [](double r) { return epsilon_derivatives(r, 2).eps; };
    const double fd_first = (eps_at(0.25 + h) - eps_at(0.25 - h)) / (2.0 * h);
    const double fd_second = (eps_at(0.25 + h) - 2.0 * eps_at(0.25) + eps_at(0.25 - h)) / (h * h);
    CHECK(d.deps == Approx(fd_first).margin(1e-6));
    CHECK(d.ddeps == Approx(fd_second).margin(1e-4));
  }
  CHECK_THROWS_AS(epsilon_derivatives(-0.1, 2), std::invalid_argument);
}

TEST_CASE("exact solution values and symmetries", "[manufactured]") {
  const ManufacturedCase mc(2);
  SECTION("the rotational factor vanishes at the origin") {
    for (double t : {0.0, 0.2, 0.5}) {
      const Point e = mc.exact({0.0, 0.0, 0.0}, t);
      CHECK(e[0] == 0.0);
      CHECK(e[1] == 0.0);
    }
  }
  SECTION("boundary spot value (1,0) at t=0") {
    const Point e = mc.exact({1.0, 0.0, 0.0}, 0.0);
    CHECK(e[0] == Approx(0.0).margin(1e-15));
    CHECK(e[1] == Approx(2.718281828459045).epsilon(1e-12));
  }
  SECTION("time derivative is -2 times the field") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> coord(-0.7, 0.7);
    std::uniform_real_distribution<double> time(0.0, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
      const Point x{coord(rng), coord(rng), 0.0};
      const double t = time(rng);
      const Point e = mc.exact(x, t);
      const Point dt = mc.exact_time_derivative(x, t);
      CHECK(dt[0] == Approx(-2.0 * e[0]).margin(1e-15));
      CHECK(dt[1] == Approx(-2.0 * e[1]).margin(1e-15));
    }
  }
  SECTION("initial velocity is -2 times the initial value") {
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> coord(-0.7, 0.7);
    for (int trial = 0; trial < 50; ++trial) {
      const Point x{coord(rng), coord(rng), 0.0};
      const Point e0 = mc.initial_value(x);
      const Point e1 = mc.initial_velocity(x);
      CHECK(e1[0] == Approx(-2.0 * e0[0]).margin(1e-15));
      CHECK(e1[1] == Approx(-2.0 * e0[1]).margin(1e-15));
    }
  }
}

TEST_CASE("exact gradient matches finite differences", "[manufactured]") {
  const ManufacturedCase mc(3);
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> coord(-0.65, 0.65);
  std::uniform_real_distribution<double> time(0.0, 0.5);
  const double s = 1e-4;
  int tested = 0;
  while (tested < 60) {
    const Point x{coord(rng), coord(rng), 0.0};
    const double r = std::hypot(x[0], x[1]);
    if (r < 0.03 || std::abs(r - 0.5) < 0.02) continue;
    const double t = time(rng);
    const auto grad = mc.exact_gradient(x, t);
    for (int c = 0; c < 2; ++c) {
      const double gx =
          fd1([&](double d) { return mc.exact({x[0] + d, x[1], 0.0}, t)[c]; }, s);
      const double gy =
          fd1([&](double d) { return mc.exact({x[0], x[1] + d, 0.0}, t)[c]; }, s);
      CHECK(grad[c][0] == Approx(gx).margin(1e-7));
      CHECK(grad[c][1] == Approx(gy).margin(1e-7));
    }
    ++tested;
  }
}

TEST_CASE("absorbing condition holds on the unit circle", "[manufactured]") {
  const ManufacturedCase mc(4);
  const double s = 1e-5;
  for (int i = 0; i < 24; ++i) {
    const double phi = 2.0 * M_PI * i / 24.0;
    const Point n{std::cos(phi), std::sin(phi), 0.0};
    for (double t : {0.1, 0.3}) {
      for (int c = 0; c < 2; ++c) {
        // radial (= outer normal) derivative via finite differences along n
        const double dn = fd1(
            [&](double d) {
              return mc.exact({(1.0 + d) * n[0], (1.0 + d) * n[1], 0.0}, t)[c];
            },
            s);
        const double dt = mc.exact_time_derivative({n[0], n[1], 0.0}, t)[c];
        CHECK(dn + dt == Approx(0.0).margin(1e-8));
      }
    }
  }
}

TEST_CASE("source vanishes at the origin by odd symmetry", "[manufactured]") {
  for (int m : {2, 5}) {
    const ManufacturedCase mc(m);
    const Point f = mc.source({0.0, 0.0, 0.0}, 0.3);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
  }
}

TEST_CASE("source satisfies the defining residual identity", "[manufactured][properties]") {
  // eps e_tt - Lap e + grad(div e) - f = 0, equivalently
  //   eps e_tt + curl curl e - f = 0, with all derivatives of e by
  //   finite differences.
  std::mt19937 rng(67);
  std::uniform_real_distribution<double> coord(-0.95, 0.95);
  std::uniform_real_distribution<double> time(0.05, 0.45);
  std::uniform_int_distribution<int> pick_m(2, 5);
  const double s = 1e-3;
  int tested = 0;
  while (tested < 200) {
    const Point x{coord(rng), coord(rng), 0.0};
    const double r = std::hypot(x[0], x[1]);
    if (r < 0.08 || r > 0.92 || std::abs(r - 0.5) < 0.05) continue;
    const double t = time(rng);
    const ManufacturedCase mc(pick_m(rng));

    const double eps = mc.eps.value(x);
    const Point f = mc.source(x, t);
    auto e_at = [&](double dx, double dy, double dt, int c) {
      return mc.exact({x[0] + dx, x[1] + dy, 0.0}, t + dt)[c];
    };
    for (int c = 0; c < 2; ++c) {
      const double e_tt = fd2([&](double d) { return e_at(0.0, 0.0, d, c); }, s);
      double curl_curl;
      if (c == 0) {
        // (curl curl e)_1 = d_xy e_2 - d_yy e_1
        const double dyy = fd2([&](double d) { return e_at(0.0, d, 0.0, 0); }, s);
        const double dxy = fd1(
            [&](double dx) {
              return fd1([&](double dy) { return e_at(dx, dy, 0.0, 1); }, s);
            },
            s);
        curl_curl = dxy - dyy;
      } else {
        // (curl curl e)_2 = d_xy e_1 - d_xx e_2
        const double dxx = fd2([&](double d) { return e_at(d, 0.0, 0.0, 1); }, s);
        const double dxy = fd1(
            [&](double dx) {
              return fd1([&](double dy) { return e_at(dx, dy, 0.0, 0); }, s);
            },
            s);
        curl_curl = dxy - dxx;
      }
      const double residual = eps * e_tt + curl_curl - f[c];
      const double scale = std::max(1.0, std::abs(f[c]));
      INFO("m=" << mc.m << " x=(" << x[0] << "," << x[1] << ") t=" << t << " c=" << c);
      CHECK(std::abs(residual) / scale < 1e-4);
    }
    ++tested;
  }
}

TEST_CASE("source simplifies symbolically on the eps == 1 branch", "[manufactured]") {
  // For r > 1/2: v = v' = v'' = exp(r-2t), so
  //   f1 = (-4 x2 + 3 x2/r + x2) exp(r-2t),  f2 = (4 x1 - 3 x1/r - x1) exp(r-2t).
  const ManufacturedCase mc(3);
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> coord(-0.95, 0.95);
  int tested = 0;
  while (tested < 40) {
    const Point x{coord(rng), coord(rng), 0.0};
    const double r = std::hypot(x[0], x[1]);
    if (r <= 0.55 || r > 0.95) continue;
    const double t = 0.2;
    const double E = std::exp(r - 2.0 * t);
    const Point f = mc.source(x, t);
    CHECK(f[0] == Approx((-4.0 * x[1] + 3.0 * x[1] / r + x[1]) * E).epsilon(1e-12));
    CHECK(f[1] == Approx((4.0 * x[0] - 3.0 * x[0] / r - x[0]) * E).epsilon(1e-12));
    ++tested;
  }
}
