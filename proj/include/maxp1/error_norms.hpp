#pragma once

// Relative error norms of a computed trajectory against the manufactured
// solution, in the senses
//
//   e1: max_k ||e^k - e_h^k||_{L2(Omega_h)}            / max_k ||e^k||,
//   e2: max_k ||grad(e^k - e_h^k)||                    / max_k ||grad e^k||,
//   e3: max_k ||dt(e - e_h)^{k+1/2}||                  / max_k ||dt e^{k+1/2}||,
//
// with the broken time derivative (e^{k+1}-e^k)/tau compared against dt(e) at
// the interval midpoint. Integrals use the degree-4 rule with the exact
// solution evaluated analytically at quadrature points, never interpolated.
//
// The manufactured field factorizes as e(x,t) = e(x,0) exp(-2t), which the
// accumulator exploits: per-point values and gradients are cached at t=0 and
// rescaled per step.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "maxp1/manufactured.hpp"
#include "maxp1/mesh.hpp"
#include "maxp1/quadrature.hpp"
#include "maxp1/solver.hpp"

namespace maxp1 {

struct ErrorNorms {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

/// Per-step instantaneous relative errors, for energy logs.
struct InstantErrors {
  int k = 0;
  double t = 0.0;
  double err_fun = 0.0;
  double err_grad = 0.0;
  double err_dt = 0.0;  // trailing half-step (k-1/2)
};

class ErrorAccumulator {
 public:
  ErrorAccumulator(const SimplicialMesh& mesh, const ManufacturedCase& mc)
      : mesh_(&mesh), tau_pending_(true) {
    const SimplexRule rule = simplex_rule(QuadRuleKind::degree4, mesh.dim);
    const int nc = mesh.num_cells();
    cells_.resize(nc);
    for (int k = 0; k < nc; ++k) {
      CellData& cd = cells_[k];
      const CellGeometry geo = cell_geometry(mesh, k);
      const int* cell = mesh.cell(k);
      for (int a = 0; a < 3; ++a) {
        cd.verts[a] = cell[a];
        cd.grads[a] = {geo.p1_gradients[a][0], geo.p1_gradients[a][1]};
      }
      for (int q = 0; q < rule.npoints; ++q) {
        PointData& pd = cd.points[q];
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 2; ++c) x[c] += rule.bary[q][a] * mesh.vertex(cell[a])[c];
        pd.weight = rule.weights[q] * geo.volume;
        for (int a = 0; a < 3; ++a) pd.bary[a] = rule.bary[q][a];
        const Point e0 = mc.exact(x, 0.0);
        pd.e0 = {e0[0], e0[1]};
        const auto g0 = mc.exact_gradient(x, 0.0);
        pd.g0 = {g0[0][0], g0[0][1], g0[1][0], g0[1][1]};
        den_fun0_ += pd.weight * (e0[0] * e0[0] + e0[1] * e0[1]);
        for (double g : pd.g0) den_grad0_ += pd.weight * g * g;
      }
    }
  }

  /// Feed the initial state (k=1) and every stepped state, in order.
  void observe(const SimulationState& state) {
    if (state.e_curr.mesh != mesh_)
      throw std::invalid_argument("ErrorAccumulator: state uses a different mesh");
    if (tau_pending_) {
      tau_ = state.tau;
      tau_pending_ = false;
    }
    const int k = state.k;
    const double t = k * tau_;
    const double scale = std::exp(-2.0 * t);
    const double scale_half = std::exp(-2.0 * (t - 0.5 * tau_));

    double num_fun = 0.0, num_grad = 0.0, num_dt = 0.0;
    const std::vector<double>& curr = state.e_curr.values;
    const std::vector<double>& prev = state.e_prev.values;
    for (const CellData& cd : cells_) {
      const double* v0 = &curr[2 * static_cast<std::size_t>(cd.verts[0])];
      const double* v1 = &curr[2 * static_cast<std::size_t>(cd.verts[1])];
      const double* v2 = &curr[2 * static_cast<std::size_t>(cd.verts[2])];
      const double* p0 = &prev[2 * static_cast<std::size_t>(cd.verts[0])];
      const double* p1 = &prev[2 * static_cast<std::size_t>(cd.verts[1])];
      const double* p2 = &prev[2 * static_cast<std::size_t>(cd.verts[2])];
      // cellwise-constant gradient of e_h
      double gh[4] = {0.0, 0.0, 0.0, 0.0};
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < 2; ++j)
          gh[2 * c + j] = v0[c] * cd.grads[0][j] + v1[c] * cd.grads[1][j] + v2[c] * cd.grads[2][j];
      for (const PointData& pd : cd.points) {
        const double w = pd.weight;
        for (int c = 0; c < 2; ++c) {
          const double eh = pd.bary[0] * v0[c] + pd.bary[1] * v1[c] + pd.bary[2] * v2[c];
          const double diff = pd.e0[c] * scale - eh;
          num_fun += w * diff * diff;
          const double eh_prev = pd.bary[0] * p0[c] + pd.bary[1] * p1[c] + pd.bary[2] * p2[c];
          const double dt_h = (eh - eh_prev) / tau_;
          const double dt_diff = -2.0 * pd.e0[c] * scale_half - dt_h;
          num_dt += w * dt_diff * dt_diff;
        }
        for (int j = 0; j < 4; ++j) {
          const double gdiff = pd.g0[j] * scale - gh[j];
          num_grad += w * gdiff * gdiff;
        }
      }
    }
    const double den_fun = den_fun0_ * scale * scale;
    const double den_grad = den_grad0_ * scale * scale;
    const double den_dt = 4.0 * den_fun0_ * scale_half * scale_half;

    max_num_fun_ = std::max(max_num_fun_, num_fun);
    max_den_fun_ = std::max(max_den_fun_, den_fun);
    max_num_grad_ = std::max(max_num_grad_, num_grad);
    max_den_grad_ = std::max(max_den_grad_, den_grad);
    if (k >= 2) {  // half indices 1+1/2 ... (N-1)+1/2
      max_num_dt_ = std::max(max_num_dt_, num_dt);
      max_den_dt_ = std::max(max_den_dt_, den_dt);
      ++dt_samples_;
    }
    ++samples_;

    InstantErrors inst;
    inst.k = k;
    inst.t = t;
    inst.err_fun = std::sqrt(num_fun / den_fun);
    inst.err_grad = std::sqrt(num_grad / den_grad);
    inst.err_dt = std::sqrt(num_dt / den_dt);
    history_.push_back(inst);
  }

  const std::vector<InstantErrors>& history() const { return history_; }

  ErrorNorms result() const {
    if (samples_ == 0) throw std::runtime_error("ErrorAccumulator: empty trajectory");
    ErrorNorms norms;
    norms.e1 = std::sqrt(max_num_fun_ / max_den_fun_);
    norms.e2 = std::sqrt(max_num_grad_ / max_den_grad_);
    norms.e3 = dt_samples_ > 0 ? std::sqrt(max_num_dt_ / max_den_dt_) : 0.0;
    return norms;
  }

 private:
  struct PointData {
    double bary[3];
    double weight;
    std::array<double, 2> e0;
    std::array<double, 4> g0;  // row-major 2x2
  };
  struct CellData {
    int verts[3];
    std::array<double, 2> grads[3];
    PointData points[6];
  };

  const SimplicialMesh* mesh_;
  std::vector<CellData> cells_;
  double den_fun0_ = 0.0;
  double den_grad0_ = 0.0;
  double tau_ = 0.0;
  bool tau_pending_;
  long samples_ = 0;
  long dt_samples_ = 0;
  double max_num_fun_ = 0.0, max_den_fun_ = 0.0;
  double max_num_grad_ = 0.0, max_den_grad_ = 0.0;
  double max_num_dt_ = 0.0, max_den_dt_ = 0.0;
  std::vector<InstantErrors> history_;
};

}  // namespace maxp1
