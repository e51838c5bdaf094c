#pragma once

// Explicit leapfrog time stepping of the lumped P1 scheme
//
//   M (e^{k+1} - 2e^k + e^{k-1})/tau^2 + B (e^{k+1} - e^{k-1})/(2 tau)
//     + A e^k = F^k,
//
// with M the lumped eps-weighted mass, B the lumped boundary mass (absorbing
// boundary), A = stiffness + weighted_div - div_div, and F^k the vertex-rule
// lumped load. One step costs one sparse product with A plus diagonal work;
// no linear solves.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxp1/assembly.hpp"
#include "maxp1/fields.hpp"
#include "maxp1/mesh.hpp"
#include "maxp1/sparse.hpp"

namespace maxp1 {

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_ = 0;
};

/// Constants of the discrete energy bound:
///   eta = 2 + |eps|_{1,inf} + 2|eps|_{2,inf},  theta = |eps|_{1,inf},
///   rho = T^2 |eps|_{2,inf},  beta = 4T{2 + |eps|_{1,inf} + (2+T^2)|eps|_{2,inf}},
///   nu = C (1 + 3 ||eps-1||_inf)^{1/2}.
struct StabilityConstants {
  double eta = 0.0;
  double theta = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double nu = 0.0;
  double tau_cap = 0.0;  // 1/(2 eta)
};

inline StabilityConstants stability_constants(const PermittivityField& eps, double T,
                                              double inverse_constant = 1.0) {
  if (!(T > 0.0)) throw std::invalid_argument("stability_constants: T must be positive");
  StabilityConstants s;
  s.eta = 2.0 + eps.seminorm_1 + 2.0 * eps.seminorm_2;
  s.theta = eps.seminorm_1;
  s.rho = T * T * eps.seminorm_2;
  s.beta = 4.0 * T * (2.0 + eps.seminorm_1 + (2.0 + T * T) * eps.seminorm_2);
  s.nu = inverse_constant * std::sqrt(1.0 + 3.0 * (eps.sup_norm - 1.0));
  s.tau_cap = 1.0 / (2.0 * s.eta);
  return s;
}

/// One sample of the cellwise vertex-rule load: weight volume/(d+1) at a
/// vertex, with the evaluation point nudged toward the cell centroid so that
/// sources with mesh-resolved jumps are sampled from the correct side.
struct LoadSample {
  int vertex;
  Point x;
  double w;
};

struct SchemeOperators {
  DiagonalMatrix M;  // lumped eps-weighted mass
  DiagonalMatrix B;  // lumped boundary mass
  SparseMatrix A;    // stiffness + weighted_div - div_div
  std::vector<LoadSample> load_rule;
};

inline std::vector<LoadSample> build_load_rule(const SimplicialMesh& mesh) {
  const int d = mesh.dim;
  std::vector<LoadSample> rule;
  rule.reserve(static_cast<std::size_t>(mesh.num_cells()) * (d + 1));
  constexpr double nudge = 1e-9;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const CellGeometry geo = cell_geometry(mesh, k);
    const int* cell = mesh.cell(k);
    for (int a = 0; a <= d; ++a) {
      LoadSample sample;
      sample.vertex = cell[a];
      sample.x = mesh.vertex(cell[a]);
      for (int c = 0; c < d; ++c) sample.x[c] += nudge * (geo.centroid[c] - sample.x[c]);
      sample.w = geo.volume / (d + 1);
      rule.push_back(sample);
    }
  }
  return rule;
}

inline SchemeOperators assemble_scheme(const SimplicialMesh& mesh, const PermittivityField& eps) {
  SchemeOperators ops;
  ops.M = assemble_lumped_mass(mesh, eps);
  ops.B = assemble_boundary_lumped_mass(mesh);
  ops.load_rule = build_load_rule(mesh);
  const SparseMatrix stiffness = assemble_stiffness(mesh);
  const SparseMatrix weighted = assemble_weighted_div(mesh, eps);
  const SparseMatrix div_div = assemble_div_div(mesh);
  std::vector<Triplet> coo;
  coo.reserve(static_cast<std::size_t>(stiffness.nnz() + weighted.nnz() + div_div.nnz()));
  auto append = [&coo](const SparseMatrix& S, double scale) {
    for (int r = 0; r < S.rows(); ++r)
      for (int i = S.row_offsets()[r]; i < S.row_offsets()[r + 1]; ++i)
        coo.push_back({r, S.col_indices()[i], scale * S.values()[i]});
  };
  append(stiffness, 1.0);
  append(weighted, 1.0);
  append(div_div, -1.0);
  ops.A = SparseMatrix::from_coo(stiffness.rows(), stiffness.cols(), std::move(coo));
  return ops;
}

class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

/// Dominant generalized eigenvalue of A x = lambda M x (M diagonal positive),
/// by power iteration with a fixed-seed start vector.
inline double power_iteration_lambda_max(const SparseMatrix& A, const DiagonalMatrix& M,
                                         double rel_tol = 1e-6, int max_iter = 50000) {
  const int n = A.rows();
  std::mt19937 rng(0x5eedu);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> x(n), y(n);
  for (double& v : x) v = uni(rng);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    A.multiply(x.data(), y.data());
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += x[i] * y[i];
      den += M.diag[i] * x[i] * x[i];
    }
    const double next = num / den;
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] /= M.diag[i];
      norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
    lambda = next;
  }
  throw PowerIterationError("power iteration did not converge to " + std::to_string(rel_tol) +
                                " within " + std::to_string(max_iter) +
                                " iterations; last estimate " + std::to_string(lambda),
                            lambda);
}

struct CflBounds {
  double tau_theory = 0.0;       // h_min / nu
  double tau_spectral = 0.0;     // 2 / sqrt(lambda_max)
  double lambda_max = 0.0;
  double inverse_constant = 0.0; // C used in nu
};

/// CFL bounds for a mesh/operator pair. The inverse-inequality constant C is
/// not available in closed form; pass the value calibrated once at the
/// coarsest level of a mesh family, or pass 0 to self-calibrate (then
/// tau_theory = tau_spectral/2 by construction). tau_spectral is the
/// authoritative guard.
inline CflBounds cfl_bound(const SchemeOperators& ops, const SimplicialMesh& mesh,
                           const PermittivityField& eps, double inverse_constant = 0.0) {
  CflBounds cfl;
  cfl.lambda_max = power_iteration_lambda_max(ops.A, ops.M);
  cfl.tau_spectral = 2.0 / std::sqrt(cfl.lambda_max);
  const double shift = std::sqrt(1.0 + 3.0 * (eps.sup_norm - 1.0));
  cfl.inverse_constant = inverse_constant > 0.0
                             ? inverse_constant
                             : mesh.h_min * std::sqrt(cfl.lambda_max) / shift;
  cfl.tau_theory = mesh.h_min / (cfl.inverse_constant * shift);
  return cfl;
}

using SourceFn = std::function<Point(const Point&, double)>;
using StepCallback = std::function<void(const struct SimulationState&)>;

struct SimulationState {
  int k = 1;
  NodalVectorField e_prev;  // e^{k-1}
  NodalVectorField e_curr;  // e^k
  double tau = 0.0;
  std::vector<double> energy_history;
};

/// e^0 = e0h, e^1 = e0h + tau*e1h, k = 1.
inline SimulationState initialize(const NodalVectorField& e0h, const NodalVectorField& e1h,
                                  double tau) {
  if (e0h.mesh != e1h.mesh) throw std::invalid_argument("initialize: fields on different meshes");
  if (!(tau > 0.0)) throw std::invalid_argument("initialize: tau must be positive");
  SimulationState state;
  state.k = 1;
  state.tau = tau;
  state.e_prev = e0h;
  state.e_curr = e0h;
  for (std::size_t i = 0; i < state.e_curr.values.size(); ++i)
    state.e_curr.values[i] += tau * e1h.values[i];
  return state;
}

/// Discrete energy of the current pair:
/// ||(e^k - e^{k-1})/tau||_{eps_h,h}^2 + ||grad e^k||^2 + ||grad e^{k-1}||^2.
inline double energy(const SimulationState& state, const SchemeOperators& ops) {
  const std::size_t n = state.e_curr.values.size();
  double kinetic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = (state.e_curr.values[i] - state.e_prev.values[i]) / state.tau;
    kinetic += ops.M.diag[i] * rate * rate;
  }
  const double g1 = seminorm_gradient(state.e_curr);
  const double g0 = seminorm_gradient(state.e_prev);
  return kinetic + g1 * g1 + g0 * g0;
}

/// One leapfrog update; advances k, appends the energy of the new pair.
/// Throws InstabilityError when a non-finite value appears.
inline void step(SimulationState& state, const SchemeOperators& ops,
                 const SourceFn& source = {}) {
  if (state.k < 1) throw std::logic_error("step: state not initialized");
  const SimplicialMesh& mesh = *state.e_curr.mesh;
  const int d = mesh.dim;
  const std::size_t n = state.e_curr.values.size();
  const double tau = state.tau;
  const double t = state.k * tau;

  std::vector<double> stiff_term(n);
  ops.A.multiply(state.e_curr.values.data(), stiff_term.data());

  std::vector<double> load;
  if (source) {
    load.assign(n, 0.0);
    for (const LoadSample& sample : ops.load_rule) {
      const Point f = source(sample.x, t);
      for (int c = 0; c < d; ++c) load[dof_index(sample.vertex, c, d)] += sample.w * f[c];
    }
  }

  const double inv_tau2 = 1.0 / (tau * tau);
  const double inv_2tau = 1.0 / (2.0 * tau);
  NodalVectorField next(mesh);
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = ops.M.diag[i] * inv_tau2;
    const double b = ops.B.diag[i] * inv_2tau;
    double rhs = 2.0 * m * state.e_curr.values[i] - (m - b) * state.e_prev.values[i] -
                 stiff_term[i];
    if (source) rhs += load[i];
    next.values[i] = rhs / (m + b);
    finite = finite && std::isfinite(next.values[i]);
  }
  if (!finite)
    throw InstabilityError("step: non-finite field value at step " + std::to_string(state.k + 1),
                           state.k + 1);
  state.e_prev = std::move(state.e_curr);
  state.e_curr = std::move(next);
  ++state.k;
  state.energy_history.push_back(energy(state, ops));
}

struct RunOptions {
  double blowup_factor = 1e6;  // abort when energy exceeds this multiple of the initial energy
};

/// Advance the state from k=1 to k=N with N = T/tau (tau must divide T).
/// The callback sees the initial state and every stepped state; an energy
/// excursion beyond blowup_factor times the initial energy aborts.
inline void run(const SchemeOperators& ops, SimulationState& state, double T,
                const SourceFn& source = {}, const StepCallback& callback = {},
                const RunOptions& options = {}) {
  const double steps_real = T / state.tau;
  const long N = std::lround(steps_real);
  if (N < 1 || std::abs(steps_real - static_cast<double>(N)) > 1e-9 * steps_real)
    throw std::invalid_argument("run: tau must divide T to machine precision");
  state.energy_history.clear();
  state.energy_history.push_back(energy(state, ops));
  const double reference = std::max(state.energy_history.front(), 1e-300);
  if (callback) callback(state);
  for (long s = 1; s < N; ++s) {
    step(state, ops, source);
    if (state.energy_history.back() > options.blowup_factor * reference)
      throw InstabilityError("run: energy exceeded " + std::to_string(options.blowup_factor) +
                                 " times its initial value at step " + std::to_string(state.k),
                             state.k);
    if (callback) callback(state);
  }
}

}  // namespace maxp1
