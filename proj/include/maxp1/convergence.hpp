#pragma once

// Convergence-study driver on the structured disk family, report CSV output
// and the empirical CFL sweep.

#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxp1/errors.hpp"
#include "maxp1/error_norms.hpp"
#include "maxp1/manufactured.hpp"
#include "maxp1/mesh.hpp"
#include "maxp1/solver.hpp"

namespace maxp1 {

class LevelInstabilityError : public InstabilityError {
 public:
  LevelInstabilityError(const InstabilityError& cause, int level)
      : InstabilityError("level " + std::to_string(level) + ": " + cause.what(), cause.step()),
        level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

struct ConvergenceRow {
  int l = 0;
  int nel = 0;
  int nno = 0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  double ratio1 = 0.0, ratio2 = 0.0, ratio3 = 0.0;  // e_{l-1}/e_l, 0 when absent
  bool has_ratio = false;
  bool extrapolated = false;  // level beyond the validated tau rule
  double tau = 0.0;
};

struct ConvergenceReport {
  int m = 2;
  double T = 0.5;
  std::string tau_rule = "0.025*2^-l";
  std::string mapping_id = "concentric-linf";
  std::vector<ConvergenceRow> rows;
};

struct StudyOptions {
  double tau_override = 0.0;  // 0: tau_l = 0.025*2^-l for l <= 6, spectral guard beyond
  double T = 0.5;
  double safety_factor = 0.9;
  bool force = false;
  int threads = 1;
  double blowup_factor = 1e6;
};

/// Default time step of the experiment family.
inline double default_tau(int l) { return 0.025 * std::ldexp(1.0, -l); }

/// One measured level: table row plus the per-step error and energy traces.
struct LevelRun {
  ConvergenceRow row;
  std::vector<InstantErrors> history;
  std::vector<double> energy_history;
};

/// Build, run and measure a single level of the manufactured experiment.
inline LevelRun run_level(int m, int l, const StudyOptions& opts = {},
                          const StepCallback& extra_callback = {}) {
  const ManufacturedCase mc(m, opts.T);
  const SimplicialMesh disk = build_disk_mesh(l);
  const SchemeOperators ops = assemble_scheme(disk, mc.eps);

  double tau;
  bool extrapolated = false;
  if (opts.tau_override > 0.0) {
    tau = opts.tau_override;
    if (!opts.force) {
      const CflBounds cfl = cfl_bound(ops, disk, mc.eps);
      if (tau > opts.safety_factor * cfl.tau_spectral)
        throw std::invalid_argument(
            "level " + std::to_string(l) + ": tau " + std::to_string(tau) + " exceeds " +
            std::to_string(opts.safety_factor) + " * tau_spectral (" +
            std::to_string(cfl.tau_spectral) + "); pass force to override");
    }
  } else if (l <= 6) {
    tau = default_tau(l);
  } else {
    const CflBounds cfl = cfl_bound(ops, disk, mc.eps);
    const long N = static_cast<long>(std::ceil(opts.T / (opts.safety_factor * cfl.tau_spectral)));
    tau = opts.T / static_cast<double>(N);
    extrapolated = true;
  }

  const NodalVectorField e0h =
      interpolate([&mc](const Point& x) { return mc.initial_value(x); }, disk);
  const NodalVectorField e1h =
      interpolate([&mc](const Point& x) { return mc.initial_velocity(x); }, disk);
  SimulationState state = initialize(e0h, e1h, tau);
  ErrorAccumulator acc(disk, mc);
  const SourceFn source = [&mc](const Point& x, double t) { return mc.source(x, t); };
  const StepCallback callback = [&acc, &extra_callback](const SimulationState& s) {
    acc.observe(s);
    if (extra_callback) extra_callback(s);
  };
  RunOptions ropts;
  ropts.blowup_factor = opts.blowup_factor;
  const double steps_real = opts.T / tau;
  const bool divides = std::abs(steps_real - std::round(steps_real)) <= 1e-9 * steps_real;
  try {
    if (divides) {
      run(ops, state, opts.T, source, callback, ropts);
    } else if (opts.force) {
      // forced override that does not divide T: integrate ceil(T/tau) steps
      // at the requested tau (at least 8, so instabilities can manifest),
      // keeping the blowup guard
      const long N = std::max(8L, static_cast<long>(std::ceil(steps_real)));
      state.energy_history.push_back(energy(state, ops));
      const double reference = std::max(state.energy_history.front(), 1e-300);
      if (callback) callback(state);
      for (long s = 1; s < N; ++s) {
        step(state, ops, source);
        if (state.energy_history.back() > ropts.blowup_factor * reference)
          throw InstabilityError("run: energy exceeded " +
                                     std::to_string(ropts.blowup_factor) +
                                     " times its initial value at step " + std::to_string(state.k),
                                 state.k);
        if (callback) callback(state);
      }
    } else {
      throw std::invalid_argument("level " + std::to_string(l) + ": tau " + std::to_string(tau) +
                                  " does not divide T; adjust tau or pass force");
    }
  } catch (const InstabilityError& e) {
    throw LevelInstabilityError(e, l);
  }

  LevelRun result;
  const ErrorNorms norms = acc.result();
  result.row.l = l;
  result.row.nel = disk.num_cells();
  result.row.nno = disk.num_vertices();
  result.row.e1 = norms.e1;
  result.row.e2 = norms.e2;
  result.row.e3 = norms.e3;
  result.row.extrapolated = extrapolated;
  result.row.tau = tau;
  result.history = acc.history();
  result.energy_history = state.energy_history;
  return result;
}

/// Build, run and measure levels l_min..l_max; successive-ratio columns follow
/// the layout of the experiment tables. Levels may run concurrently.
inline ConvergenceReport convergence_study(int m, int l_min, int l_max,
                                           const StudyOptions& opts = {}) {
  if (l_min < 1 || l_min > l_max)
    throw std::invalid_argument("convergence_study: need 1 <= l_min <= l_max");
  ConvergenceReport report;
  report.m = m;
  report.T = opts.T;
  if (opts.tau_override > 0.0) report.tau_rule = "fixed";

  const int nlevels = l_max - l_min + 1;
  std::vector<ConvergenceRow> rows(nlevels);
  if (opts.threads > 1) {
    std::vector<std::future<LevelRun>> futures;
    futures.reserve(nlevels);
    for (int l = l_min; l <= l_max; ++l)
      futures.push_back(
          std::async(std::launch::async, [m, l, &opts] { return run_level(m, l, opts); }));
    for (int i = 0; i < nlevels; ++i) rows[i] = futures[i].get().row;
  } else {
    for (int i = 0; i < nlevels; ++i) rows[i] = run_level(m, l_min + i, opts).row;
  }
  for (int i = 0; i < nlevels; ++i) {
    if (i > 0) {
      rows[i].ratio1 = rows[i - 1].e1 / rows[i].e1;
      rows[i].ratio2 = rows[i - 1].e2 / rows[i].e2;
      rows[i].ratio3 = rows[i - 1].e3 / rows[i].e3;
      rows[i].has_ratio = true;
    }
    report.rows.push_back(rows[i]);
  }
  return report;
}

inline void write_report_csv(const ConvergenceReport& report, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("write_report_csv: cannot open " + path);
  std::fprintf(fp, "# m=%d T=%.17g tau_rule=%s mapping=%s\n", report.m, report.T,
               report.tau_rule.c_str(), report.mapping_id.c_str());
  std::fprintf(fp, "l,nel,nno,e1,ratio1,e2,ratio2,e3,ratio3\n");
  for (const ConvergenceRow& row : report.rows) {
    std::fprintf(fp, "%d,%d,%d,", row.l, row.nel, row.nno);
    auto cell = [fp](double e, double ratio, bool has_ratio, bool last) {
      std::fprintf(fp, "%.6e,", e);
      if (has_ratio) std::fprintf(fp, "%.4f", ratio);
      std::fprintf(fp, last ? "\n" : ",");
    };
    cell(row.e1, row.ratio1, row.has_ratio, false);
    cell(row.e2, row.ratio2, row.has_ratio, false);
    cell(row.e3, row.ratio3, row.has_ratio, true);
  }
  std::fclose(fp);
}

/// log2(h_l) vs log2(error) per norm, for rate plots.
inline void write_rate_plot_data(const ConvergenceReport& report, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("write_rate_plot_data: cannot open " + path);
  std::fprintf(fp, "# m=%d mapping=%s\n", report.m, report.mapping_id.c_str());
  std::fprintf(fp, "log2_h,log2_e1,log2_e2,log2_e3\n");
  for (const ConvergenceRow& row : report.rows)
    std::fprintf(fp, "%d,%.6f,%.6f,%.6f\n", -row.l, std::log2(row.e1), std::log2(row.e2),
                 std::log2(row.e3));
  std::fclose(fp);
}

/// Per-step energy log; error columns included when the run carried an exact
/// solution.
inline void write_energy_csv(const std::vector<double>& energy_history,
                             const std::vector<InstantErrors>& history, double tau,
                             const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("write_energy_csv: cannot open " + path);
  const bool with_errors = !history.empty();
  std::fprintf(fp, with_errors ? "k,t,energy,err1,err2,err3\n" : "k,t,energy\n");
  for (std::size_t i = 0; i < energy_history.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    std::fprintf(fp, "%d,%.10g,%.10e", k, k * tau, energy_history[i]);
    if (with_errors)
      std::fprintf(fp, ",%.10e,%.10e,%.10e", history[i].err_fun, history[i].err_grad,
                   history[i].err_dt);
    std::fprintf(fp, "\n");
  }
  std::fclose(fp);
}

/// Least-squares slopes of log2(error) against log2(h) over levels
/// [l_from, l_to]; returns {order_e1, order_e2, order_e3}.
inline std::array<double, 3> fit_orders(const ConvergenceReport& report, int l_from, int l_to) {
  std::array<double, 3> orders{0.0, 0.0, 0.0};
  for (int norm = 0; norm < 3; ++norm) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const ConvergenceRow& row : report.rows) {
      if (row.l < l_from || row.l > l_to) continue;
      const double x = -row.l;  // log2 h
      const double e = norm == 0 ? row.e1 : norm == 1 ? row.e2 : row.e3;
      const double y = std::log2(e);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_orders: need at least two levels in range");
    orders[norm] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return orders;
}

// ---------------------------------------------------------------------------
// Empirical CFL threshold

struct SweepPoint {
  double factor = 0.0;  // tau / tau_spectral
  bool stable = false;
};

struct CflSweepResult {
  std::vector<SweepPoint> points;
  double tau_spectral = 0.0;
  double threshold_factor = 0.0;  // bracket midpoint, 1% relative width
};

namespace detail {

// Stability probe: integrate at least min_steps leapfrog steps with the
// manufactured initial data and no source; unstable when the energy passes
// blowup_factor times its initial value or a value goes non-finite. tau is
// not snapped to divide T here.
inline bool probe_stable(const SchemeOperators& ops, const NodalVectorField& e0h,
                         const NodalVectorField& e1h, double tau, double T, long min_steps,
                         double blowup_factor) {
  SimulationState state = initialize(e0h, e1h, tau);
  const long steps = std::max(static_cast<long>(std::ceil(T / tau)), min_steps);
  const double reference = std::max(energy(state, ops), 1e-300);
  try {
    for (long s = 0; s < steps; ++s) {
      step(state, ops);
      if (state.energy_history.back() > blowup_factor * reference) return false;
    }
  } catch (const InstabilityError&) {
    return false;
  }
  return true;
}

}  // namespace detail

/// Geometric sweep of tau/tau_spectral followed by bisection to 1% on the
/// empirical stability threshold.
inline CflSweepResult cfl_sweep(int m, int l, double T = 0.5, long min_steps = 2000,
                                double blowup_factor = 1e6) {
  const ManufacturedCase mc(m, T);
  const SimplicialMesh disk = build_disk_mesh(l);
  const SchemeOperators ops = assemble_scheme(disk, mc.eps);
  const CflBounds cfl = cfl_bound(ops, disk, mc.eps);
  const NodalVectorField e0h =
      interpolate([&mc](const Point& x) { return mc.initial_value(x); }, disk);
  const NodalVectorField e1h =
      interpolate([&mc](const Point& x) { return mc.initial_velocity(x); }, disk);

  CflSweepResult result;
  result.tau_spectral = cfl.tau_spectral;
  auto probe = [&](double factor) {
    const bool stable = detail::probe_stable(ops, e0h, e1h, factor * cfl.tau_spectral, T,
                                             min_steps, blowup_factor);
    result.points.push_back({factor, stable});
    return stable;
  };

  double lo = 0.25;
  if (!probe(lo)) throw std::runtime_error("cfl_sweep: unstable at 0.25 * tau_spectral");
  double hi = 0.0;
  for (double factor = 0.5; factor <= 16.0; factor *= 2.0) {
    if (probe(factor)) {
      lo = factor;
    } else {
      hi = factor;
      break;
    }
  }
  if (hi == 0.0) throw std::runtime_error("cfl_sweep: stable up to 16 * tau_spectral");
  while (hi - lo > 0.01 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid))
      lo = mid;
    else
      hi = mid;
  }
  result.threshold_factor = 0.5 * (lo + hi);
  return result;
}

}  // namespace maxp1
