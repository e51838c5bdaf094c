// maxp1 command line: convergence studies, single runs, CFL sweeps and mesh
// generation for the explicit P1 Maxwell solver.
//
// Exit codes: 0 success, 2 instability, 3 I/O failure, 4 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "maxp1/convergence.hpp"
#include "maxp1/mesh_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliConfig {
  int m = 2;
  std::string levels = "1..5";
  int l = 1;
  double tau = 0.0;  // 0: default rule
  double T = 0.5;
  std::string out = ".";
  std::vector<std::string> emit;
  bool force = false;
  bool square = false;
  bool zero = false;
  long seed = 0;  // reserved for randomized utilities; kept in reports' inputs
  int threads = 1;
  double safety_factor = 0.9;
  std::string config_path;
};

std::pair<int, int> parse_levels(const std::string& text) {
  const auto pos = text.find("..");
  try {
    if (pos == std::string::npos) {
      const int l = std::stoi(text);
      return {l, l};
    }
    return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse levels '" + text + "' (expected a..b)");
  }
}

bool wants(const CliConfig& cfg, const std::string& artifact) {
  for (const std::string& entry : cfg.emit) {
    std::size_t start = 0;
    while (start <= entry.size()) {
      const std::size_t comma = entry.find(',', start);
      const std::string token =
          entry.substr(start, comma == std::string::npos ? entry.size() - start : comma - start);
      if (token == artifact) return true;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return false;
}

fs::path ensure_out_dir(const CliConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw maxp1::IoError("cannot create output directory " + dir.string());
  return dir;
}

// CLI flags win over JSON config values, which win over defaults.
void merge_json_config(CliConfig& cfg, const CLI::App* cmd) {
  if (cfg.config_path.empty()) return;
  std::ifstream in(cfg.config_path);
  if (!in) throw maxp1::IoError("cannot open config file " + cfg.config_path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + cfg.config_path + ": " + e.what());
  }
  auto unset = [cmd](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
    return opt == nullptr || opt->count() == 0;
  };
  auto load = [&](const char* key, auto& target) {
    if (doc.contains(key) && unset(key)) target = doc.at(key).get<std::decay_t<decltype(target)>>();
  };
  load("m", cfg.m);
  load("levels", cfg.levels);
  load("l", cfg.l);
  load("tau", cfg.tau);
  load("T", cfg.T);
  load("out", cfg.out);
  load("force", cfg.force);
  load("square", cfg.square);
  load("zero", cfg.zero);
  load("seed", cfg.seed);
  load("threads", cfg.threads);
  load("safety_factor", cfg.safety_factor);
  if (doc.contains("emit") && unset("emit")) {
    if (doc.at("emit").is_array())
      cfg.emit = doc.at("emit").get<std::vector<std::string>>();
    else
      cfg.emit = {doc.at("emit").get<std::string>()};
  }
}

maxp1::StudyOptions study_options(const CliConfig& cfg) {
  maxp1::StudyOptions opts;
  opts.tau_override = cfg.tau;
  opts.T = cfg.T;
  opts.safety_factor = cfg.safety_factor;
  opts.force = cfg.force;
  opts.threads = cfg.threads;
  return opts;
}

int cmd_converge(const CliConfig& cfg) {
  const auto [l_min, l_max] = parse_levels(cfg.levels);
  const fs::path dir = ensure_out_dir(cfg);
  const maxp1::StudyOptions opts = study_options(cfg);
  const maxp1::ConvergenceReport report = maxp1::convergence_study(cfg.m, l_min, l_max, opts);

  const std::string report_path = (dir / ("report_m" + std::to_string(cfg.m) + ".csv")).string();
  maxp1::write_report_csv(report, report_path);
  maxp1::write_rate_plot_data(report,
                              (dir / ("rates_m" + std::to_string(cfg.m) + ".csv")).string());
  std::printf("wrote %s\n", report_path.c_str());
  for (const maxp1::ConvergenceRow& row : report.rows)
    std::printf("l=%d nel=%d nno=%d e1=%.4e e2=%.4e e3=%.4e%s\n", row.l, row.nel, row.nno, row.e1,
                row.e2, row.e3, row.extrapolated ? " (extrapolated level)" : "");

  if (wants(cfg, "energy") || wants(cfg, "vtk")) {
    for (int l = l_min; l <= l_max; ++l) {
      maxp1::NodalVectorField final_state;
      maxp1::StepCallback capture;
      if (wants(cfg, "vtk"))
        capture = [&final_state](const maxp1::SimulationState& s) { final_state = s.e_curr; };
      const maxp1::LevelRun level = maxp1::run_level(cfg.m, l, opts, capture);
      const std::string tag = "m" + std::to_string(cfg.m) + "_l" + std::to_string(l);
      if (wants(cfg, "energy"))
        maxp1::write_energy_csv(level.energy_history, level.history, level.row.tau,
                                (dir / ("energy_" + tag + ".csv")).string());
      if (wants(cfg, "vtk")) {
        const maxp1::SimplicialMesh disk = maxp1::build_disk_mesh(l);
        final_state.mesh = &disk;
        maxp1::export_vtk(disk, &final_state, (dir / ("field_" + tag + ".vtk")).string());
      }
    }
  }
  return 0;
}

int cmd_run(const CliConfig& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const std::string tag = "m" + std::to_string(cfg.m) + "_l" + std::to_string(cfg.l);
  const maxp1::SimplicialMesh disk = maxp1::build_disk_mesh(cfg.l);

  if (cfg.zero) {
    // zero data, zero source: the field stays identically zero
    const maxp1::ManufacturedCase mc(cfg.m, cfg.T);
    const maxp1::SchemeOperators ops = maxp1::assemble_scheme(disk, mc.eps);
    const double tau = cfg.tau > 0.0 ? cfg.tau : maxp1::default_tau(cfg.l);
    maxp1::NodalVectorField zero(disk);
    maxp1::SimulationState state = maxp1::initialize(zero, zero, tau);
    maxp1::run(ops, state, cfg.T);
    maxp1::write_energy_csv(state.energy_history, {}, tau,
                            (dir / ("energy_" + tag + ".csv")).string());
    if (wants(cfg, "vtk"))
      maxp1::export_vtk(disk, &state.e_curr, (dir / ("field_" + tag + ".vtk")).string());
    std::printf("completed %d steps (zero data), final energy %.3e\n", state.k,
                state.energy_history.back());
    return 0;
  }

  maxp1::NodalVectorField final_state;
  maxp1::StepCallback capture = [&final_state](const maxp1::SimulationState& s) {
    final_state = s.e_curr;
  };
  const maxp1::LevelRun level = maxp1::run_level(cfg.m, cfg.l, study_options(cfg), capture);
  maxp1::write_energy_csv(level.energy_history, level.history, level.row.tau,
                          (dir / ("energy_" + tag + ".csv")).string());
  if (wants(cfg, "vtk")) {
    final_state.mesh = &disk;
    maxp1::export_vtk(disk, &final_state, (dir / ("field_" + tag + ".vtk")).string());
  }
  std::printf("completed %zu states at tau=%.6g; e1=%.4e e2=%.4e e3=%.4e\n",
              level.energy_history.size(), level.row.tau, level.row.e1, level.row.e2,
              level.row.e3);
  return 0;
}

int cmd_cfl_sweep(const CliConfig& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const maxp1::CflSweepResult sweep = maxp1::cfl_sweep(cfg.m, cfg.l, cfg.T);
  const std::string path =
      (dir / ("cfl_sweep_m" + std::to_string(cfg.m) + "_l" + std::to_string(cfg.l) + ".csv"))
          .string();
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw maxp1::IoError("cannot open " + path);
  std::fprintf(fp, "# tau_spectral=%.10e threshold_factor=%.6f\n", sweep.tau_spectral,
               sweep.threshold_factor);
  std::fprintf(fp, "factor,stable\n");
  for (const maxp1::SweepPoint& pt : sweep.points)
    std::fprintf(fp, "%.6f,%d\n", pt.factor, pt.stable ? 1 : 0);
  std::fclose(fp);
  std::printf("tau_spectral = %.6e\n", sweep.tau_spectral);
  std::printf("empirical threshold = %.4f * tau_spectral\n", sweep.threshold_factor);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_mesh(const CliConfig& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const maxp1::SimplicialMesh mesh =
      cfg.square ? maxp1::build_square_mesh(cfg.l) : maxp1::build_disk_mesh(cfg.l);
  const std::string stem = (cfg.square ? "square_l" : "disk_l") + std::to_string(cfg.l);
  const std::string path = (dir / (stem + ".mesh")).string();
  maxp1::save_mesh(mesh, path);
  std::printf("wrote %s (%d vertices, %d cells, %d boundary facets)\n", path.c_str(),
              mesh.num_vertices(), mesh.num_cells(), mesh.num_facets());
  if (wants(cfg, "vtk")) maxp1::export_vtk(mesh, nullptr, (dir / (stem + ".vtk")).string());
  return 0;
}

void add_common_options(CLI::App* cmd, CliConfig& cfg, bool with_levels, bool with_l) {
  cmd->add_option("--m", cfg.m, "permittivity exponent (>= 2)");
  if (with_levels) cmd->add_option("--levels", cfg.levels, "level range a..b (or single level)");
  if (with_l) cmd->add_option("--l", cfg.l, "refinement level");
  cmd->add_option("--tau", cfg.tau, "time step override (default: 0.025*2^-l)");
  cmd->add_option("--T", cfg.T, "final time");
  cmd->add_option("--out", cfg.out, "output directory");
  cmd->add_option("--emit", cfg.emit, "extra artifacts: csv|vtk|energy (repeatable)");
  cmd->add_flag("--force", cfg.force, "bypass the spectral CFL guard on --tau");
  cmd->add_option("--seed", cfg.seed, "seed for randomized utilities");
  cmd->add_option("--threads", cfg.threads, "worker threads across levels");
  cmd->add_option("--safety-factor", cfg.safety_factor, "CFL guard fraction in (0,1]");
  cmd->add_option("--config", cfg.config_path, "JSON config file (flags take precedence)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explicit P1 finite-element solver for the time-dependent Maxwell system"};
  app.require_subcommand(1);
  CliConfig cfg;

  CLI::App* converge = app.add_subcommand("converge", "run a convergence study over mesh levels");
  add_common_options(converge, cfg, true, false);
  CLI::App* run = app.add_subcommand("run", "run a single simulation");
  add_common_options(run, cfg, false, true);
  run->add_flag("--zero", cfg.zero, "zero initial data and source");
  CLI::App* sweep = app.add_subcommand("cfl-sweep", "probe the empirical stability threshold");
  add_common_options(sweep, cfg, false, true);
  CLI::App* mesh = app.add_subcommand("mesh", "generate and export a mesh");
  add_common_options(mesh, cfg, false, true);
  mesh->add_flag("--square", cfg.square, "emit the square mesh instead of the disk");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;  // help/version exit cleanly, parse errors are config errors
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    merge_json_config(cfg, active);
    if (cfg.m < 2) throw std::invalid_argument("--m must be >= 2");
    if (cfg.safety_factor <= 0.0 || cfg.safety_factor > 1.0)
      throw std::invalid_argument("--safety-factor must lie in (0, 1]");
    if (active == converge) return cmd_converge(cfg);
    if (active == run) return cmd_run(cfg);
    if (active == sweep) return cmd_cfl_sweep(cfg);
    if (active == mesh) return cmd_mesh(cfg);
    return 4;
  } catch (const maxp1::LevelInstabilityError& e) {
    std::fprintf(stderr, "instability: %s\n", e.what());
    return 2;
  } catch (const maxp1::InstabilityError& e) {
    std::fprintf(stderr, "instability at step %d: %s\n", e.step(), e.what());
    return 2;
  } catch (const maxp1::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
