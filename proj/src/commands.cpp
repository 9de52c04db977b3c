#include "pzshell/commands.hpp"

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pzshell/errors.hpp"
#include "pzshell/io.hpp"
#include "pzshell/macro_shell_solver.hpp"
#include "pzshell/micro_homogenizer.hpp"
#include "pzshell/validation_harness.hpp"

namespace pzshell {

namespace {

// Wall-clock laps for the sidecar log.  Timings are the one non-reproducible
// output, so they never go into the CSV/JSON artifacts.
class Timings {
 public:
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    rows_.emplace_back(name,
                       std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }
  std::string str() const {
    std::ostringstream os;
    for (const auto& [name, seconds] : rows_)
      os << name << ' ' << seconds << "\n";
    return os.str();
  }

 private:
  std::vector<std::pair<std::string, double>> rows_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

constexpr const char* kVoigtNames[3] = {"11", "22", "12"};

std::string vtk_string(const TriMesh& mesh,
                       const std::vector<NamedField>& fields = {}) {
  std::ostringstream os;
  write_mesh_vtk(os, mesh, fields);
  return os.str();
}

struct CellSetup {
  PeriodicCellMesh cell;
  TriMesh mesh;
};

CellSetup make_cell(const RunConfig& cfg) {
  CellSetup s;
  s.cell = build_cell_mesh(cfg.hole, cfg.cell_n);
  s.mesh = as_tri_mesh(s.cell);
  return s;
}

}  // namespace

void cmd_cell(const RunConfig& cfg) {
  Timings timings;
  const CellSetup s = make_cell(cfg);
  const P2Space space(s.mesh);
  validate_material(cfg.material, space, triangle_rule(4));
  timings.lap("setup");

  const MembraneCellSolutions mem =
      solve_membrane_cells(space, cfg.material, cfg.tol);
  const BendingCellSolutions bend =
      solve_bending_cells(space, cfg.material, cfg.sigma, cfg.tol);
  timings.lap("cell_solves");

  write_text_file(cfg.output_dir, "cell_mesh.vtk", vtk_string(s.mesh));
  for (int v = 0; v < 3; ++v)
    write_text_file(cfg.output_dir,
                    std::string("cell_strain_") + kVoigtNames[v] + ".vtk",
                    vtk_string(s.mesh, {{"u1", &mem.w1[v]},
                                        {"u2", &mem.w2[v]},
                                        {"phi", &mem.zeta[v]}}));
  for (int c = 0; c < 2; ++c)
    write_text_file(cfg.output_dir,
                    "cell_field_" + std::to_string(c + 1) + ".vtk",
                    vtk_string(s.mesh, {{"u1", &mem.z1[c]},
                                        {"u2", &mem.z2[c]},
                                        {"phi", &mem.eta[c]}}));
  for (int v = 0; v < 3; ++v)
    write_text_file(cfg.output_dir,
                    std::string("cell_bending_") + kVoigtNames[v] + ".vtk",
                    vtk_string(s.mesh, {{"u3", &bend.w[v]}}));
  timings.lap("artifacts");
  write_text_file(cfg.output_dir, "timings.log", timings.str());
}

void cmd_homogenize(const RunConfig& cfg) {
  Timings timings;
  const CellSetup s = make_cell(cfg);
  const P2Space space(s.mesh);
  validate_material(cfg.material, space, triangle_rule(4));
  timings.lap("setup");

  const CellResults res = homogenize_cell(space, cfg.material, cfg.sigma,
                                          cfg.tol);
  timings.lap("homogenize");

  std::ostringstream csv;
  write_tensors_csv(csv, res.tensors);
  write_text_file(cfg.output_dir, "tensors.csv", csv.str());
  write_text_file(cfg.output_dir, "summary.json",
                  homogenize_summary(res.tensors, spd_report(res.tensors)));
  timings.lap("artifacts");
  write_text_file(cfg.output_dir, "timings.log", timings.str());
}

void cmd_macro(const RunConfig& cfg) {
  Timings timings;
  const CellSetup s = make_cell(cfg);
  const P2Space space(s.mesh);
  validate_material(cfg.material, space, triangle_rule(4));
  const CellResults res = homogenize_cell(space, cfg.material, cfg.sigma,
                                          cfg.tol);
  timings.lap("homogenize");

  MacroMesh mm;
  mm.mesh = rectangle_mesh(cfg.macro_lx, cfg.macro_ly, cfg.macro_nx,
                           cfg.macro_ny);
  mm.clamp = cfg.clamp;
  mm.ground = cfg.ground;

  const MacroSolution mem = solve_homogenized_membrane(
      mm, res.tensors, cfg.loads, cfg.chart, cfg.tol);
  timings.lap("membrane");
  write_text_file(cfg.output_dir, "macro_membrane.vtk",
                  vtk_string(mm.mesh, {{"u1", &mem.u1},
                                       {"u2", &mem.u2},
                                       {"u3", &mem.u3},
                                       {"phi", &mem.phi}}));
  write_text_file(cfg.output_dir, "macro_membrane.json",
                  macro_summary(mem.energy, mem.load_work, mem.residual));

  if (cfg.chart.kind == SurfaceChart::Kind::plane) {
    const MacroSolution bend = solve_homogenized_bending(
        mm, res.tensors, cfg.loads, cfg.sigma, cfg.tol);
    timings.lap("bending");
    write_text_file(cfg.output_dir, "macro_bending.vtk",
                    vtk_string(mm.mesh, {{"u3", &bend.u3}}));
    write_text_file(cfg.output_dir, "macro_bending.json",
                    macro_summary(bend.energy, bend.load_work, bend.residual));
  }
  write_text_file(cfg.output_dir, "timings.log", timings.str());
}

void cmd_validate(const RunConfig& cfg) {
  if (cfg.chart.kind != SurfaceChart::Kind::plane)
    throw ConfigError("the convergence study runs on the flat chart only");
  Timings timings;
  const CellSetup s = make_cell(cfg);
  timings.lap("setup");

  StudySetup setup;
  setup.cell = &s.cell;
  setup.mat = cfg.material;
  setup.loads = cfg.loads;
  setup.eps_list = cfg.eps_list;
  setup.macro_n = cfg.validate_macro_n;
  setup.sigma = cfg.sigma;
  setup.tol = cfg.tol;
  setup.membrane = cfg.validate_membrane;
  setup.bending = cfg.validate_bending;
  const ConvergenceReport report = run_convergence_study(setup);
  timings.lap("study");

  std::ostringstream csv;
  write_convergence_csv(csv, report);
  write_text_file(cfg.output_dir, "convergence.csv", csv.str());
  write_text_file(cfg.output_dir, "validate.json",
                  convergence_summary(report));
  timings.lap("artifacts");
  write_text_file(cfg.output_dir, "timings.log", timings.str());
}

int run_cli(const std::string& command, const std::string& config_path,
            const std::string& output_dir) {
  try {
    RunConfig cfg = load_run_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (command == "cell")
      cmd_cell(cfg);
    else if (command == "homogenize")
      cmd_homogenize(cfg);
    else if (command == "macro")
      cmd_macro(cfg);
    else if (command == "validate")
      cmd_validate(cfg);
    else
      throw ConfigError("unknown command \"" + command + "\"");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace pzshell
