#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pzshell/macro_shell_solver.hpp"
#include "pzshell/micro_homogenizer.hpp"
#include "pzshell/unfold_ops.hpp"

// Direct solves of the oscillating problems on the perforated domain and the
// corrector reconstruction that compares them against the homogenized
// solution.  Everything here works on the flat chart, where the membrane
// strain is the symmetric gradient and the transverse deflection decouples;
// the oscillation enters through the material tensors and the areal weight
// sampled at y = {x/eps}.

namespace pzshell {

// Unit square tiled by m x m copies of the scaled cell mesh, m = 1/eps.
// Global triangle t lies in tile t/nt (x index fastest) and region keeps its
// cell triangle index, so y = x/eps - k is exact per element.
struct PerforatedMacroMesh {
  TriMesh mesh;
  double eps = 0.0;
  int reps = 0;
  std::function<bool(const Vec2&)> clamp;
  std::function<bool(const Vec2&)> ground;
};

// Throws ConfigError unless eps = 1/m.
PerforatedMacroMesh build_perforated_macro(
    const PeriodicCellMesh& cell, double eps,
    std::function<bool(const Vec2&)> clamp = nullptr,
    std::function<bool(const Vec2&)> ground = nullptr);

// Material field periodized to the macro domain: tensors at {x/eps}.
MaterialField material_at_eps(const MaterialField& mat, double eps);

struct EpsSolution {
  Eigen::VectorXd u1, u2, u3, phi;
  double energy = 0.0;
  double load_work = 0.0;
  double residual = 0.0;
};

// Coupled membrane solve on the perforated domain with oscillating
// coefficients; clamp on the in-plane components, ground (or a zero-mean
// fallback) on the potential.
EpsSolution solve_eps_membrane(const PerforatedMacroMesh& perf,
                               const MaterialField& mat, const Loads& loads,
                               double tol = 1e-10);

// Interior-penalty bending solve with oscillating moment density
// (2/3) C(y) sqrt(a)(y); clamp takes the deflection and its normal slope.
EpsSolution solve_eps_bending(const PerforatedMacroMesh& perf,
                              const MaterialField& mat, const Loads& loads,
                              double sigma = 20.0, double tol = 1e-10);

// Corrector images on the eps sample layout.  The first-order ansatz is
// separable, u1 = sum_i a_i(x) b_i(y), so its averaged image is the per-cell
// mean of each macro coefficient times the micro factor; strain components
// are stored as (11, 22, 12), fields as (1, 2).
struct MembraneCorrector {
  EpsField strain;  // 3 components
  EpsField field;   // 2 components
};

MembraneCorrector reconstruct_membrane_corrector(
    const std::function<Mat2(const Vec2&)>& macro_strain,
    const std::function<Vec2(const Vec2&)>& macro_field,
    const P2Space& cell_space, const MembraneCellSolutions& cells,
    const EpsGrid& grid);

// Averaged image of the bending ansatz curvature, components (11, 22, 12).
EpsField reconstruct_bending_corrector(
    const std::function<Mat2(const Vec2&)>& macro_hess,
    const P2Space& cell_space, const BendingCellSolutions& cells,
    const EpsGrid& grid);

struct CorrectorErrors {
  // L2 norms over the whole perforated domain and over the interior part at
  // distance 2 eps from the boundary, where the ansatz ignores boundary
  // layers.
  double corrected = 0.0, plain = 0.0;
  double corrected_interior = 0.0, plain_interior = 0.0;
};

CorrectorErrors corrector_error_membrane_strain(
    const PerforatedMacroMesh& perf, const EpsSolution& sol,
    const std::function<Mat2(const Vec2&)>& macro_strain,
    const MembraneCorrector& corr, const EpsGrid& grid);

CorrectorErrors corrector_error_membrane_field(
    const PerforatedMacroMesh& perf, const EpsSolution& sol,
    const std::function<Vec2(const Vec2&)>& macro_field,
    const MembraneCorrector& corr, const EpsGrid& grid);

CorrectorErrors corrector_error_bending(
    const PerforatedMacroMesh& perf, const EpsSolution& sol,
    const std::function<Mat2(const Vec2&)>& macro_hess, const EpsField& corr,
    const EpsGrid& grid);

struct StudySetup {
  const PeriodicCellMesh* cell = nullptr;
  MaterialField mat;
  Loads loads;                     // components 1,2 drive the membrane, 3 the bending
  std::vector<double> eps_list{0.5, 0.25, 0.125};
  int macro_n = 16;                // homogenized solve on an n x n square mesh
  double sigma = 20.0;
  double tol = 1e-10;
  bool bending = true;
  bool membrane = true;
};

struct ConvergenceRow {
  double eps = 0.0;
  CorrectorErrors membrane_strain, membrane_field, bending;
  double membrane_energy = 0.0, bending_energy = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // sorted by decreasing eps
  HomogenizedTensors tensors;
  double macro_membrane_energy = 0.0;
  double macro_bending_energy = 0.0;
};

// Full pipeline: homogenize the cell, solve the effective problems once,
// then for each eps solve the oscillating problems and measure the corrector
// errors.  Deterministic for a fixed setup.
ConvergenceReport run_convergence_study(const StudySetup& setup);

}  // namespace pzshell
