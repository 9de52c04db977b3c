#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pzshell/fem_space.hpp"
#include "pzshell/micro_homogenizer.hpp"
#include "pzshell/validation_harness.hpp"

// Artifact writers.  Every number is printed with "%.17g", so rerunning a
// command with the same configuration reproduces each file byte for byte.
// Wall-clock timings go to a separate sidecar log and never into the CSV or
// JSON artifacts.

namespace pzshell {

std::string format_g17(double v);

// Named nodal field restricted to mesh vertices (edge values are dropped,
// which is what legacy VTK point data can carry).
using NamedField = std::pair<std::string, const Eigen::VectorXd*>;

// Legacy VTK ASCII: triangles plus the per-triangle region marker.
void write_mesh_vtk(std::ostream& os, const TriMesh& mesh,
                    const std::vector<NamedField>& fields = {});

// Long-form tensor table, rows "tensor,index,value" with Voigt indices.
void write_tensors_csv(std::ostream& os, const HomogenizedTensors& t);

// Homogenization summary: cell measures, both tensor paths, dual-path
// discrepancies, the coupling-tensor transpose gap, and the SPD report.
std::string homogenize_summary(const HomogenizedTensors& t,
                               const SpdReport& spd);

// Macro solve summary: energies and the solver residual.
std::string macro_summary(double energy, double load_work, double residual);

// One row per eps, fixed header.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

std::string convergence_summary(const ConvergenceReport& report);

// Creates the directory if needed and writes content atomically enough for
// sequential runs.  Throws ConfigError when the path cannot be written.
void write_text_file(const std::string& dir, const std::string& name,
                     const std::string& content);

}  // namespace pzshell
