#include "pzshell/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "pzshell/errors.hpp"

namespace pzshell {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json mat_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

void csv_block(std::ostream& os, const char* name, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << name << ',' << (i + 1) << (j + 1) << ',' << format_g17(m(i, j))
         << '\n';
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_mesh_vtk(std::ostream& os, const TriMesh& mesh,
                    const std::vector<NamedField>& fields) {
  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();
  os << "# vtk DataFile Version 3.0\n";
  os << "pzshell mesh\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nv << " double\n";
  for (int v = 0; v < nv; ++v)
    os << format_g17(mesh.vertices(v, 0)) << ' '
       << format_g17(mesh.vertices(v, 1)) << " 0\n";
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (int t = 0; t < nt; ++t)
    os << "3 " << mesh.triangles(t, 0) << ' ' << mesh.triangles(t, 1) << ' '
       << mesh.triangles(t, 2) << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) os << "5\n";
  os << "CELL_DATA " << nt << '\n';
  os << "SCALARS region int 1\n";
  os << "LOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) os << mesh.region_of(t) << '\n';
  if (fields.empty()) return;
  os << "POINT_DATA " << nv << '\n';
  for (const auto& [name, values] : fields) {
    os << "SCALARS " << name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (int v = 0; v < nv; ++v) os << format_g17((*values)[v]) << '\n';
  }
}

void write_tensors_csv(std::ostream& os, const HomogenizedTensors& t) {
  os << "tensor,index,value\n";
  csv_block(os, "cbar", t.cbar.voigt());
  csv_block(os, "ebar", t.ebar.voigt());
  csv_block(os, "fbar", t.fbar.voigt());
  csv_block(os, "dbar", t.dbar);
  csv_block(os, "cbar_bend", t.cbar_bend.voigt());
  csv_block(os, "cbar_energy", t.cbar_energy.voigt());
  csv_block(os, "dbar_energy", t.dbar_energy);
  csv_block(os, "cbar_bend_energy", t.cbar_bend_energy.voigt());
  os << "ystar,0," << format_g17(t.ystar) << '\n';
  os << "ystar_a,0," << format_g17(t.ystar_a) << '\n';
}

std::string homogenize_summary(const HomogenizedTensors& t,
                               const SpdReport& spd) {
  ordered_json j;
  j["cell"] = {{"ystar", t.ystar}, {"ystar_a", t.ystar_a}};
  j["tensors"]["cbar"] = mat_json(t.cbar.voigt());
  j["tensors"]["ebar"] = mat_json(t.ebar.voigt());
  j["tensors"]["fbar"] = mat_json(t.fbar.voigt());
  j["tensors"]["dbar"] = mat_json(t.dbar);
  j["tensors"]["bending"] = mat_json(t.cbar_bend.voigt());
  j["energy_path"]["cbar"] = mat_json(t.cbar_energy.voigt());
  j["energy_path"]["dbar"] = mat_json(t.dbar_energy);
  j["energy_path"]["bending"] = mat_json(t.cbar_bend_energy.voigt());
  j["dual_path_discrepancy"] = {
      {"cbar", relative_gap(t.cbar.voigt(), t.cbar_energy.voigt())},
      {"dbar", relative_gap(t.dbar, t.dbar_energy)},
      {"bending",
       relative_gap(t.cbar_bend.voigt(), t.cbar_bend_energy.voigt())}};
  j["coupling_transpose_gap"] = relative_gap(t.ebar.voigt(), t.fbar.voigt());
  j["min_eigenvalues"] = {{"cbar", spd.cbar_min},
                          {"dbar", spd.dbar_min},
                          {"bending", spd.bending_min}};
  return j.dump(2) + "\n";
}

std::string macro_summary(double energy, double load_work, double residual) {
  ordered_json j;
  j["energy"] = energy;
  j["load_work"] = load_work;
  j["residual"] = residual;
  return j.dump(2) + "\n";
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "eps"
     << ",membrane_strain_corrected,membrane_strain_plain"
     << ",membrane_strain_corrected_interior,membrane_strain_plain_interior"
     << ",membrane_field_corrected,membrane_field_plain"
     << ",membrane_field_corrected_interior,membrane_field_plain_interior"
     << ",bending_corrected,bending_plain"
     << ",bending_corrected_interior,bending_plain_interior"
     << ",membrane_energy,bending_energy\n";
  for (const auto& row : report.rows) {
    const auto put4 = [&](const CorrectorErrors& e) {
      os << ',' << format_g17(e.corrected) << ',' << format_g17(e.plain) << ','
         << format_g17(e.corrected_interior) << ','
         << format_g17(e.plain_interior);
    };
    os << format_g17(row.eps);
    put4(row.membrane_strain);
    put4(row.membrane_field);
    put4(row.bending);
    os << ',' << format_g17(row.membrane_energy) << ','
       << format_g17(row.bending_energy) << '\n';
  }
}

std::string convergence_summary(const ConvergenceReport& report) {
  ordered_json j;
  j["macro_membrane_energy"] = report.macro_membrane_energy;
  j["macro_bending_energy"] = report.macro_bending_energy;
  j["cell"] = {{"ystar", report.tensors.ystar},
               {"ystar_a", report.tensors.ystar_a}};
  ordered_json eps = ordered_json::array();
  for (const auto& row : report.rows) eps.push_back(row.eps);
  j["eps"] = eps;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& dir, const std::string& name,
                     const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = fs::path(dir) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << content;
  if (!os) throw ConfigError("write failed for " + path.string());
}

}  // namespace pzshell
