#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pzshell/cell_domain.hpp"
#include "pzshell/fem_space.hpp"
#include "pzshell/macro_shell_solver.hpp"
#include "pzshell/micro_homogenizer.hpp"
#include "pzshell/validation_harness.hpp"

using namespace pzshell;

namespace {

constexpr double kPi = 3.141592653589793238462643;

bool on_boundary(const Vec2& p) {
  const double tol = 1e-12;
  return p.x() < tol || p.x() > 1.0 - tol || p.y() < tol || p.y() > 1.0 - tol;
}

bool lower_layer(const Vec2& y) { return y.x() < 0.5; }

double mesh_area(const TriMesh& mesh) {
  double a = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) a += mesh.triangle_area(t);
  return a;
}

Tensor3 coupling_rows(double s) {
  Eigen::Matrix<double, 2, 3> v;
  v << 0.4 * s, -0.1, 0.2 * s, 0.05, 0.3 * s, -0.15;
  return Tensor3::from_voigt(v);
}

MaterialField constant_coupled() {
  Mat2 d;
  d << 2.0, 0.3, 0.3, 1.5;
  return MaterialField::constant(Tensor4::isotropic(1.2, 0.8), coupling_rows(1.0),
                                 d, Tensor4::isotropic(2.0, 1.0));
}

MaterialField layered_coupled() {
  MaterialField m = constant_coupled();
  m.c = [](const Vec2& y) {
    return lower_layer(y) ? Tensor4::isotropic(1.0, 1.0) : Tensor4::isotropic(2.0, 2.0);
  };
  m.e = [](const Vec2& y) { return coupling_rows(lower_layer(y) ? 1.0 : 0.5); };
  m.d = [](const Vec2& y) {
    return lower_layer(y) ? Mat2::Identity().eval() : (4.0 * Mat2::Identity()).eval();
  };
  m.bending = [](const Vec2& y) {
    return lower_layer(y) ? Tensor4::isotropic(1.0, 0.5) : Tensor4::isotropic(2.0, 1.0);
  };
  return m;
}

}  // namespace

TEST_CASE("tiling reproduces the scaled cell geometry") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const PerforatedMacroMesh perf = build_perforated_macro(cell, 0.5);
  CHECK(perf.reps == 2);
  CHECK(perf.eps == 0.5);
  CHECK(perf.mesh.num_vertices() == 81);
  CHECK(perf.mesh.num_triangles() == 128);
  CHECK(mesh_area(perf.mesh) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(perf.clamp(Vec2(0.0, 0.3)));
  CHECK(!perf.clamp(Vec2(0.5, 0.5)));

  const PeriodicCellMesh holed = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 8);
  const PerforatedMacroMesh hp = build_perforated_macro(holed, 0.25);
  CHECK(mesh_area(hp.mesh) ==
        doctest::Approx(mesh_area(as_tri_mesh(holed))).epsilon(1e-13));

  CHECK(build_perforated_macro(cell, 1.0 / 3.0).reps == 3);
  CHECK_THROWS_AS(build_perforated_macro(cell, 0.3), ConfigError);
}

TEST_CASE("periodized material samples the fractional cell coordinate") {
  const MaterialField mat = layered_coupled();
  const MaterialField em = material_at_eps(mat, 0.25);
  CHECK(em.d(Vec2(0.1, 0.7)) == mat.d(Vec2(0.4, 0.8)));
  CHECK(em.d(Vec2(0.15, 0.0)) == mat.d(Vec2(0.6, 0.0)));
  CHECK(em.c(Vec2(0.9, 0.3)).voigt() == mat.c(Vec2(0.6, 0.2)).voigt());
  CHECK_THROWS_AS(material_at_eps(mat, 0.4), ConfigError);
}

TEST_CASE("zero loads give zero oscillating solutions") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 8);
  const PerforatedMacroMesh perf = build_perforated_macro(cell, 0.5);
  const MaterialField mat = layered_coupled();

  const EpsSolution mem = solve_eps_membrane(perf, mat, Loads{});
  CHECK(mem.u1.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(mem.u2.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(mem.phi.cwiseAbs().maxCoeff() <= 1e-14);

  const EpsSolution ben = solve_eps_bending(perf, mat, Loads{});
  CHECK(ben.u3.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("constant material matches the homogenized solve on the same mesh") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const PerforatedMacroMesh perf = build_perforated_macro(cell, 0.25);
  const MaterialField mat = constant_coupled();

  Loads loads;
  loads.q[0] = [](const Vec2& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  loads.q[1] = [](const Vec2& x) { return x.x() * (1.0 - x.y()); };
  loads.q[2] = [](const Vec2& x) { return std::sin(kPi * x.x()) * x.y(); };

  HomogenizedTensors tensors;
  const Vec2 y0(0.3, 0.3);
  tensors.cbar = mat.c(y0);
  tensors.ebar = mat.e(y0);
  tensors.fbar = mat.e(y0);
  tensors.dbar = mat.d(y0);
  tensors.cbar_bend = mat.bending(y0);
  tensors.ystar = 1.0;
  tensors.ystar_a = 1.0;

  MacroMesh mm;
  mm.mesh = perf.mesh;
  mm.clamp = on_boundary;
  mm.ground = on_boundary;

  const EpsSolution eps =
      solve_eps_membrane(perf, mat, loads);
  const MacroSolution hom =
      solve_homogenized_membrane(mm, tensors, loads, SurfaceChart::plane());
  CHECK((eps.u1 - hom.u1).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((eps.u2 - hom.u2).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((eps.phi - hom.phi).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(eps.energy == doctest::Approx(hom.energy).epsilon(1e-9));

  const EpsSolution beps = solve_eps_bending(perf, mat, loads);
  const MacroSolution bhom = solve_homogenized_bending(mm, tensors, loads);
  CHECK((beps.u3 - bhom.u3).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("reconstruction carries only the oscillatory part") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const EpsGrid grid = make_eps_grid(cell, 0.25);

  const auto strain_fn = [](const Vec2& x) {
    Mat2 s;
    s << x.x(), 0.1, 0.1, -x.y();
    return s;
  };
  const auto field_fn = [](const Vec2& x) { return Vec2(x.y(), 0.3 * x.x()); };

  // Constant coefficients: the correctors vanish, so the image does too.
  const MembraneCellSolutions flat = solve_membrane_cells(space, constant_coupled());
  const MembraneCorrector none =
      reconstruct_membrane_corrector(strain_fn, field_fn, space, flat, grid);
  CHECK(none.strain.values.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(none.field.values.cwiseAbs().maxCoeff() <= 1e-9);

  // Zero macro coefficients annihilate the image whatever the cell solutions.
  const MembraneCellSolutions lam = solve_membrane_cells(space, layered_coupled());
  const MembraneCorrector zero = reconstruct_membrane_corrector(
      [](const Vec2&) { return Mat2::Zero().eval(); },
      [](const Vec2&) { return Vec2::Zero().eval(); }, space, lam, grid);
  CHECK(zero.strain.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.field.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uniaxial strain image is the laminate profile") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const EpsGrid grid = make_eps_grid(cell, 0.5);

  MaterialField mat = constant_coupled();
  mat.e = [](const Vec2&) { return Tensor3(); };
  mat.d = [](const Vec2&) { return Mat2::Identity().eval(); };
  mat.c = [](const Vec2& y) {
    return lower_layer(y) ? Tensor4::isotropic(1.0, 1.0) : Tensor4::isotropic(2.0, 2.0);
  };
  const MembraneCellSolutions cells = solve_membrane_cells(space, mat);

  const MembraneCorrector corr = reconstruct_membrane_corrector(
      [](const Vec2&) { return unit_sym(0).eval(); },
      [](const Vec2&) { return Vec2::Zero().eval(); }, space, cells, grid);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < grid.num_micro(); ++q) {
      const double expected = lower_layer(grid.micro_points[q]) ? 1.0 / 3.0 : -1.0 / 3.0;
      CHECK(corr.strain.at(k, q, 0) == doctest::Approx(expected).epsilon(1e-8));
      CHECK(std::abs(corr.strain.at(k, q, 1)) <= 1e-8);
      CHECK(std::abs(corr.strain.at(k, q, 2)) <= 1e-8);
      CHECK(std::abs(corr.field.at(k, q, 0)) <= 1e-8);
    }
}

TEST_CASE("uniaxial field image is the diffusion corrector gradient") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const EpsGrid grid = make_eps_grid(cell, 0.5);

  MaterialField mat = constant_coupled();
  mat.e = [](const Vec2&) { return Tensor3(); };
  mat.c = [](const Vec2&) { return Tensor4::isotropic(1.0, 1.0); };
  mat.d = [](const Vec2& y) {
    return lower_layer(y) ? Mat2::Identity().eval() : (4.0 * Mat2::Identity()).eval();
  };
  const MembraneCellSolutions cells = solve_membrane_cells(space, mat);

  const MembraneCorrector corr = reconstruct_membrane_corrector(
      [](const Vec2&) { return Mat2::Zero().eval(); },
      [](const Vec2&) { return Vec2(1.0, 0.0); }, space, cells, grid);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < grid.num_micro(); ++q) {
      const double expected = lower_layer(grid.micro_points[q]) ? 0.6 : -0.6;
      CHECK(corr.field.at(k, q, 0) == doctest::Approx(expected).epsilon(1e-8));
      CHECK(std::abs(corr.field.at(k, q, 1)) <= 1e-8);
      CHECK(std::abs(corr.strain.at(k, q, 0)) <= 1e-8);
    }
}

TEST_CASE("mismatched cell space and grid layout is rejected") {
  const PeriodicCellMesh small = build_cell_mesh(HoleSpec::none(), 4);
  const PeriodicCellMesh big = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(big);
  const P2Space space(mesh);
  const MembraneCellSolutions cells = solve_membrane_cells(space, constant_coupled());
  const EpsGrid grid = make_eps_grid(small, 0.5);
  CHECK_THROWS_AS(reconstruct_membrane_corrector(
                      [](const Vec2&) { return Mat2::Zero().eval(); },
                      [](const Vec2&) { return Vec2::Zero().eval(); }, space,
                      cells, grid),
                  std::invalid_argument);
}

TEST_CASE("corrector errors shrink with the cell size") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 8);

  StudySetup setup;
  setup.cell = &cell;
  setup.mat = layered_coupled();
  setup.loads.q[0] = [](const Vec2&) { return 1.0; };
  setup.loads.q[1] = [](const Vec2&) { return 0.5; };
  setup.loads.q[2] = [](const Vec2&) { return 1.0; };
  setup.eps_list = {0.25, 0.5, 0.25};
  setup.macro_n = 16;

  const ConvergenceReport rep = run_convergence_study(setup);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].eps == 0.5);
  CHECK(rep.rows[1].eps == 0.25);

  CHECK(rep.rows[1].membrane_strain.corrected < rep.rows[0].membrane_strain.corrected);
  CHECK(rep.rows[1].membrane_field.corrected < rep.rows[0].membrane_field.corrected);
  CHECK(rep.rows[1].bending.corrected < rep.rows[0].bending.corrected);
  // At the coarsest eps the boundary layers can eat the corrector's gain, so
  // dominance over the plain ansatz is asserted at the finest cell size.
  const ConvergenceRow& fine = rep.rows.back();
  CHECK(fine.membrane_strain.corrected < fine.membrane_strain.plain);
  CHECK(fine.membrane_field.corrected < fine.membrane_field.plain);
  CHECK(fine.bending.corrected < fine.bending.plain);
  for (const ConvergenceRow& row : rep.rows) {
    CHECK(row.membrane_energy > 0.0);
    CHECK(row.bending_energy > 0.0);
  }
  CHECK(rep.macro_membrane_energy > 0.0);
  CHECK(rep.macro_bending_energy > 0.0);
  CHECK(rep.tensors.cbar.min_voigt_eigenvalue() > 0.0);

  StudySetup bad = setup;
  bad.cell = nullptr;
  CHECK_THROWS_AS(run_convergence_study(bad), ConfigError);
  bad = setup;
  bad.eps_list = {};
  CHECK_THROWS_AS(run_convergence_study(bad), ConfigError);
  bad = setup;
  bad.eps_list = {0.4};
  CHECK_THROWS_AS(run_convergence_study(bad), ConfigError);
}
