#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "pzshell/cell_domain.hpp"
#include "pzshell/fem_assembly.hpp"
#include "pzshell/fem_space.hpp"
#include "pzshell/micro_homogenizer.hpp"

using namespace pzshell;

namespace {

Tensor3 coupling_from_rows(double e11, double e12, double e13, double e21, double e22,
                           double e23) {
  Eigen::Matrix<double, 2, 3> v;
  v << e11, e12, e13, e21, e22, e23;
  return Tensor3::from_voigt(v);
}

MaterialField coupled_constant() {
  const Tensor4 c = Tensor4::isotropic(1.2, 0.8);
  const Tensor3 e = coupling_from_rows(0.4, -0.1, 0.2, 0.05, 0.3, -0.15);
  Mat2 d;
  d << 2.0, 0.3, 0.3, 1.5;
  return MaterialField::constant(c, e, d, Tensor4::isotropic(2.0, 1.0));
}

// Layer indicator along y1 with the interface at one half.
bool lower_layer(const Vec2& y) { return y.x() < 0.5; }

double h1_seminorm(const P2Space& space, const Eigen::VectorXd& nodes) {
  const TriMesh& mesh = space.mesh();
  const QuadratureRule rule = triangle_rule(4);
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const ElementQuadPoint& qp : element_quadrature(mesh, t, rule)) {
      Vec2 g = Vec2::Zero();
      for (int i = 0; i < 6; ++i) g += nodes[space.node(t, i)] * qp.grad.row(i).transpose();
      s += qp.w * g.squaredNorm();
    }
  return std::sqrt(s);
}

double broken_h2_seminorm(const P2Space& space, const Eigen::VectorXd& nodes) {
  const TriMesh& mesh = space.mesh();
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const std::array<Mat2, 6> hb = element_hessians(mesh, t);
    Mat2 h = Mat2::Zero();
    for (int i = 0; i < 6; ++i) h += nodes[space.node(t, i)] * hb[i];
    s += mesh.triangle_area(t) * h.squaredNorm();
  }
  return std::sqrt(s);
}

double tensor_distance(const HomogenizedTensors& a, const HomogenizedTensors& b) {
  double s = (a.cbar.voigt() - b.cbar.voigt()).norm();
  s += (a.dbar - b.dbar).norm();
  s += (a.ebar.voigt() - b.ebar.voigt()).norm();
  return s;
}

// Node lookup by coordinates, for symmetry mappings.
std::map<std::pair<long long, long long>, int> coord_index(const P2Space& space) {
  std::map<std::pair<long long, long long>, int> m;
  for (int nd = 0; nd < space.num_nodes(); ++nd) {
    const Vec2 p = space.node_coord(nd);
    m[{std::llround(p.x() * 1e9), std::llround(p.y() * 1e9)}] = nd;
  }
  return m;
}

}  // namespace

TEST_CASE("constant materials keep correctors at zero and return the inputs") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 16);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const MaterialField mat = coupled_constant();

  const CellResults res = homogenize_cell(space, mat);
  for (int v = 0; v < 3; ++v) {
    CHECK(h1_seminorm(space, res.membrane.w1[v]) <= 1e-9);
    CHECK(h1_seminorm(space, res.membrane.w2[v]) <= 1e-9);
    CHECK(h1_seminorm(space, res.membrane.zeta[v]) <= 1e-9);
    CHECK(broken_h2_seminorm(space, res.bending.w[v]) <= 1e-8);
  }
  for (int s = 0; s < 2; ++s) {
    CHECK(h1_seminorm(space, res.membrane.z1[s]) <= 1e-9);
    CHECK(h1_seminorm(space, res.membrane.z2[s]) <= 1e-9);
    CHECK(h1_seminorm(space, res.membrane.eta[s]) <= 1e-9);
  }

  const MaterialField ref = coupled_constant();
  const Vec2 origin(0.1, 0.1);
  CHECK((res.tensors.cbar.voigt() - ref.c(origin).voigt()).norm() <= 1e-9);
  CHECK((res.tensors.ebar.voigt() - ref.e(origin).voigt()).norm() <= 1e-9);
  CHECK((res.tensors.fbar.voigt() - ref.e(origin).voigt()).norm() <= 1e-9);
  CHECK((res.tensors.dbar - ref.d(origin)).norm() <= 1e-9);
  CHECK((res.tensors.cbar_bend.voigt() - ref.bending(origin).voigt()).norm() <= 1e-9);
  CHECK(res.tensors.ystar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.tensors.ystar_a == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("layered dielectric homogenizes to series and parallel means") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);

  MaterialField mat = coupled_constant();
  mat.e = [](const Vec2&) { return Tensor3(); };
  mat.c = [](const Vec2&) { return Tensor4::isotropic(1.0, 1.0); };
  mat.d = [](const Vec2& y) {
    return lower_layer(y) ? Mat2::Identity().eval() : (4.0 * Mat2::Identity()).eval();
  };

  const MembraneCellSolutions cells = solve_membrane_cells(space, mat);
  HomogenizedTensors tensors;
  assemble_membrane_tensors_direct(cells, space, mat, tensors);

  // Series (harmonic) across the layers, parallel (arithmetic) along them.
  CHECK(tensors.dbar(0, 0) == doctest::Approx(1.6).epsilon(1e-8));
  CHECK(tensors.dbar(1, 1) == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(std::abs(tensors.dbar(0, 1)) <= 1e-10);

  // Decoupling: electric drivers move no displacement.
  for (int s = 0; s < 2; ++s) {
    CHECK(cells.z1[s].cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(cells.z2[s].cwiseAbs().maxCoeff() <= 1e-10);
  }

  // The transverse potential corrector is inactive and the in-layer one is
  // the classic piecewise-linear diffusion corrector.
  CHECK(cells.eta[1].cwiseAbs().maxCoeff() <= 1e-10);
  const auto eta_exact = [](const Vec2& y) {
    return y.x() < 0.5 ? 0.6 * y.x() - 0.15 : 0.45 - 0.6 * y.x();
  };
  for (int nd = 0; nd < space.num_nodes(); ++nd)
    CHECK(cells.eta[0][nd] == doctest::Approx(eta_exact(space.node_coord(nd))).epsilon(1e-9));
}

TEST_CASE("layered elasticity matches the laminate closed form") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);

  MaterialField mat = coupled_constant();
  mat.e = [](const Vec2&) { return Tensor3(); };
  mat.d = [](const Vec2&) { return Mat2::Identity().eval(); };
  mat.c = [](const Vec2& y) {
    return lower_layer(y) ? Tensor4::isotropic(1.0, 1.0) : Tensor4::isotropic(2.0, 2.0);
  };

  const MembraneCellSolutions cells = solve_membrane_cells(space, mat);
  HomogenizedTensors tensors;
  assemble_membrane_tensors_direct(cells, space, mat, tensors);

  // Uniaxial stress continuity across layers with moduli lambda+2mu of 3
  // and 6: the 1111 entry is their harmonic mean, and the 1122 entry
  // follows from the constant lambda/(lambda+2mu) ratio of 1/3.
  CHECK(tensors.cbar(0, 0, 0, 0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(tensors.cbar(1, 1, 0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-8));

  for (int v = 0; v < 3; ++v) CHECK(cells.zeta[v].cwiseAbs().maxCoeff() <= 1e-10);

  // The 11 corrector is the piecewise-linear laminate profile.
  const auto w_exact = [](const Vec2& y) {
    return y.x() < 0.5 ? y.x() / 3.0 - 1.0 / 12.0 : 1.0 / 4.0 - y.x() / 3.0;
  };
  for (int nd = 0; nd < space.num_nodes(); ++nd) {
    CHECK(cells.w1[0][nd] == doctest::Approx(w_exact(space.node_coord(nd))).epsilon(1e-9));
    CHECK(std::abs(cells.w2[0][nd]) <= 1e-9);
  }
}

TEST_CASE("layered bending plate matches the one-dimensional closed form") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);

  // Shear-only moduli: the 22 and 12 drivers generate divergence-free
  // moment fields, so only the 11 corrector is active.
  MaterialField mat = coupled_constant();
  mat.bending = [](const Vec2& y) {
    return lower_layer(y) ? Tensor4::isotropic(0.0, 0.5) : Tensor4::isotropic(0.0, 1.0);
  };

  const BendingCellSolutions cells = solve_bending_cells(space, mat);
  CHECK(cells.w[1].cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(cells.w[2].cwiseAbs().maxCoeff() <= 1e-9);

  HomogenizedTensors tensors;
  assemble_bending_tensor(cells, space, mat, 20.0, tensors);

  // Moduli 2 mu of 1 and 2: harmonic mean across the layers for 1111,
  // arithmetic means for the passive entries.
  CHECK(tensors.cbar_bend(0, 0, 0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(tensors.cbar_bend(1, 1, 1, 1) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(tensors.cbar_bend(0, 1, 0, 1) == doctest::Approx(0.75).epsilon(1e-6));

  // Curvature of the active corrector is piecewise constant at +-1/3.
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const std::array<Mat2, 6> hb = element_hessians(mesh, t);
    Mat2 h = Mat2::Zero();
    for (int i = 0; i < 6; ++i) h += cells.w[0][space.node(t, i)] * hb[i];
    Vec2 centroid = Vec2::Zero();
    for (int k = 0; k < 3; ++k) centroid += mesh.vertex(mesh.triangles(t, k));
    centroid /= 3.0;
    const double expected = lower_layer(centroid) ? 1.0 / 3.0 : -1.0 / 3.0;
    CHECK(h(0, 0) == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("coupling tensor and its transpose agree") {
  for (const HoleSpec& hole : {HoleSpec::none(), HoleSpec::disk(Vec2(0.5, 0.5), 0.25)}) {
    const PeriodicCellMesh cell = build_cell_mesh(hole, 16);
    const TriMesh mesh = as_tri_mesh(cell);
    const P2Space space(mesh);

    MaterialField mat = coupled_constant();
    mat.e = [](const Vec2& y) {
      const double s = lower_layer(y) ? 1.0 : 0.5;
      return coupling_from_rows(0.4 * s, -0.1, 0.2 * s, 0.05, 0.3 * s, -0.15);
    };

    const MembraneCellSolutions cells = solve_membrane_cells(space, mat);
    HomogenizedTensors tensors;
    assemble_membrane_tensors_direct(cells, space, mat, tensors);
    const double gap = (tensors.ebar.voigt() - tensors.fbar.voigt()).norm();
    CHECK(gap <= 1e-9 * tensors.ebar.voigt().norm());
  }
}

TEST_CASE("direct and energy assembly paths coincide") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 16);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);

  MaterialField mat = coupled_constant();
  mat.c = [](const Vec2& y) {
    return lower_layer(y) ? Tensor4::isotropic(1.2, 0.8) : Tensor4::isotropic(2.0, 1.1);
  };
  mat.sqrt_a = [](const Vec2& y) { return 1.0 + 0.25 * std::sin(2.0 * y.x()) * std::cos(y.y()); };

  const CellResults res = homogenize_cell(space, mat);
  CHECK((res.tensors.cbar.voigt() - res.tensors.cbar_energy.voigt()).norm() <=
        1e-8 * res.tensors.cbar.voigt().norm());
  CHECK((res.tensors.dbar - res.tensors.dbar_energy).norm() <= 1e-8 * res.tensors.dbar.norm());
  CHECK((res.tensors.cbar_bend.voigt() - res.tensors.cbar_bend_energy.voigt()).norm() <=
        1e-8 * res.tensors.cbar_bend.voigt().norm());

  CHECK(res.tensors.cbar_energy.has_major_symmetry(1e-12 * res.tensors.cbar.voigt().norm()));
  CHECK(res.tensors.cbar_bend_energy.has_major_symmetry(
      1e-12 * res.tensors.cbar_bend.voigt().norm()));
  CHECK(std::abs(res.tensors.dbar_energy(0, 1) - res.tensors.dbar_energy(1, 0)) <=
        1e-12 * res.tensors.dbar.norm());

  const SpdReport spd = spd_report(res.tensors);
  CHECK(spd.cbar_min > 1e-6);
  CHECK(spd.dbar_min > 1e-6);
  CHECK(spd.bending_min > 1e-6);
}

TEST_CASE("material scaling scales tensors and fixes solutions") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const MaterialField mat = coupled_constant();
  const MaterialField big = mat.scaled(7.0);

  const CellResults a = homogenize_cell(space, mat);
  const CellResults b = homogenize_cell(space, big);

  for (int v = 0; v < 3; ++v) {
    CHECK((a.membrane.w1[v] - b.membrane.w1[v]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((a.membrane.zeta[v] - b.membrane.zeta[v]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((a.bending.w[v] - b.bending.w[v]).cwiseAbs().maxCoeff() <= 1e-12);
  }
  for (int s = 0; s < 2; ++s)
    CHECK((a.membrane.eta[s] - b.membrane.eta[s]).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK((b.tensors.cbar.voigt() - 7.0 * a.tensors.cbar.voigt()).norm() <=
        1e-10 * b.tensors.cbar.voigt().norm());
  CHECK((b.tensors.ebar.voigt() - 7.0 * a.tensors.ebar.voigt()).norm() <=
        1e-10 * b.tensors.ebar.voigt().norm());
  CHECK((b.tensors.dbar - 7.0 * a.tensors.dbar).norm() <= 1e-10 * b.tensors.dbar.norm());
  CHECK((b.tensors.cbar_bend.voigt() - 7.0 * a.tensors.cbar_bend.voigt()).norm() <=
        1e-10 * b.tensors.cbar_bend.voigt().norm());
}

TEST_CASE("shrinking the hole recovers the full cell") {
  MaterialField mat = coupled_constant();
  mat.e = [](const Vec2&) { return Tensor3(); };

  const auto membrane_tensors = [&](const HoleSpec& hole, int n) {
    const PeriodicCellMesh cell = build_cell_mesh(hole, n);
    const TriMesh mesh = as_tri_mesh(cell);
    const P2Space space(mesh);
    const MembraneCellSolutions cells = solve_membrane_cells(space, mat);
    HomogenizedTensors t;
    assemble_membrane_tensors_direct(cells, space, mat, t);
    return t;
  };

  const HomogenizedTensors full = membrane_tensors(HoleSpec::none(), 16);
  double prev = -1.0;
  for (double r : {0.3, 0.2, 0.15}) {
    const HomogenizedTensors t = membrane_tensors(HoleSpec::disk(Vec2(0.5, 0.5), r), 16);
    const double dist = tensor_distance(t, full);
    if (prev > 0.0) CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("symmetric hole with isotropic materials maps correctors") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 16);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);

  MaterialField mat = coupled_constant();
  mat.e = [](const Vec2&) { return Tensor3(); };
  mat.d = [](const Vec2&) { return Mat2::Identity().eval(); };

  const CellResults res = homogenize_cell(space, mat);
  const auto index = coord_index(space);
  for (int nd = 0; nd < space.num_nodes(); ++nd) {
    const Vec2 p = space.node_coord(nd);
    const auto it = index.find({std::llround(p.y() * 1e9), std::llround(p.x() * 1e9)});
    REQUIRE(it != index.end());
    const int swapped = it->second;
    // Swapping coordinates exchanges the 11 and 22 problems and the two
    // displacement components.
    CHECK(res.membrane.w1[0][nd] == doctest::Approx(res.membrane.w2[1][swapped]).epsilon(1e-8));
    CHECK(res.membrane.w2[0][nd] == doctest::Approx(res.membrane.w1[1][swapped]).epsilon(1e-8));
    CHECK(res.bending.w[0][nd] == doctest::Approx(res.bending.w[1][swapped]).epsilon(1e-8));
  }
}

TEST_CASE("voigt views round trip") {
  std::mt19937 gen(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = u(gen);
  const Tensor4 c = Tensor4::from_voigt(v);
  CHECK((c.voigt() - v).norm() < 1e-15);
  Mat2 x;
  x << 0.7, -0.2, -0.2, 1.1;
  // Contraction through the Voigt view with doubled shear column.
  const Vec3 coeffs = sym_coeffs(x);
  const Mat2 direct = c.contract(x);
  for (int i = 0; i < 3; ++i) {
    const double via_voigt = v.row(i).dot(coeffs);
    CHECK(direct(kVoigtPairs[i][0], kVoigtPairs[i][1]) ==
          doctest::Approx(via_voigt).epsilon(1e-13));
  }
}

TEST_CASE("material validation names the violated property") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const QuadratureRule rule = triangle_rule(4);

  MaterialField good = coupled_constant();
  CHECK_NOTHROW(validate_material(good, space, rule));

  MaterialField bad_d = coupled_constant();
  bad_d.d = [](const Vec2&) {
    Mat2 d;
    d << 1.0, 2.0, 2.0, 1.0;
    return d;
  };
  CHECK_THROWS_AS(validate_material(bad_d, space, rule), MaterialError);

  MaterialField bad_a = coupled_constant();
  bad_a.sqrt_a = [](const Vec2&) { return -1.0; };
  CHECK_THROWS_AS(validate_material(bad_a, space, rule), MaterialError);

  MaterialField bad_c = coupled_constant();
  bad_c.c = [](const Vec2&) {
    Tensor4 c = Tensor4::isotropic(1.0, 1.0);
    c(0, 1, 0, 0) = 5.0;
    return c;
  };
  CHECK_THROWS_AS(validate_material(bad_c, space, rule), MaterialError);
}

TEST_CASE("unstable bending penalty is rejected") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const TriMesh mesh = as_tri_mesh(cell);
  const P2Space space(mesh);
  const MaterialField mat = coupled_constant();
  CHECK_THROWS_AS(solve_bending_cells(space, mat, 1e-12), ConfigError);
}
