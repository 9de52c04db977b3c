#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "pzshell/shell_geometry.hpp"

using namespace pzshell;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Central difference of a vector field, exact field evaluations.
template <class F>
Vec3 central_diff(F&& f, const Vec2& x, int dir, double h) {
  Vec2 xp = x, xm = x;
  xp(dir) += h;
  xm(dir) -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

Mat2 random_sym(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 m;
  m << u(gen), u(gen), u(gen), u(gen);
  return sym(m);
}

}  // namespace

TEST_CASE("plane frame is the standard basis") {
  const SurfaceChart chart = SurfaceChart::plane();
  for (const Vec2& x : {Vec2(0, 0), Vec2(0.3, 0.7), Vec2(-2, 5)}) {
    const SurfaceFrame f = frame_at(chart, x);
    CHECK((f.a1 - Vec3(1, 0, 0)).norm() == 0.0);
    CHECK((f.a2 - Vec3(0, 1, 0)).norm() == 0.0);
    CHECK((f.a3 - Vec3(0, 0, 1)).norm() == 0.0);
    CHECK(f.a == 1.0);
    CHECK(f.sqrt_a == 1.0);
  }
}

TEST_CASE("cylinder frame has unit metric and radial normal") {
  const double R = 2.0;
  const SurfaceChart chart = SurfaceChart::cylinder(R);
  const Vec2 x(0.0, 0.5);
  const SurfaceFrame f = frame_at(chart, x);
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-14));
  // The axis is the z-axis, so the radial direction is the projection of
  // the position onto the xy-plane.
  Vec3 radial = chart_position(chart, x);
  radial(2) = 0.0;
  radial.normalize();
  CHECK((f.a3 - radial).norm() < 1e-14);
  CHECK(std::abs(f.a3.dot(f.a1)) < 1e-14);
  CHECK(std::abs(f.a3.dot(f.a2)) < 1e-14);
  CHECK(std::abs(f.a3.norm() - 1.0) < 1e-15);
}

TEST_CASE("sphere patch frame at the chart center") {
  const SurfaceChart chart = SurfaceChart::sphere_patch(1.0);
  const SurfaceFrame f = frame_at(chart, Vec2(0, 0));
  const Vec3 pos = chart_position(chart, Vec2(0, 0));
  CHECK(pos.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((f.a3 - pos).norm() < 1e-14);
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tangents match a finite-difference oracle on the chart") {
  const double h = 1e-5;
  for (const SurfaceChart& chart : {SurfaceChart::plane(), SurfaceChart::cylinder(2.0),
                                    SurfaceChart::sphere_patch(1.0)}) {
    for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(-0.4, 0.3), Vec2(0.25, -0.15)}) {
      const SurfaceFrame f = frame_at(chart, x);
      const auto pos = [&](const Vec2& p) { return chart_position(chart, p); };
      const Vec3 d1 = central_diff(pos, x, 0, h);
      const Vec3 d2 = central_diff(pos, x, 1, h);
      CHECK((d1 - f.a1).norm() / f.a1.norm() < 1e-8);
      CHECK((d2 - f.a2).norm() / f.a2.norm() < 1e-8);
    }
  }
}

TEST_CASE("coefficients satisfy the Gauss formula against differenced tangents") {
  // d_b a_a = Gamma^1_{ab} a1 + Gamma^2_{ab} a2 + b_ab a3, with the left
  // side obtained by central differences of the exact tangent fields.
  const double h = 1e-5;
  for (const SurfaceChart& chart : {SurfaceChart::cylinder(2.0), SurfaceChart::sphere_patch(1.0)}) {
    for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(-0.3, 0.35)}) {
      const SurfaceFrame f = frame_at(chart, x);
      const GeometryCoefficients g = geometry_coeffs(chart, x);
      for (int a = 0; a < 2; ++a) {
        const auto tangent = [&](const Vec2& p) {
          const SurfaceFrame fp = frame_at(chart, p);
          return a == 0 ? fp.a1 : fp.a2;
        };
        for (int b = 0; b < 2; ++b) {
          const Vec3 fd = central_diff(tangent, x, b, h);
          const Vec3 model =
              g.gamma[0](a, b) * f.a1 + g.gamma[1](a, b) * f.a2 + g.b_cov(a, b) * f.a3;
          CHECK((fd - model).norm() < 1e-8 * (1.0 + model.norm()));
        }
      }
    }
  }
}

TEST_CASE("plane coefficients vanish") {
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::plane(), Vec2(0.4, -0.2));
  for (int k = 0; k < 3; ++k) CHECK(g.gamma[k].norm() == 0.0);
  CHECK(g.b_cov.norm() == 0.0);
  CHECK(g.b_mixed.norm() == 0.0);
  CHECK(g.c_ab.norm() == 0.0);
}

TEST_CASE("cylinder curvature is 1/R in the angular direction") {
  const double R = 2.0;
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::cylinder(R), Vec2(0.7, 0.1));
  CHECK(std::abs(g.b_cov(0, 0)) == doctest::Approx(1.0 / R).epsilon(1e-13));
  CHECK(std::abs(g.b_cov(0, 1)) < 1e-14);
  CHECK(std::abs(g.b_cov(1, 0)) < 1e-14);
  CHECK(std::abs(g.b_cov(1, 1)) < 1e-14);
  CHECK(g.c_ab(0, 0) == doctest::Approx(1.0 / (R * R)).epsilon(1e-13));
  CHECK(std::abs(g.c_ab(0, 1)) < 1e-14);
  CHECK(std::abs(g.c_ab(1, 1)) < 1e-14);
}

TEST_CASE("sphere patch center has umbilic curvature") {
  const double R = 1.5;
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::sphere_patch(R), Vec2(0, 0));
  CHECK((g.b_mixed + Mat2::Identity() / R).norm() < 1e-13);
  CHECK((g.c_ab - Mat2::Identity() / (R * R)).norm() < 1e-13);
}

TEST_CASE("coefficient symmetries") {
  for (const SurfaceChart& chart : {SurfaceChart::cylinder(2.0), SurfaceChart::sphere_patch(1.0)}) {
    const GeometryCoefficients g = geometry_coeffs(chart, Vec2(0.2, 0.3));
    for (int k = 0; k < 3; ++k) CHECK((g.gamma[k] - g.gamma[k].transpose()).norm() < 1e-14);
    CHECK((g.b_cov - g.b_cov.transpose()).norm() < 1e-14);
    CHECK((g.c_ab - g.c_ab.transpose()).norm() < 1e-14);
  }
}

TEST_CASE("membrane strain on the plane is the symmetric gradient") {
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::plane(), Vec2(0.3, 0.7));
  // v = (x1, 0, 0): grad(a, b) = d_a v_b.
  Mat2 grad;
  grad << 1, 0, 0, 0;
  const Mat2 gam = membrane_strain(g, Vec3(0.3, 0, 0), grad);
  CHECK(gam(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(gam(0, 1)) < 1e-15);
  CHECK(std::abs(gam(1, 1)) < 1e-15);
}

TEST_CASE("rigid translation has zero membrane strain on the plane") {
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::plane(), Vec2(-0.2, 0.5));
  const Mat2 gam = membrane_strain(g, Vec3(0.7, -1.3, 2.4), Mat2::Zero());
  CHECK(gam.norm() == 0.0);
}

TEST_CASE("normal displacement on the cylinder strains through curvature") {
  const SurfaceChart chart = SurfaceChart::cylinder(2.0);
  const GeometryCoefficients g = geometry_coeffs(chart, Vec2(0.4, 0.6));
  const Mat2 gam = membrane_strain(g, Vec3(0, 0, 1), Mat2::Zero());
  CHECK((gam + g.b_cov).norm() < 1e-14);
}

TEST_CASE("bending strain on the plane is minus the Hessian") {
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::plane(), Vec2(0.5, 0.5));
  // v3 = x1^2 at x = (0.5, 0.5).
  Mat2 hess;
  hess << 2, 0, 0, 0;
  const Mat2 ups = bending_strain(g, Vec3(0, 0, 0.25), Mat2::Zero(), Vec2(1.0, 0.0), hess);
  CHECK(ups(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(std::abs(ups(0, 1)) < 1e-15);
  CHECK(std::abs(ups(1, 1)) < 1e-15);
}

TEST_CASE("affine transverse displacement bends the plane not at all") {
  const GeometryCoefficients g = geometry_coeffs(SurfaceChart::plane(), Vec2(0.1, 0.9));
  // v3 = 2 + 3 x1 - x2.
  const Mat2 ups =
      bending_strain(g, Vec3(0, 0, 2.0 + 0.3 - 0.9), Mat2::Zero(), Vec2(3.0, -1.0), Mat2::Zero());
  CHECK(ups.norm() == 0.0);
}

TEST_CASE("constant normal displacement on the cylinder bends through c_ab") {
  const SurfaceChart chart = SurfaceChart::cylinder(3.0);
  const GeometryCoefficients g = geometry_coeffs(chart, Vec2(0.25, -0.4));
  const Mat2 ups = bending_strain(g, Vec3(0, 0, 1), Mat2::Zero(), Vec2::Zero(), Mat2::Zero());
  CHECK((ups - g.c_ab).norm() < 1e-14);
}

TEST_CASE("strains are linear in the displacement") {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const SurfaceChart& chart : {SurfaceChart::plane(), SurfaceChart::cylinder(2.0),
                                    SurfaceChart::sphere_patch(1.0)}) {
    const GeometryCoefficients g = geometry_coeffs(chart, Vec2(0.2, 0.1));
    for (int rep = 0; rep < 4; ++rep) {
      const Vec3 v(u(gen), u(gen), u(gen)), w(u(gen), u(gen), u(gen));
      Mat2 gv, gw;
      gv << u(gen), u(gen), u(gen), u(gen);
      gw << u(gen), u(gen), u(gen), u(gen);
      const Vec2 d3v(u(gen), u(gen)), d3w(u(gen), u(gen));
      const Mat2 hv = random_sym(gen), hw = random_sym(gen);

      const Mat2 sum_m = membrane_strain(g, v + w, gv + gw);
      const Mat2 parts_m = membrane_strain(g, v, gv) + membrane_strain(g, w, gw);
      CHECK((sum_m - parts_m).norm() < 1e-14);

      const Mat2 sum_b = bending_strain(g, v + w, gv + gw, d3v + d3w, hv + hw);
      const Mat2 parts_b = bending_strain(g, v, gv, d3v, hv) + bending_strain(g, w, gw, d3w, hw);
      CHECK((sum_b - parts_b).norm() < 1e-13);
    }
  }
}

TEST_CASE("strains are symmetric matrices") {
  Mat2 grad;
  grad << 0.3, -0.7, 1.1, 0.2;
  // Membrane strain symmetrizes on every chart; the bending expression is
  // pointwise symmetric on flat charts only.
  const GeometryCoefficients gs = geometry_coeffs(SurfaceChart::sphere_patch(1.0), Vec2(0.3, 0.2));
  const Mat2 gam = membrane_strain(gs, Vec3(0.5, -0.2, 0.9), grad);
  CHECK((gam - gam.transpose()).norm() < 1e-14);
  Mat2 hess;
  hess << 1.2, 0.4, 0.4, -0.6;
  const GeometryCoefficients gp = geometry_coeffs(SurfaceChart::plane(), Vec2(0.3, 0.2));
  const Mat2 ups = bending_strain(gp, Vec3(0.5, -0.2, 0.9), grad, Vec2(0.1, -0.3), hess);
  CHECK((ups - ups.transpose()).norm() < 1e-14);
}

TEST_CASE("degenerate chart point raises a geometry error") {
  const double R = 1.0;
  const SurfaceChart chart = SurfaceChart::sphere_patch(R);
  CHECK_THROWS_AS(frame_at(chart, Vec2(0.0, kPi * R / 2.0)), GeometryError);
  CHECK_THROWS_AS(geometry_coeffs(chart, Vec2(0.0, kPi * R / 2.0)), GeometryError);
}
