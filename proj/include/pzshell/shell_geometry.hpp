#pragma once

#include <array>

#include "pzshell/tensors.hpp"

// Differential geometry of the shell mid-surface chart.
//
// Charts are built-in analytic families with exact first and second
// derivatives.  Sign convention for the curvature tensor:
//
//   b_{ab} = a3 . d^2_{ab} phi
//
// with a3 the unit normal along a1 x a2, so spheres and cylinders carry
// b_{ab} <= 0 when the normal points outward.  Gamma^3_{ab} is identified
// with b_{ab}, which is how the transverse component v3 enters the
// membrane strain.

namespace pzshell {

struct SurfaceChart {
  enum class Kind { plane, cylinder, sphere_patch };

  Kind kind = Kind::plane;
  double radius = 1.0;  // used by cylinder and sphere_patch

  static SurfaceChart plane() { return {Kind::plane, 1.0}; }
  static SurfaceChart cylinder(double r) { return {Kind::cylinder, r}; }
  static SurfaceChart sphere_patch(double r) { return {Kind::sphere_patch, r}; }
};

struct SurfaceFrame {
  Vec3 a1, a2;    // tangent vectors d phi / d x_alpha
  Vec3 a3;        // unit normal
  double a;       // det(a_alpha . a_beta)
  double sqrt_a;  // sqrt(a)
};

struct GeometryCoefficients {
  // gamma[k](a, b) = Gamma^k_{ab}, k in {0,1,2}; gamma[2] equals b_cov.
  std::array<Mat2, 3> gamma;
  Mat2 b_mixed;  // b^r_a, row r (upper), column a (lower)
  Mat2 b_cov;    // b_{ab}
  Mat2 c_ab;     // third fundamental form c_{ab} = b^g_a b_{gb}
  // db_mixed[b](r, a) = d_b b^r_a.  Zero for every built-in chart (their
  // shape operators are constant mixed tensors) but kept in the strain
  // expression for completeness.
  std::array<Mat2, 2> db_mixed;
};

// phi(x) in R^3.
Vec3 chart_position(const SurfaceChart& chart, const Vec2& x);

SurfaceFrame frame_at(const SurfaceChart& chart, const Vec2& x);

GeometryCoefficients geometry_coeffs(const SurfaceChart& chart, const Vec2& x);

// Membrane strain gamma_{ab}(v) = s_{ab}(v) - Gamma^k_{ab} v_k.
// grad(a, b) = d_a v_b holds the in-plane gradient of (v1, v2).
Mat2 membrane_strain(const GeometryCoefficients& g, const Vec3& v, const Mat2& grad);

// Bending strain
//   Y_{ab}(v) = -( d^2_{ab} v3
//                  - v_r ( -d_b b^r_a + b^g_b Gamma^r_{ag} + Gamma^d_{ab} b^r_d )
//                  - c_{ab} v3
//                  + b^r_a d_b v_r
//                  - Gamma^d_{ab} d_d v3 ).
// grad(a, b) = d_a v_b as above; grad3 and hess3 are the gradient and
// Hessian of v3.
Mat2 bending_strain(const GeometryCoefficients& g, const Vec3& v, const Mat2& grad,
                    const Vec2& grad3, const Mat2& hess3);

}  // namespace pzshell
