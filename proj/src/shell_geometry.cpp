#include "pzshell/shell_geometry.hpp"

#include <cmath>

#include "pzshell/errors.hpp"

namespace pzshell {

namespace {

struct ChartJet {
  Vec3 phi;
  Vec3 d1, d2;        // first derivatives
  Vec3 d11, d12, d22; // second derivatives
};

ChartJet evaluate(const SurfaceChart& chart, const Vec2& x) {
  ChartJet j;
  switch (chart.kind) {
    case SurfaceChart::Kind::plane: {
      j.phi = Vec3(x(0), x(1), 0.0);
      j.d1 = Vec3(1, 0, 0);
      j.d2 = Vec3(0, 1, 0);
      j.d11 = j.d12 = j.d22 = Vec3::Zero();
      break;
    }
    case SurfaceChart::Kind::cylinder: {
      const double R = chart.radius;
      const double u = x(0) / R;
      const double cu = std::cos(u), su = std::sin(u);
      j.phi = Vec3(R * cu, R * su, x(1));
      j.d1 = Vec3(-su, cu, 0);
      j.d2 = Vec3(0, 0, 1);
      j.d11 = Vec3(-cu / R, -su / R, 0);
      j.d12 = Vec3::Zero();
      j.d22 = Vec3::Zero();
      break;
    }
    case SurfaceChart::Kind::sphere_patch: {
      // Geographic chart: arclength coordinates along the equator (x1)
      // and the meridian (x2); degenerates at the poles |x2| = pi R / 2.
      const double R = chart.radius;
      const double u = x(0) / R, v = x(1) / R;
      const double cu = std::cos(u), su = std::sin(u);
      const double cv = std::cos(v), sv = std::sin(v);
      j.phi = R * Vec3(cv * su, sv, cv * cu);
      j.d1 = Vec3(cv * cu, 0, -cv * su);
      j.d2 = Vec3(-sv * su, cv, -sv * cu);
      j.d11 = Vec3(-cv * su, 0, -cv * cu) / R;
      j.d12 = Vec3(-sv * cu, 0, sv * su) / R;
      j.d22 = Vec3(-cv * su, -sv, -cv * cu) / R;
      break;
    }
  }
  return j;
}

constexpr double kDegenerateTol = 1e-12;

}  // namespace

Vec3 chart_position(const SurfaceChart& chart, const Vec2& x) {
  return evaluate(chart, x).phi;
}

SurfaceFrame frame_at(const SurfaceChart& chart, const Vec2& x) {
  const ChartJet j = evaluate(chart, x);
  SurfaceFrame f;
  f.a1 = j.d1;
  f.a2 = j.d2;
  const Vec3 n = j.d1.cross(j.d2);
  const double nn = n.norm();
  Mat2 metric;
  metric << j.d1.dot(j.d1), j.d1.dot(j.d2), j.d2.dot(j.d1), j.d2.dot(j.d2);
  f.a = metric.determinant();
  if (nn <= kDegenerateTol || f.a <= kDegenerateTol)
    throw GeometryError("chart is degenerate at (" + std::to_string(x(0)) + ", " +
                        std::to_string(x(1)) + "): metric determinant " +
                        std::to_string(f.a));
  f.a3 = n / nn;
  f.sqrt_a = std::sqrt(f.a);
  return f;
}

GeometryCoefficients geometry_coeffs(const SurfaceChart& chart, const Vec2& x) {
  const ChartJet j = evaluate(chart, x);
  const SurfaceFrame f = frame_at(chart, x);

  Mat2 metric;
  metric << j.d1.dot(j.d1), j.d1.dot(j.d2), j.d2.dot(j.d1), j.d2.dot(j.d2);
  const Mat2 metric_inv = metric.inverse();

  const Vec3 dd[2][2] = {{j.d11, j.d12}, {j.d12, j.d22}};
  const Vec3 tang[2] = {j.d1, j.d2};

  GeometryCoefficients g;
  g.b_cov = Mat2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.b_cov(a, b) = f.a3.dot(dd[a][b]);

  // Gamma^s_{ab} = a^{st} (d^2_{ab} phi . a_t); Gamma^3_{ab} = b_{ab}.
  g.gamma[0] = Mat2::Zero();
  g.gamma[1] = Mat2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s) {
        double v = 0.0;
        for (int t = 0; t < 2; ++t) v += metric_inv(s, t) * dd[a][b].dot(tang[t]);
        g.gamma[s](a, b) = v;
      }
  g.gamma[2] = g.b_cov;

  g.b_mixed = metric_inv * g.b_cov;  // b^r_a = a^{rg} b_{ga}
  g.c_ab = g.b_cov * g.b_mixed;      // c_{ab} = b^g_a b_{gb} = b_{ag} b^g_b

  // All built-in charts have spatially constant shape operators.
  g.db_mixed[0] = Mat2::Zero();
  g.db_mixed[1] = Mat2::Zero();
  return g;
}

Mat2 membrane_strain(const GeometryCoefficients& g, const Vec3& v, const Mat2& grad) {
  Mat2 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double s = 0.5 * (grad(a, b) + grad(b, a));
      for (int k = 0; k < 3; ++k) s -= g.gamma[k](a, b) * v(k);
      out(a, b) = s;
    }
  return out;
}

Mat2 bending_strain(const GeometryCoefficients& g, const Vec3& v, const Mat2& grad,
                    const Vec2& grad3, const Mat2& hess3) {
  Mat2 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double t = hess3(a, b);
      for (int r = 0; r < 2; ++r) {
        double coef = -g.db_mixed[b](r, a);
        for (int c = 0; c < 2; ++c) coef += g.b_mixed(c, b) * g.gamma[r](a, c);
        for (int d = 0; d < 2; ++d) coef += g.gamma[d](a, b) * g.b_mixed(r, d);
        t -= v(r) * coef;
      }
      t -= g.c_ab(a, b) * v(2);
      for (int r = 0; r < 2; ++r) t += g.b_mixed(r, a) * grad(b, r);
      for (int d = 0; d < 2; ++d) t -= g.gamma[d](a, b) * grad3(d);
      out(a, b) = -t;
    }
  return out;
}

}  // namespace pzshell
