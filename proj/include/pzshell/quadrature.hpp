#pragma once

#include <vector>

#include "pzshell/errors.hpp"
#include "pzshell/tensors.hpp"

// Quadrature on the reference triangle {(0,0),(1,0),(0,1)} and on [-1,1].
//
// Triangle weights sum to 1; integrals are area * sum(w_q f(x_q)).

namespace pzshell {

struct QuadraturePoint {
  Vec2 xi;
  double w;
};

struct QuadratureRule {
  std::vector<QuadraturePoint> points;
  int degree = 0;
};

inline QuadratureRule triangle_rule(int degree) {
  QuadratureRule r;
  if (degree <= 1) {
    r.degree = 1;
    r.points = {{Vec2(1.0 / 3.0, 1.0 / 3.0), 1.0}};
  } else if (degree <= 2) {
    r.degree = 2;
    r.points = {{Vec2(0.5, 0.0), 1.0 / 3.0},
                {Vec2(0.5, 0.5), 1.0 / 3.0},
                {Vec2(0.0, 0.5), 1.0 / 3.0}};
  } else if (degree <= 4) {
    r.degree = 4;
    const double w1 = 0.223381589678011, a1 = 0.445948490915965;
    const double w2 = 0.109951743655322, a2 = 0.091576213509771;
    r.points = {{Vec2(a1, a1), w1},           {Vec2(1 - 2 * a1, a1), w1},
                {Vec2(a1, 1 - 2 * a1), w1},   {Vec2(a2, a2), w2},
                {Vec2(1 - 2 * a2, a2), w2},   {Vec2(a2, 1 - 2 * a2), w2}};
  } else if (degree <= 6) {
    r.degree = 6;
    const double w1 = 0.116786275726379, a1 = 0.249286745170910;
    const double w2 = 0.050844906370207, a2 = 0.063089014491502;
    const double w3 = 0.082851075618374;
    const double b1 = 0.310352451033785, b2 = 0.636502499121399;
    const double b3 = 1.0 - b1 - b2;
    r.points = {{Vec2(a1, a1), w1},         {Vec2(1 - 2 * a1, a1), w1},
                {Vec2(a1, 1 - 2 * a1), w1}, {Vec2(a2, a2), w2},
                {Vec2(1 - 2 * a2, a2), w2}, {Vec2(a2, 1 - 2 * a2), w2},
                {Vec2(b1, b2), w3},         {Vec2(b2, b1), w3},
                {Vec2(b1, b3), w3},         {Vec2(b3, b1), w3},
                {Vec2(b2, b3), w3},         {Vec2(b3, b2), w3}};
  } else {
    throw ConfigError("no triangle quadrature rule beyond degree 6");
  }
  return r;
}

struct GaussPoint {
  double x;
  double w;
};

// Gauss-Legendre on [-1, 1], exact through degree 2n-1.
inline std::vector<GaussPoint> gauss_legendre(int n) {
  switch (n) {
    case 1:
      return {{0.0, 2.0}};
    case 2: {
      const double x = 1.0 / std::sqrt(3.0);
      return {{-x, 1.0}, {x, 1.0}};
    }
    case 3: {
      const double x = std::sqrt(3.0 / 5.0);
      return {{-x, 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {x, 5.0 / 9.0}};
    }
    case 4: {
      const double x1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double x2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
      const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
      return {{-x2, w2}, {-x1, w1}, {x1, w1}, {x2, w2}};
    }
    case 5: {
      const double x1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double x2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      return {{-x2, w2}, {-x1, w1}, {0.0, 128.0 / 225.0}, {x1, w1}, {x2, w2}};
    }
    default:
      throw ConfigError("gauss_legendre supports 1..5 points");
  }
}

}  // namespace pzshell
