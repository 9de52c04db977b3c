#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "pzshell/tensors.hpp"

// Perforated periodic unit cell Y* = Y \ S as a conforming triangulation.
//
// The mesh comes from a structured n x n background grid.  Triangles
// meeting the hole are removed, the resulting cavity rim is projected onto
// the hole boundary, and the band in between is re-triangulated with a
// local max-min-angle diagonal choice.  Everything is deterministic, the
// outer boundary keeps the exact structured layout on all four sides, and
// vertices are ordered lexicographically.

namespace pzshell {

struct HoleSpec {
  enum class Shape { none, disk, ellipse, rectangle };

  Shape shape = Shape::none;
  Vec2 center = Vec2(0.5, 0.5);
  // disk: params(0) = radius.  ellipse: semi-axes.  rectangle: half-widths.
  Vec2 params = Vec2(0.0, 0.0);

  static HoleSpec none() { return {}; }
  static HoleSpec disk(const Vec2& c, double r) {
    return {Shape::disk, c, Vec2(r, r)};
  }
  static HoleSpec ellipse(const Vec2& c, double ax, double ay) {
    return {Shape::ellipse, c, Vec2(ax, ay)};
  }
  static HoleSpec rectangle(const Vec2& c, double hx, double hy) {
    return {Shape::rectangle, c, Vec2(hx, hy)};
  }
};

// Signed distance to the hole boundary, negative inside S.
double hole_signed_distance(const HoleSpec& hole, const Vec2& p);
// Closest point on the hole boundary.
Vec2 hole_project(const HoleSpec& hole, const Vec2& p);

struct PeriodicCellMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;  // lexicographic order
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;    // CCW
  // Edges whose endpoints both lie on the hole boundary polygon.
  std::vector<std::array<int, 2>> hole_boundary;
  // periodic_master[v]: canonical representative of v under the periodic
  // identification (vertex on {x=0}/{y=0}), or -1 when v is its own class.
  std::vector<int> periodic_master;
  int n = 0;
  double h = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }
  double triangle_area(int t) const {
    const Vec2 p0 = vertices.row(triangles(t, 0));
    const Vec2 p1 = vertices.row(triangles(t, 1));
    const Vec2 p2 = vertices.row(triangles(t, 2));
    return 0.5 * ((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
  }
};

PeriodicCellMesh build_cell_mesh(const HoleSpec& hole, int n);

// Quadrature value of the weighted cell measure |Y*|_a = int_{Y*} w(y) dy.
double cell_measure(const PeriodicCellMesh& mesh,
                    const std::function<double(const Vec2&)>& weight,
                    int quad_degree = 4);

inline double cell_measure(const PeriodicCellMesh& mesh) {
  return cell_measure(mesh, [](const Vec2&) { return 1.0; }, 1);
}

}  // namespace pzshell
