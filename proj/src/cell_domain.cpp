#include "pzshell/cell_domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pzshell/errors.hpp"
#include "pzshell/quadrature.hpp"

namespace pzshell {

namespace {

// Closest parameter on the ellipse (a cos t, b sin t) to a point folded
// into the first quadrant; safeguarded Newton on the stationarity
// condition g(t) = a p1 sin t - b p2 cos t - (a^2 - b^2) sin t cos t.
Vec2 ellipse_project_q1(double a, double b, double p1, double p2) {
  if (p1 < 1e-15 && p2 < 1e-15) return (a <= b) ? Vec2(a, 0.0) : Vec2(0.0, b);
  double lo = 0.0, hi = M_PI / 2.0;
  double t = std::atan2(a * p2, b * p1);
  for (int it = 0; it < 80; ++it) {
    const double c = std::cos(t), s = std::sin(t);
    const double g = a * p1 * s - b * p2 * c - (a * a - b * b) * s * c;
    if (g > 0)
      hi = t;
    else
      lo = t;
    const double dg = a * p1 * c + b * p2 * s - (a * a - b * b) * std::cos(2 * t);
    double tn = (std::abs(dg) > 1e-300) ? t - g / dg : 0.5 * (lo + hi);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) < 1e-16) {
      t = tn;
      break;
    }
    t = tn;
  }
  return Vec2(a * std::cos(t), b * std::sin(t));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double L2 = d.squaredNorm();
  const double t = (L2 > 0) ? std::clamp((p - a).dot(d) / L2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  auto cross = [](const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); };
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
  const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
  return !(has_neg && has_pos);
}

double point_triangle_distance(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  if (point_in_triangle(p, a, b, c)) return 0.0;
  return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                   point_segment_distance(p, c, a)});
}

// Strict overlap test between a triangle and the open hole.
bool triangle_meets_hole(const HoleSpec& hole, const Vec2& a, const Vec2& b, const Vec2& c) {
  constexpr double eps = 1e-12;
  switch (hole.shape) {
    case HoleSpec::Shape::none:
      return false;
    case HoleSpec::Shape::disk:
      return point_triangle_distance(hole.center, a, b, c) < hole.params(0) - eps;
    case HoleSpec::Shape::ellipse: {
      // Axis scaling maps the ellipse to the unit disk and preserves incidence.
      auto scale = [&](const Vec2& p) {
        return Vec2((p.x() - hole.center.x()) / hole.params(0),
                    (p.y() - hole.center.y()) / hole.params(1));
      };
      return point_triangle_distance(Vec2(0, 0), scale(a), scale(b), scale(c)) < 1.0 - eps;
    }
    case HoleSpec::Shape::rectangle: {
      // Separating axis test; touching along the boundary does not count.
      const Vec2 tri[3] = {a, b, c};
      std::vector<Vec2> axes = {Vec2(1, 0), Vec2(0, 1)};
      for (int i = 0; i < 3; ++i) {
        const Vec2 e = tri[(i + 1) % 3] - tri[i];
        if (e.norm() > 0) axes.push_back(Vec2(-e.y(), e.x()).normalized());
      }
      const Vec2 lo = hole.center - hole.params, hi = hole.center + hole.params;
      const Vec2 corners[4] = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
      for (const Vec2& ax : axes) {
        double tmin = 1e300, tmax = -1e300, rmin = 1e300, rmax = -1e300;
        for (const Vec2& p : tri) {
          tmin = std::min(tmin, ax.dot(p));
          tmax = std::max(tmax, ax.dot(p));
        }
        for (const Vec2& p : corners) {
          rmin = std::min(rmin, ax.dot(p));
          rmax = std::max(rmax, ax.dot(p));
        }
        if (tmin >= rmax - eps || rmin >= tmax - eps) return false;
      }
      return true;
    }
  }
  return false;
}

struct Builder {
  int n;
  double h;
  HoleSpec hole;

  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 2>> hole_edges;

  int vid(int i, int j) const { return j * (n + 1) + i; }

  void structured_grid() {
    verts.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        verts.push_back(Vec2(static_cast<double>(i) / n, static_cast<double>(j) / n));
    tris.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
        tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      }
  }

  double area(const std::array<int, 3>& t) const {
    const Vec2 e1 = verts[t[1]] - verts[t[0]], e2 = verts[t[2]] - verts[t[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }

  void carve_hole() {
    const double delta = 0.3 * h;
    std::vector<double> dist(verts.size());
    for (std::size_t v = 0; v < verts.size(); ++v)
      dist[v] = hole_signed_distance(hole, verts[v]);

    std::vector<std::array<int, 3>> kept;
    kept.reserve(tris.size());
    for (const auto& t : tris) {
      const bool near = dist[t[0]] < delta || dist[t[1]] < delta || dist[t[2]] < delta;
      if (near || triangle_meets_hole(hole, verts[t[0]], verts[t[1]], verts[t[2]])) continue;
      kept.push_back(t);
    }
    if (kept.size() == tris.size())
      throw ConfigError("hole removed no triangles; resolution cannot see it");
    tris.swap(kept);

    // Rim of the cavity: directed border edges that are not on the outer
    // square.  Kept triangles are CCW, so the hole lies to the right of
    // each directed rim edge.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : tris)
      for (int k = 0; k < 3; ++k) directed[{t[k], t[(k + 1) % 3]}] = 1;
    auto on_outer = [&](int v) {
      const Vec2& p = verts[v];
      return p.x() < 1e-12 || p.x() > 1 - 1e-12 || p.y() < 1e-12 || p.y() > 1 - 1e-12;
    };
    std::map<int, int> succ;
    for (const auto& [e, unused] : directed) {
      if (directed.count({e.second, e.first})) continue;
      if (on_outer(e.first) && on_outer(e.second)) continue;
      if (succ.count(e.first))
        throw ConfigError("cavity rim is pinched; refine the cell mesh");
      succ[e.first] = e.second;
    }
    if (succ.empty()) throw ConfigError("hole produced no cavity rim");

    std::vector<int> loop;
    const int start = succ.begin()->first;
    int cur = start;
    do {
      loop.push_back(cur);
      auto it = succ.find(cur);
      if (it == succ.end())
        throw ConfigError("cavity rim is not a closed loop; refine the cell mesh");
      cur = it->second;
    } while (cur != start && loop.size() <= succ.size());
    if (cur != start || loop.size() != succ.size())
      throw ConfigError("cavity rim is not a single loop; refine the cell mesh");

    zip_rim(loop);
  }

  // Projects the rim onto the hole boundary and triangulates the band.
  void zip_rim(const std::vector<int>& loop) {
    const int m = static_cast<int>(loop.size());
    const double merge_tol = 0.05 * h;

    std::vector<Vec2> proj(m);
    for (int i = 0; i < m; ++i) proj[i] = hole_project(hole, verts[loop[i]]);

    // Consecutive near-identical projections collapse to one polygon vertex.
    std::vector<int> poly_id(m, -1);
    std::vector<int> poly_vertex;
    for (int i = 0; i < m; ++i) {
      if (!poly_vertex.empty() &&
          (proj[i] - verts[poly_vertex.back()]).norm() < merge_tol) {
        poly_id[i] = poly_vertex.back();
        continue;
      }
      if (i == m - 1 && (proj[i] - verts[poly_vertex.front()]).norm() < merge_tol) {
        poly_id[i] = poly_vertex.front();
        continue;
      }
      verts.push_back(proj[i]);
      poly_id[i] = static_cast<int>(verts.size()) - 1;
      poly_vertex.push_back(poly_id[i]);
    }
    if (poly_vertex.size() < 3)
      throw ConfigError("hole boundary polygon degenerated; refine the cell mesh");

    auto push_checked = [&](int a, int b, int c) {
      const std::array<int, 3> t = {a, b, c};
      if (area(t) <= 1e-13) throw ConfigError("degenerate band triangle; refine the cell mesh");
      tris.push_back(t);
    };

    for (int i = 0; i < m; ++i) {
      const int vi = loop[i], vj = loop[(i + 1) % m];
      const int qi = poly_id[i], qj = poly_id[(i + 1) % m];
      if (qi == qj) {
        push_checked(vj, vi, qi);
        continue;
      }
      hole_edges.push_back({qi, qj});
      // Quad (vj, vi, qi, qj) in CCW order; pick the diagonal with the
      // better minimum angle (local Delaunay repair at construction).
      auto min_angle = [&](int a, int b, int c) {
        const Vec2 pa = verts[a], pb = verts[b], pc = verts[c];
        auto ang = [](const Vec2& u, const Vec2& v) {
          return std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
        };
        return std::min({ang(pb - pa, pc - pa), ang(pa - pb, pc - pb), ang(pa - pc, pb - pc)});
      };
      auto quality = [&](std::array<int, 3> t1, std::array<int, 3> t2) {
        if (area(t1) <= 1e-13 || area(t2) <= 1e-13) return -1.0;
        return std::min(min_angle(t1[0], t1[1], t1[2]), min_angle(t2[0], t2[1], t2[2]));
      };
      const double qa = quality({vj, vi, qi}, {vj, qi, qj});
      const double qb = quality({vi, qi, qj}, {vi, qj, vj});
      if (qa < 0 && qb < 0)
        throw ConfigError("degenerate band triangle; refine the cell mesh");
      if (qa >= qb) {
        push_checked(vj, vi, qi);
        push_checked(vj, qi, qj);
      } else {
        push_checked(vi, qi, qj);
        push_checked(vi, qj, vj);
      }
    }
  }

  PeriodicCellMesh finish() {
    // Drop unused vertices and order the rest lexicographically.
    std::vector<int> used(verts.size(), 0);
    for (const auto& t : tris)
      for (int v : t) used[v] = 1;
    std::vector<int> order;
    for (std::size_t v = 0; v < verts.size(); ++v)
      if (used[v]) order.push_back(static_cast<int>(v));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (verts[a].x() != verts[b].x()) return verts[a].x() < verts[b].x();
      return verts[a].y() < verts[b].y();
    });
    std::vector<int> remap(verts.size(), -1);
    for (std::size_t k = 0; k < order.size(); ++k) remap[order[k]] = static_cast<int>(k);

    PeriodicCellMesh mesh;
    mesh.n = n;
    mesh.h = h;
    mesh.vertices.resize(order.size(), 2);
    for (std::size_t k = 0; k < order.size(); ++k) mesh.vertices.row(k) = verts[order[k]];
    mesh.triangles.resize(tris.size(), 3);
    for (std::size_t t = 0; t < tris.size(); ++t)
      for (int k = 0; k < 3; ++k) mesh.triangles(t, k) = remap[tris[t][k]];
    for (auto e : hole_edges) mesh.hole_boundary.push_back({remap[e[0]], remap[e[1]]});

    // Periodic identification: (1, y) -> (0, y), (x, 1) -> (x, 0), and the
    // corner class collapses to (0, 0).  Boundary coordinates are exact
    // copies of the structured grid, so lookups are by value.
    std::map<std::pair<double, double>, int> coord_of;
    for (int v = 0; v < mesh.num_vertices(); ++v)
      coord_of[{mesh.vertices(v, 0), mesh.vertices(v, 1)}] = v;
    mesh.periodic_master.assign(mesh.num_vertices(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      double x = mesh.vertices(v, 0), y = mesh.vertices(v, 1);
      const bool sx = x > 1 - 1e-12, sy = y > 1 - 1e-12;
      if (!sx && !sy) continue;
      if (sx) x = 0.0;
      if (sy) y = 0.0;
      auto it = coord_of.find({x, y});
      if (it == coord_of.end())
        throw ConfigError("periodic partner missing; opposite edges do not match");
      mesh.periodic_master[v] = it->second;
    }

    for (int t = 0; t < mesh.num_triangles(); ++t)
      if (mesh.triangle_area(t) <= 1e-13)
        throw ConfigError("mesh has a non-positive triangle area");
    return mesh;
  }
};

}  // namespace

double hole_signed_distance(const HoleSpec& hole, const Vec2& p) {
  switch (hole.shape) {
    case HoleSpec::Shape::none:
      return 1e300;
    case HoleSpec::Shape::disk:
      return (p - hole.center).norm() - hole.params(0);
    case HoleSpec::Shape::ellipse: {
      const double a = hole.params(0), b = hole.params(1);
      const Vec2 q(std::abs(p.x() - hole.center.x()), std::abs(p.y() - hole.center.y()));
      const Vec2 cp = ellipse_project_q1(a, b, q.x(), q.y());
      const double level = (q.x() / a) * (q.x() / a) + (q.y() / b) * (q.y() / b) - 1.0;
      return (q - cp).norm() * (level < 0 ? -1.0 : 1.0);
    }
    case HoleSpec::Shape::rectangle: {
      const Vec2 q(std::abs(p.x() - hole.center.x()) - hole.params(0),
                   std::abs(p.y() - hole.center.y()) - hole.params(1));
      const Vec2 qp(std::max(q.x(), 0.0), std::max(q.y(), 0.0));
      return qp.norm() + std::min(std::max(q.x(), q.y()), 0.0);
    }
  }
  return 1e300;
}

Vec2 hole_project(const HoleSpec& hole, const Vec2& p) {
  switch (hole.shape) {
    case HoleSpec::Shape::none:
      throw ConfigError("cannot project onto an absent hole");
    case HoleSpec::Shape::disk: {
      const Vec2 d = p - hole.center;
      const double r = d.norm();
      if (r < 1e-15) return hole.center + Vec2(hole.params(0), 0);
      return hole.center + d * (hole.params(0) / r);
    }
    case HoleSpec::Shape::ellipse: {
      const Vec2 d = p - hole.center;
      const Vec2 cp = ellipse_project_q1(hole.params(0), hole.params(1), std::abs(d.x()),
                                         std::abs(d.y()));
      return hole.center + Vec2(std::copysign(cp.x(), d.x()), std::copysign(cp.y(), d.y()));
    }
    case HoleSpec::Shape::rectangle: {
      const Vec2 d = p - hole.center;
      const Vec2 q(std::abs(d.x()) - hole.params(0), std::abs(d.y()) - hole.params(1));
      Vec2 cp;
      if (q.x() > 0 || q.y() > 0) {
        cp = Vec2(std::clamp(std::abs(d.x()), 0.0, hole.params(0)),
                  std::clamp(std::abs(d.y()), 0.0, hole.params(1)));
      } else if (q.x() >= q.y()) {
        cp = Vec2(hole.params(0), std::abs(d.y()));
      } else {
        cp = Vec2(std::abs(d.x()), hole.params(1));
      }
      return hole.center + Vec2(std::copysign(cp.x(), d.x()), std::copysign(cp.y(), d.y()));
    }
  }
  return p;
}

PeriodicCellMesh build_cell_mesh(const HoleSpec& hole, int n) {
  if (n < 4) throw ConfigError("cell mesh needs n >= 4 subdivisions per side");
  const double h = 1.0 / n;

  if (hole.shape != HoleSpec::Shape::none) {
    if (!(hole.params.minCoeff() > 0))
      throw ConfigError("hole dimensions must be positive");
    // Bounding box of the closed hole.
    Vec2 lo = hole.center - hole.params, hi = hole.center + hole.params;
    if (!(lo.minCoeff() > 0 && hi.maxCoeff() < 1))
      throw ConfigError("hole must be strictly inside the unit cell");
    // One full layer of untouched cells along the outer boundary keeps the
    // periodic layout exact; small features below 2h are not resolvable.
    if (!(lo.minCoeff() >= 2 * h && hi.maxCoeff() <= 1 - 2 * h))
      throw ConfigError("insufficient clearance between hole and cell boundary at this resolution");
    double feature = hole.params.minCoeff();
    if (hole.shape == HoleSpec::Shape::ellipse) {
      const double amax = hole.params.maxCoeff(), amin = hole.params.minCoeff();
      feature = std::min(feature, amin * amin / amax);  // tightest curvature radius
    }
    if (feature < 2 * h)
      throw ConfigError("hole feature size below resolution; increase n");
  }

  Builder b{n, h, hole, {}, {}, {}};
  b.structured_grid();
  if (hole.shape != HoleSpec::Shape::none) b.carve_hole();
  return b.finish();
}

double cell_measure(const PeriodicCellMesh& mesh,
                    const std::function<double(const Vec2&)>& weight, int quad_degree) {
  const QuadratureRule rule = triangle_rule(quad_degree);
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 p0 = mesh.vertices.row(mesh.triangles(t, 0));
    const Vec2 p1 = mesh.vertices.row(mesh.triangles(t, 1));
    const Vec2 p2 = mesh.vertices.row(mesh.triangles(t, 2));
    const double A = mesh.triangle_area(t);
    for (const auto& q : rule.points) {
      const Vec2 x = p0 + q.xi(0) * (p1 - p0) + q.xi(1) * (p2 - p0);
      total += A * q.w * weight(x);
    }
  }
  return total;
}

}  // namespace pzshell
