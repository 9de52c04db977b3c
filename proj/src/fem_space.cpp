#include "pzshell/fem_space.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "pzshell/errors.hpp"

namespace pzshell {

double TriMesh::triangle_area(int t) const {
  const Vec2 e1 = vertex(triangles(t, 1)) - vertex(triangles(t, 0));
  const Vec2 e2 = vertex(triangles(t, 2)) - vertex(triangles(t, 0));
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

TriMesh as_tri_mesh(const PeriodicCellMesh& cell) {
  TriMesh m;
  m.vertices = cell.vertices;
  m.triangles = cell.triangles;
  m.periodic_master = cell.periodic_master;
  return m;
}

TriMesh rectangle_mesh(double lx, double ly, int nx, int ny) {
  if (lx <= 0 || ly <= 0 || nx < 1 || ny < 1)
    throw ConfigError("rectangle mesh needs positive extents and counts");
  TriMesh m;
  m.vertices.resize((nx + 1) * (ny + 1), 2);
  const auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      m.vertices(vid(i, j), 0) = lx * static_cast<double>(i) / nx;
      m.vertices(vid(i, j), 1) = ly * static_cast<double>(j) / ny;
    }
  m.triangles.resize(2 * nx * ny, 3);
  int t = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.triangles.row(t++) << vid(i, j), vid(i + 1, j), vid(i + 1, j + 1);
      m.triangles.row(t++) << vid(i, j), vid(i + 1, j + 1), vid(i, j + 1);
    }
  return m;
}

TriMesh tile_cell(const PeriodicCellMesh& cell, int reps) {
  if (reps < 1) throw ConfigError("tile count must be at least 1");
  const int nt = cell.num_triangles();
  TriMesh m;
  m.triangles.resize(nt * reps * reps, 3);
  m.region.resize(nt * reps * reps);

  // Coordinates (v + k)/reps agree bitwise across tile boundaries: the
  // shared vertices have cell coordinate exactly 0 or 1, so v + k is an
  // exact small integer on both sides.
  std::map<std::pair<double, double>, int> seen;
  std::vector<double> xs, ys;
  int tglob = 0;
  for (int k2 = 0; k2 < reps; ++k2)
    for (int k1 = 0; k1 < reps; ++k1) {
      std::vector<int> local(cell.num_vertices());
      for (int v = 0; v < cell.num_vertices(); ++v) {
        const double x = (cell.vertices(v, 0) + k1) / reps;
        const double y = (cell.vertices(v, 1) + k2) / reps;
        auto [it, fresh] = seen.try_emplace({x, y}, static_cast<int>(xs.size()));
        if (fresh) {
          xs.push_back(x);
          ys.push_back(y);
        }
        local[v] = it->second;
      }
      for (int t = 0; t < nt; ++t) {
        m.triangles.row(tglob) << local[cell.triangles(t, 0)],
            local[cell.triangles(t, 1)], local[cell.triangles(t, 2)];
        m.region[tglob++] = t;
      }
    }
  m.vertices.resize(static_cast<int>(xs.size()), 2);
  for (std::size_t v = 0; v < xs.size(); ++v) {
    m.vertices(static_cast<int>(v), 0) = xs[v];
    m.vertices(static_cast<int>(v), 1) = ys[v];
  }
  return m;
}

Eigen::Matrix<double, 6, 1> P2Basis::values(const Vec2& xi) {
  const double l1 = xi.x(), l2 = xi.y(), l0 = 1.0 - l1 - l2;
  Eigen::Matrix<double, 6, 1> n;
  n << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1,
      4 * l1 * l2, 4 * l2 * l0;
  return n;
}

Eigen::Matrix<double, 6, 2> P2Basis::gradients(const Vec2& xi) {
  const double l1 = xi.x(), l2 = xi.y(), l0 = 1.0 - l1 - l2;
  Eigen::Matrix<double, 6, 2> g;
  g << 1 - 4 * l0, 1 - 4 * l0,
      4 * l1 - 1, 0,
      0, 4 * l2 - 1,
      4 * (l0 - l1), -4 * l1,
      4 * l2, 4 * l1,
      -4 * l2, 4 * (l0 - l2);
  return g;
}

const std::array<Mat2, 6>& P2Basis::hessians() {
  static const std::array<Mat2, 6> h = [] {
    std::array<Mat2, 6> a;
    a[0] << 4, 4, 4, 4;
    a[1] << 4, 0, 0, 0;
    a[2] << 0, 0, 0, 4;
    a[3] << -8, -4, -4, 0;
    a[4] << 0, 4, 4, 0;
    a[5] << 0, -4, -4, -8;
    return a;
  }();
  return h;
}

ElementMap element_map(const TriMesh& mesh, int t) {
  ElementMap em;
  em.origin = mesh.vertex(mesh.triangles(t, 0));
  em.jac.col(0) = mesh.vertex(mesh.triangles(t, 1)) - em.origin;
  em.jac.col(1) = mesh.vertex(mesh.triangles(t, 2)) - em.origin;
  em.det = em.jac.determinant();
  Mat2 inv;
  inv << em.jac(1, 1), -em.jac(0, 1), -em.jac(1, 0), em.jac(0, 0);
  em.inv_t = inv.transpose() / em.det;
  return em;
}

namespace {

constexpr double kBoundaryTol = 1e-12;

std::pair<int, int> sorted_pair(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

P2Space::P2Space(const TriMesh& mesh) : mesh_(&mesh) {
  const int nt = mesh.num_triangles();
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(3 * nt);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k)
      pairs.push_back(sorted_pair(mesh.triangles(t, k), mesh.triangles(t, (k + 1) % 3)));
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  edges_.resize(static_cast<int>(pairs.size()), 2);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    edges_(static_cast<int>(e), 0) = pairs[e].first;
    edges_(static_cast<int>(e), 1) = pairs[e].second;
  }

  const auto edge_id = [&](int a, int b) {
    const auto it = std::lower_bound(pairs.begin(), pairs.end(), sorted_pair(a, b));
    return static_cast<int>(it - pairs.begin());
  };
  elem_nodes_.resize(nt, 6);
  const int nv = mesh.num_vertices();
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) elem_nodes_(t, k) = mesh.triangles(t, k);
    for (int k = 0; k < 3; ++k)
      elem_nodes_(t, 3 + k) =
          nv + edge_id(mesh.triangles(t, k), mesh.triangles(t, (k + 1) % 3));
  }

  if (mesh.periodic_master.empty()) return;

  node_master_.assign(num_nodes(), -1);
  for (int v = 0; v < nv; ++v) node_master_[v] = mesh.periodic_master[v];

  // Slave boundary edges pair with their translate one period away, found
  // through the translated endpoint coordinates (the corner-class vertex
  // master is not the right endpoint for edges along y = 1).
  std::map<std::pair<double, double>, int> at;
  for (int v = 0; v < nv; ++v) {
    const Vec2 p = mesh.vertex(v);
    if (p.x() < kBoundaryTol || p.y() < kBoundaryTol) at[{p.x(), p.y()}] = v;
  }
  const auto translated_vertex = [&](const Vec2& p, bool along_x) {
    const auto it = along_x ? at.find({0.0, p.y()}) : at.find({p.x(), 0.0});
    if (it == at.end())
      throw std::logic_error("periodic partner vertex missing");
    return it->second;
  };
  for (int e = 0; e < num_edges(); ++e) {
    const Vec2 pa = mesh.vertex(edges_(e, 0)), pb = mesh.vertex(edges_(e, 1));
    const bool on_x = pa.x() > 1 - kBoundaryTol && pb.x() > 1 - kBoundaryTol;
    const bool on_y = pa.y() > 1 - kBoundaryTol && pb.y() > 1 - kBoundaryTol;
    if (!on_x && !on_y) continue;
    const int ma = translated_vertex(pa, on_x), mb = translated_vertex(pb, on_x);
    const auto it =
        std::lower_bound(pairs.begin(), pairs.end(), sorted_pair(ma, mb));
    if (it == pairs.end() || *it != sorted_pair(ma, mb))
      throw std::logic_error("periodic partner edge missing");
    node_master_[nv + e] = nv + static_cast<int>(it - pairs.begin());
  }
}

int P2Space::find_edge(int va, int vb) const {
  const auto key = sorted_pair(va, vb);
  int lo = 0, hi = num_edges();
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    const auto cur = std::make_pair(edges_(mid, 0), edges_(mid, 1));
    if (cur < key)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < num_edges() && edges_(lo, 0) == key.first && edges_(lo, 1) == key.second)
    return lo;
  return -1;
}

Vec2 P2Space::node_coord(int node) const {
  const int nv = num_vertices();
  if (node < nv) return mesh_->vertex(node);
  const int e = node - nv;
  return 0.5 * (mesh_->vertex(edges_(e, 0)) + mesh_->vertex(edges_(e, 1)));
}

DofMap::DofMap(const P2Space& space, std::vector<FieldSpec> fields)
    : space_(&space), fields_(std::move(fields)) {
  const int nn = space.num_nodes();
  const int nf = num_fields();
  dofs_.setConstant(nn, nf, -1);
  mult_.assign(nf, -1);

  int next = 0;
  for (int f = 0; f < nf; ++f) {
    const auto& spec = fields_[f];
    for (int node = 0; node < nn; ++node) {
      const int master = spec.periodic ? space.resolve(node) : node;
      if (master != node) continue;
      if (spec.dirichlet && spec.dirichlet(space.node_coord(node))) continue;
      dofs_(node, f) = next++;
    }
    if (spec.periodic)
      for (int node = 0; node < nn; ++node) {
        const int master = space.resolve(node);
        if (master != node) dofs_(node, f) = dofs_(master, f);
      }
  }
  for (int f = 0; f < nf; ++f)
    if (fields_[f].zero_mean) mult_[f] = next++;
  num_dofs_ = next;
}

Eigen::VectorXd DofMap::node_values(const Eigen::VectorXd& u, int field) const {
  Eigen::VectorXd out(space_->num_nodes());
  for (int node = 0; node < space_->num_nodes(); ++node) {
    const int d = dofs_(node, field);
    out[node] = d < 0 ? 0.0 : u[d];
  }
  return out;
}

}  // namespace pzshell
