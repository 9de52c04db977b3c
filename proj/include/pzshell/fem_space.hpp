#pragma once
// Quadratic Lagrange spaces on triangle meshes.
//
// Node numbering: vertex v is node v, edge e is node num_vertices()+e.
// Local nodes of a triangle: 0,1,2 are its vertices, 3 lies on edge (0,1),
// 4 on (1,2), 5 on (2,0).  Edges are numbered by lexicographic order of
// their sorted endpoint pair, so the numbering does not depend on
// traversal order.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "pzshell/cell_domain.hpp"
#include "pzshell/tensors.hpp"

namespace pzshell {

struct TriMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;  // CCW
  std::vector<int> region;           // per-triangle tag; empty means all 0
  std::vector<int> periodic_master;  // unit-cell meshes only; else empty

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }
  int region_of(int t) const { return region.empty() ? 0 : region[t]; }
  Vec2 vertex(int v) const { return vertices.row(v).transpose(); }
  double triangle_area(int t) const;
};

TriMesh as_tri_mesh(const PeriodicCellMesh& cell);

// Axis-aligned rectangle (0,lx) x (0,ly), nx*ny quads split along the
// SW-NE diagonal, both halves CCW.
TriMesh rectangle_mesh(double lx, double ly, int nx, int ny);

// reps x reps copies of the unit cell scaled to cover (0,1)^2.  Tiles are
// laid out row by row with the x index fastest, and each tile keeps the
// cell's triangle order, so global triangle t belongs to tile t/nt and is
// the copy of cell triangle t%nt; region stores that cell triangle index.
// Shared tile boundaries are conforming because the cell mesh keeps the
// full structured grid near its boundary.
TriMesh tile_cell(const PeriodicCellMesh& cell, int reps);

// Reference basis on the unit triangle, barycentric lambda0 = 1-xi-eta.
struct P2Basis {
  static Eigen::Matrix<double, 6, 1> values(const Vec2& xi);
  static Eigen::Matrix<double, 6, 2> gradients(const Vec2& xi);
  static const std::array<Mat2, 6>& hessians();  // constant per basis
};

struct ElementMap {
  Vec2 origin;
  Mat2 jac;    // columns p1-p0, p2-p0
  Mat2 inv_t;  // jac^{-T}
  double det;  // positive for CCW triangles

  Vec2 to_physical(const Vec2& xi) const { return origin + jac * xi; }
};

ElementMap element_map(const TriMesh& mesh, int t);

class P2Space {
 public:
  explicit P2Space(const TriMesh& mesh);

  const TriMesh& mesh() const { return *mesh_; }
  int num_vertices() const { return mesh_->num_vertices(); }
  int num_edges() const { return static_cast<int>(edges_.rows()); }
  int num_nodes() const { return num_vertices() + num_edges(); }
  int node(int t, int local) const { return elem_nodes_(t, local); }
  std::array<int, 2> edge_vertices(int e) const {
    return {edges_(e, 0), edges_(e, 1)};
  }
  int find_edge(int va, int vb) const;  // -1 if absent
  Vec2 node_coord(int node) const;

  // Periodic identification on unit-cell meshes: master node id for each
  // slave node, -1 for masters.  Empty when the mesh is not periodic.
  const std::vector<int>& node_master() const { return node_master_; }
  int resolve(int node) const {
    if (node_master_.empty() || node_master_[node] < 0) return node;
    return node_master_[node];
  }

 private:
  const TriMesh* mesh_;
  Eigen::Matrix<int, Eigen::Dynamic, 2> edges_;
  Eigen::Matrix<int, Eigen::Dynamic, 6> elem_nodes_;
  std::vector<int> node_master_;
};

struct FieldSpec {
  bool periodic = false;
  bool zero_mean = false;
  std::function<bool(const Vec2&)> dirichlet;  // on node coordinates
};

// Scalar fields over one P2 space, numbered field by field with
// ascending node ids; slaves share their master's unknown, Dirichlet
// nodes are eliminated, and each zero-mean field gets one Lagrange
// multiplier at the tail of the vector.
class DofMap {
 public:
  DofMap(const P2Space& space, std::vector<FieldSpec> fields);

  int num_fields() const { return static_cast<int>(fields_.size()); }
  int num_dofs() const { return num_dofs_; }
  int dof(int field, int node) const { return dofs_(node, field); }
  int mean_multiplier(int field) const { return mult_[field]; }

  // Solution values at every node of one field; Dirichlet nodes give 0.
  Eigen::VectorXd node_values(const Eigen::VectorXd& u, int field) const;

 private:
  const P2Space* space_;
  std::vector<FieldSpec> fields_;
  Eigen::MatrixXi dofs_;
  std::vector<int> mult_;
  int num_dofs_ = 0;
};

}  // namespace pzshell
