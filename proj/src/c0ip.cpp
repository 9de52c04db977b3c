#include "pzshell/c0ip.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>

namespace pzshell {

namespace {

constexpr double kSideNudge = 1e-6;

Vec2 triangle_centroid(const TriMesh& mesh, int t) {
  return (mesh.vertex(mesh.triangles(t, 0)) + mesh.vertex(mesh.triangles(t, 1)) +
          mesh.vertex(mesh.triangles(t, 2))) /
         3.0;
}

}  // namespace

C0IPForm::C0IPForm(const P2Space& space, MomentTensorFn moment, double sigma)
    : space_(&space), moment_(std::move(moment)), sigma_(sigma), periodic_(true) {
  build_stencils(nullptr);
}

C0IPForm::C0IPForm(const P2Space& space, MomentTensorFn moment, double sigma,
                   std::function<bool(const Vec2&)> clamp)
    : space_(&space), moment_(std::move(moment)), sigma_(sigma), periodic_(false) {
  build_stencils(&clamp);
}

void C0IPForm::build_stencils(const std::function<bool(const Vec2&)>* clamp) {
  const TriMesh& mesh = space_->mesh();
  const int ne = space_->num_edges();
  const int nv = space_->num_vertices();

  std::vector<std::array<Side, 2>> incident(ne);
  std::vector<int> count(ne, 0);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int e = space_->node(t, 3 + k) - nv;
      if (count[e] < 2) incident[e][count[e]] = {t, k};
      ++count[e];
    }

  const auto edge_geometry = [&](const Side& s, Stencil& st) {
    const int va = mesh.triangles(s.tri, s.local);
    const int vb = mesh.triangles(s.tri, (s.local + 1) % 3);
    const Vec2 a = mesh.vertex(va), b = mesh.vertex(vb);
    const Vec2 d = b - a;
    st.length = d.norm();
    st.normal = Vec2(d.y(), -d.x()) / st.length;
  };

  for (int e = 0; e < ne; ++e) {
    const int master = periodic_ ? space_->node_master()[nv + e] : -1;
    if (master >= 0) {
      // Slave boundary edge: glue its triangle to the master edge's.
      const int em = master - nv;
      Stencil st;
      st.side[0] = incident[em][0];
      st.side[1] = incident[e][0];
      st.nsides = 2;
      edge_geometry(st.side[0], st);
      const Vec2 mid_m = space_->node_coord(master);
      const Vec2 mid_s = space_->node_coord(nv + e);
      st.shift = mid_s - mid_m;
      stencils_.push_back(st);
      continue;
    }
    if (count[e] == 2) {
      Stencil st;
      st.side[0] = incident[e][0];
      st.side[1] = incident[e][1];
      st.nsides = 2;
      st.shift = Vec2::Zero();
      edge_geometry(st.side[0], st);
      stencils_.push_back(st);
      continue;
    }
    if (!periodic_ && clamp && *clamp && (*clamp)(space_->node_coord(nv + e))) {
      Stencil st;
      st.side[0] = incident[e][0];
      st.nsides = 1;
      st.shift = Vec2::Zero();
      edge_geometry(st.side[0], st);
      stencils_.push_back(st);
    }
  }
}

Tensor4 C0IPForm::side_moment(const Side& s, const Vec2& x) const {
  const Vec2 c = triangle_centroid(space_->mesh(), s.tri);
  return moment_(x + kSideNudge * (c - x));
}

namespace {

// Shared per-quadrature-point edge data: one row per (side, local basis).
struct EdgeEval {
  double dn[2][6];   // normal derivatives
  double mnn[2][6];  // normal-normal material moments of the basis
  Tensor4 cm[2];     // side moment tensors
  double penalty;    // sigma-independent material magnitude
};

}  // namespace

void C0IPForm::add_bilinear(SparseSystem& sys, const DofMap& dofs,
                            int field) const {
  const TriMesh& mesh = space_->mesh();
  const QuadratureRule vol = triangle_rule(4);
  const auto edge_rule = gauss_legendre(3);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto hess = element_hessians(mesh, t);
    Tensor4 cbar;
    for (const auto& qp : element_quadrature(mesh, t, vol)) {
      Tensor4 c = moment_(qp.x);
      c *= qp.w;
      cbar += c;
    }
    for (int i = 0; i < 6; ++i) {
      const int ni = dofs.dof(field, space_->node(t, i));
      for (int j = 0; j < 6; ++j)
        sys.add(ni, dofs.dof(field, space_->node(t, j)),
                cbar.contract2(hess[i], hess[j]));
    }
  }

  for (const auto& st : stencils_) {
    ElementMap em[2];
    std::array<Mat2, 6> hess[2];
    for (int s = 0; s < st.nsides; ++s) {
      em[s] = element_map(mesh, st.side[s].tri);
      hess[s] = element_hessians(mesh, st.side[s].tri);
    }
    const int va = mesh.triangles(st.side[0].tri, st.side[0].local);
    const int vb = mesh.triangles(st.side[0].tri, (st.side[0].local + 1) % 3);
    const Vec2 a = mesh.vertex(va), b = mesh.vertex(vb);
    const double avg = st.nsides == 2 ? 0.5 : 1.0;

    for (const auto& gp : edge_rule) {
      const Vec2 x = 0.5 * (a + b) + 0.5 * gp.x * (b - a);
      const double w = 0.5 * st.length * gp.w;

      EdgeEval ev;
      ev.penalty = 0.0;
      for (int s = 0; s < st.nsides; ++s) {
        const Vec2 xs = s == 0 ? x : Vec2(x + st.shift);
        const Vec2 xi = em[s].inv_t.transpose() * (xs - em[s].origin);
        const Eigen::Matrix<double, 6, 2> grad =
            P2Basis::gradients(xi) * em[s].inv_t.transpose();
        ev.cm[s] = side_moment(st.side[s], xs);
        ev.penalty += avg * ev.cm[s].frobenius_norm();
        const double sgn = s == 0 ? 1.0 : -1.0;
        for (int i = 0; i < 6; ++i) {
          ev.dn[s][i] = sgn * grad.row(i).dot(st.normal);
          ev.mnn[s][i] = st.normal.dot(ev.cm[s].contract(hess[s][i]) * st.normal);
        }
      }

      const double pen = sigma_ * ev.penalty / st.length;
      for (int s = 0; s < st.nsides; ++s)
        for (int i = 0; i < 6; ++i) {
          const int ni = dofs.dof(field, space_->node(st.side[s].tri, i));
          for (int r = 0; r < st.nsides; ++r)
            for (int j = 0; j < 6; ++j) {
              const int nj = dofs.dof(field, space_->node(st.side[r].tri, j));
              const double v = -avg * ev.mnn[s][i] * ev.dn[r][j] -
                               avg * ev.mnn[r][j] * ev.dn[s][i] +
                               pen * ev.dn[s][i] * ev.dn[r][j];
              sys.add(ni, nj, w * v);
            }
        }
    }
  }
}

void C0IPForm::add_plane_load(SparseSystem& sys, const DofMap& dofs, int field,
                              const Mat2& hess_load) const {
  const TriMesh& mesh = space_->mesh();
  const QuadratureRule vol = triangle_rule(4);
  const auto edge_rule = gauss_legendre(3);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto hess = element_hessians(mesh, t);
    Tensor4 cbar;
    for (const auto& qp : element_quadrature(mesh, t, vol)) {
      Tensor4 c = moment_(qp.x);
      c *= qp.w;
      cbar += c;
    }
    for (int i = 0; i < 6; ++i)
      sys.add_rhs(dofs.dof(field, space_->node(t, i)),
                  -cbar.contract2(hess[i], hess_load));
  }

  for (const auto& st : stencils_) {
    ElementMap em[2];
    for (int s = 0; s < st.nsides; ++s) em[s] = element_map(mesh, st.side[s].tri);
    const int va = mesh.triangles(st.side[0].tri, st.side[0].local);
    const int vb = mesh.triangles(st.side[0].tri, (st.side[0].local + 1) % 3);
    const Vec2 a = mesh.vertex(va), b = mesh.vertex(vb);
    const double avg = st.nsides == 2 ? 0.5 : 1.0;

    for (const auto& gp : edge_rule) {
      const Vec2 x = 0.5 * (a + b) + 0.5 * gp.x * (b - a);
      const double w = 0.5 * st.length * gp.w;
      double mnn_load = 0.0;
      for (int s = 0; s < st.nsides; ++s) {
        const Vec2 xs = s == 0 ? x : Vec2(x + st.shift);
        mnn_load += avg * st.normal.dot(
                              side_moment(st.side[s], xs).contract(hess_load) *
                              st.normal);
      }
      for (int s = 0; s < st.nsides; ++s) {
        const Vec2 xs = s == 0 ? x : Vec2(x + st.shift);
        const Vec2 xi = em[s].inv_t.transpose() * (xs - em[s].origin);
        const Eigen::Matrix<double, 6, 2> grad =
            P2Basis::gradients(xi) * em[s].inv_t.transpose();
        const double sgn = s == 0 ? 1.0 : -1.0;
        for (int i = 0; i < 6; ++i)
          sys.add_rhs(dofs.dof(field, space_->node(st.side[s].tri, i)),
                      w * mnn_load * sgn * grad.row(i).dot(st.normal));
      }
    }
  }
}

double C0IPForm::pair_energy(const Eigen::VectorXd& u, const Mat2& eu,
                             const Eigen::VectorXd& v, const Mat2& ev) const {
  const TriMesh& mesh = space_->mesh();
  const QuadratureRule vol = triangle_rule(4);
  const auto edge_rule = gauss_legendre(3);
  double total = 0.0;

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto hess = element_hessians(mesh, t);
    Mat2 hu = eu, hv = ev;
    for (int i = 0; i < 6; ++i) {
      hu += u[space_->node(t, i)] * hess[i];
      hv += v[space_->node(t, i)] * hess[i];
    }
    Tensor4 cbar;
    for (const auto& qp : element_quadrature(mesh, t, vol)) {
      Tensor4 c = moment_(qp.x);
      c *= qp.w;
      cbar += c;
    }
    total += cbar.contract2(hu, hv);
  }

  for (const auto& st : stencils_) {
    ElementMap em[2];
    std::array<Mat2, 6> hess[2];
    for (int s = 0; s < st.nsides; ++s) {
      em[s] = element_map(mesh, st.side[s].tri);
      hess[s] = element_hessians(mesh, st.side[s].tri);
    }
    const int va = mesh.triangles(st.side[0].tri, st.side[0].local);
    const int vb = mesh.triangles(st.side[0].tri, (st.side[0].local + 1) % 3);
    const Vec2 a = mesh.vertex(va), b = mesh.vertex(vb);
    const double avg = st.nsides == 2 ? 0.5 : 1.0;

    for (const auto& gp : edge_rule) {
      const Vec2 x = 0.5 * (a + b) + 0.5 * gp.x * (b - a);
      const double w = 0.5 * st.length * gp.w;

      double ju = 0.0, jv = 0.0, mu = 0.0, mv = 0.0, mag = 0.0;
      for (int s = 0; s < st.nsides; ++s) {
        const Vec2 xs = s == 0 ? x : Vec2(x + st.shift);
        const Vec2 xi = em[s].inv_t.transpose() * (xs - em[s].origin);
        const Eigen::Matrix<double, 6, 2> grad =
            P2Basis::gradients(xi) * em[s].inv_t.transpose();
        Mat2 hus = eu, hvs = ev;
        double dnu = 0.0, dnv = 0.0;
        for (int i = 0; i < 6; ++i) {
          const int node = space_->node(st.side[s].tri, i);
          hus += u[node] * hess[s][i];
          hvs += v[node] * hess[s][i];
          const double dn = grad.row(i).dot(st.normal);
          dnu += u[node] * dn;
          dnv += v[node] * dn;
        }
        const Tensor4 cm = side_moment(st.side[s], xs);
        mag += avg * cm.frobenius_norm();
        mu += avg * st.normal.dot(cm.contract(hus) * st.normal);
        mv += avg * st.normal.dot(cm.contract(hvs) * st.normal);
        const double sgn = s == 0 ? 1.0 : -1.0;
        ju += sgn * dnu;
        jv += sgn * dnv;
      }
      total += w * (-mu * jv - mv * ju + sigma_ * mag / st.length * ju * jv);
    }
  }
  return total;
}

bool C0IPForm::penalty_stable(const DofMap& dofs, int field) const {
  SparseSystem sys(dofs.num_dofs());
  add_bilinear(sys, dofs, field);
  const Eigen::SparseMatrix<double> a = sys.matrix();

  // On a zero-mean field the form has the constant mode in its kernel, so
  // it is at best semidefinite; pinning one unknown removes exactly that
  // direction.  Multiplier slots carry no form entries and are dropped.
  std::vector<int> newid(a.rows(), 0);
  for (int f = 0; f < dofs.num_fields(); ++f) {
    const int m = dofs.mean_multiplier(f);
    if (m >= 0) newid[m] = -1;
  }
  if (dofs.mean_multiplier(field) >= 0)
    for (int nd = 0; nd < space_->num_nodes(); ++nd)
      if (const int d = dofs.dof(field, nd); d >= 0) {
        newid[d] = -1;
        break;
      }
  int n = 0;
  for (int i = 0; i < a.rows(); ++i)
    if (newid[i] == 0) newid[i] = n++;

  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < a.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it)
      if (newid[it.row()] >= 0 && newid[it.col()] >= 0)
        trip.emplace_back(newid[it.row()], newid[it.col()], it.value());
  Eigen::SparseMatrix<double> b(n, n);
  b.setFromTriplets(trip.begin(), trip.end());

  // The reduced form is positive definite exactly when the penalty
  // dominates the consistency terms, and a Cholesky factorization exists
  // exactly for positive definite matrices, so its success is the
  // mesh-size-independent stability test.
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(b);
  return llt.info() == Eigen::Success;
}

}  // namespace pzshell
