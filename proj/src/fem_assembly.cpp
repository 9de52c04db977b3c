#include "pzshell/fem_assembly.hpp"

#include <Eigen/SparseLU>

#include <sstream>

#include "pzshell/errors.hpp"

namespace pzshell {

Eigen::SparseMatrix<double> SparseSystem::matrix() const {
  Eigen::SparseMatrix<double> a(n_, n_);
  a.setFromTriplets(trip_.begin(), trip_.end());
  return a;
}

Eigen::VectorXd SparseSystem::solve(double tol) const {
  return Factorization(matrix()).solve(rhs_, tol);
}

Factorization::Factorization(Eigen::SparseMatrix<double> a) : a_(std::move(a)) {
  a_.makeCompressed();
  lu_.analyzePattern(a_);
  lu_.factorize(a_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("sparse LU factorization failed: " + lu_.lastErrorMessage());
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& rhs,
                                     double tol) const {
  Eigen::VectorXd x = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
  // Iterative refinement recovers the last digits on ill-conditioned
  // plate systems; a few passes leave the residual at roundoff level.
  double res = (a_ * x - rhs).norm();
  const auto goal = [&] { return tol * (a_.norm() * x.norm() + rhs.norm()); };
  for (int pass = 0; pass < 4 && !(res <= goal()); ++pass) {
    x += lu_.solve(rhs - a_ * x);
    res = (a_ * x - rhs).norm();
  }
  const double goal_final = goal();
  if (!(res <= goal_final)) {
    std::ostringstream msg;
    msg << "linear solve residual " << res << " exceeds tolerance";
    throw SolverError(msg.str());
  }
  return x;
}

std::vector<ElementQuadPoint> element_quadrature(const TriMesh& mesh, int t,
                                                 const QuadratureRule& rule) {
  const ElementMap em = element_map(mesh, t);
  const Mat2 jac_inv_t = em.inv_t.transpose();
  std::vector<ElementQuadPoint> out;
  out.reserve(rule.points.size());
  for (const auto& qp : rule.points) {
    ElementQuadPoint p;
    p.x = em.to_physical(qp.xi);
    p.w = 0.5 * em.det * qp.w;
    p.shape = P2Basis::values(qp.xi);
    p.grad = P2Basis::gradients(qp.xi) * jac_inv_t;
    out.push_back(p);
  }
  return out;
}

std::array<Mat2, 6> element_hessians(const TriMesh& mesh, int t) {
  const ElementMap em = element_map(mesh, t);
  std::array<Mat2, 6> h;
  const auto& ref = P2Basis::hessians();
  for (int i = 0; i < 6; ++i) h[i] = em.inv_t * ref[i] * em.inv_t.transpose();
  return h;
}

void add_mean_constraints(SparseSystem& sys, const P2Space& space,
                          const DofMap& dofs, const QuadratureRule& rule) {
  std::vector<int> active;
  for (int f = 0; f < dofs.num_fields(); ++f)
    if (dofs.mean_multiplier(f) >= 0) active.push_back(f);
  if (active.empty()) return;

  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto quad = element_quadrature(space.mesh(), t, rule);
    for (const auto& qp : quad)
      for (int i = 0; i < 6; ++i) {
        const double v = qp.w * qp.shape[i];
        for (int f : active) {
          const int d = dofs.dof(f, space.node(t, i));
          const int m = dofs.mean_multiplier(f);
          sys.add(m, d, v);
          sys.add(d, m, v);
        }
      }
  }
}

double integrate(const P2Space& space, const QuadratureRule& rule,
                 const std::function<double(const Vec2&)>& f) {
  double sum = 0.0;
  for (int t = 0; t < space.mesh().num_triangles(); ++t)
    for (const auto& qp : element_quadrature(space.mesh(), t, rule))
      sum += qp.w * f(qp.x);
  return sum;
}

Eigen::VectorXd interpolate(const P2Space& space,
                            const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd v(space.num_nodes());
  for (int n = 0; n < space.num_nodes(); ++n) v[n] = f(space.node_coord(n));
  return v;
}

double l2_error(const P2Space& space, const Eigen::VectorXd& nodes,
                const std::function<double(const Vec2&)>& exact,
                const QuadratureRule& rule) {
  double sum = 0.0;
  for (int t = 0; t < space.mesh().num_triangles(); ++t)
    for (const auto& qp : element_quadrature(space.mesh(), t, rule)) {
      double uh = 0.0;
      for (int i = 0; i < 6; ++i) uh += qp.shape[i] * nodes[space.node(t, i)];
      const double d = uh - exact(qp.x);
      sum += qp.w * d * d;
    }
  return std::sqrt(sum);
}

}  // namespace pzshell
