#pragma once
// Sparse system assembly and the direct solve shared by every problem in
// the toolkit.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <vector>

#include "pzshell/fem_space.hpp"
#include "pzshell/quadrature.hpp"
#include "pzshell/tensors.hpp"

namespace pzshell {

// Triplet accumulator; entries with a negative row or column id (eliminated
// Dirichlet nodes) are dropped.
class SparseSystem {
 public:
  explicit SparseSystem(int n) : n_(n), rhs_(Eigen::VectorXd::Zero(n)) {}

  int size() const { return n_; }
  void add(int i, int j, double v) {
    if (i >= 0 && j >= 0) trip_.emplace_back(i, j, v);
  }
  void add_rhs(int i, double v) {
    if (i >= 0) rhs_[i] += v;
  }
  const Eigen::VectorXd& rhs() const { return rhs_; }
  Eigen::SparseMatrix<double> matrix() const;

  // Sparse LU with iterative refinement and a backward-error check
  // |Ax-b| <= tol*(|A| |x| + |b|); throws SolverError on failure.
  Eigen::VectorXd solve(double tol = 1e-10) const;

 private:
  int n_;
  std::vector<Eigen::Triplet<double>> trip_;
  Eigen::VectorXd rhs_;
};

// One LU factorization serving several right-hand sides.
class Factorization {
 public:
  explicit Factorization(Eigen::SparseMatrix<double> a);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double tol = 1e-10) const;

 private:
  Eigen::SparseMatrix<double> a_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

struct ElementQuadPoint {
  Vec2 x;    // physical position
  double w;  // quadrature weight including the Jacobian
  Eigen::Matrix<double, 6, 1> shape;
  Eigen::Matrix<double, 6, 2> grad;  // physical gradients
};

std::vector<ElementQuadPoint> element_quadrature(const TriMesh& mesh, int t,
                                                 const QuadratureRule& rule);

// Physical Hessians of the six local basis functions; constant on affine
// triangles.
std::array<Mat2, 6> element_hessians(const TriMesh& mesh, int t);

// Couples every zero-mean field of the map to its Lagrange multiplier
// through the P2 mass vector.
void add_mean_constraints(SparseSystem& sys, const P2Space& space,
                          const DofMap& dofs, const QuadratureRule& rule);

double integrate(const P2Space& space, const QuadratureRule& rule,
                 const std::function<double(const Vec2&)>& f);

// Nodal interpolant of a smooth function.
Eigen::VectorXd interpolate(const P2Space& space,
                            const std::function<double(const Vec2&)>& f);

double l2_error(const P2Space& space, const Eigen::VectorXd& nodes,
                const std::function<double(const Vec2&)>& exact,
                const QuadratureRule& rule);

}  // namespace pzshell
