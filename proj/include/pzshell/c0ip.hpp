#pragma once
// C0 interior penalty discretization of the fourth-order bending forms.
//
// The discrete bilinear form on a scalar P2 field is
//   a_h(u,v) = sum_T int M(u):Hess(v)
//            + sum_e [ -{M_nn(u)}[[dn v]] - {M_nn(v)}[[dn u]]
//                      + sigma*m_e/|e| [[dn u]][[dn v]] ]
// with M(u) = moment(y) : Hess(u) and m_e a material magnitude at the
// edge, so the whole form is homogeneous of degree one in the moment
// tensor.  On periodic cell spaces every boundary edge is glued to its
// translate and treated as interior; on macro meshes edge terms appear on
// interior edges and on clamped boundary edges (where the jump is the
// one-sided trace, enforcing dn u = 0 weakly; the value u = 0 is imposed
// strongly through the dof map).
//
// Quadratic drivers Pi with constant Hessian E enter through their
// Hessian alone with zero declared jumps; pair_energy evaluates the form
// on such extended arguments and add_plane_load assembles -a_h(Pi, .).

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pzshell/fem_assembly.hpp"
#include "pzshell/fem_space.hpp"
#include "pzshell/quadrature.hpp"
#include "pzshell/tensors.hpp"

namespace pzshell {

using MomentTensorFn = std::function<Tensor4(const Vec2&)>;

class C0IPForm {
 public:
  // Periodic torus variant for unit-cell spaces.
  C0IPForm(const P2Space& space, MomentTensorFn moment, double sigma);

  // Macro variant: boundary edges whose midpoint satisfies `clamp` get the
  // one-sided (Nitsche) edge terms; other boundary edges are free.
  C0IPForm(const P2Space& space, MomentTensorFn moment, double sigma,
           std::function<bool(const Vec2&)> clamp);

  void add_bilinear(SparseSystem& sys, const DofMap& dofs, int field) const;

  // rhs -= a_h(Pi, .) for the quadratic driver with constant Hessian
  // `hess`.
  void add_plane_load(SparseSystem& sys, const DofMap& dofs, int field,
                      const Mat2& hess) const;

  // a_h(Pi_eu + u, Pi_ev + v) on expanded node vectors.
  double pair_energy(const Eigen::VectorXd& u, const Mat2& eu,
                     const Eigen::VectorXd& v, const Mat2& ev) const;

  // True when the assembled form is positive definite on the constrained
  // space (constants factored out for zero-mean fields), i.e. when sigma
  // is large enough for the penalty to dominate the consistency terms.
  bool penalty_stable(const DofMap& dofs, int field) const;

 private:
  struct Side {
    int tri;
    int local;
  };
  struct Stencil {
    Side side[2];
    int nsides;
    double length;
    Vec2 normal;  // unit, out of side 0
    Vec2 shift;   // side-0 points + shift lie in side 1's frame
  };

  void build_stencils(const std::function<bool(const Vec2&)>* clamp);
  Tensor4 side_moment(const Side& s, const Vec2& x) const;

  const P2Space* space_;
  MomentTensorFn moment_;
  double sigma_;
  bool periodic_;
  std::vector<Stencil> stencils_;
};

}  // namespace pzshell
