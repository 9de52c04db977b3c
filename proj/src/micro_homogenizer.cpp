#include "pzshell/micro_homogenizer.hpp"

#include <string>
#include <utility>

#include "pzshell/errors.hpp"
#include "pzshell/quadrature.hpp"

namespace pzshell {

MaterialField MaterialField::constant(const Tensor4& c, const Tensor3& e,
                                      const Mat2& d, const Tensor4& bending,
                                      double sqrt_a) {
  MaterialField m;
  m.c = [c](const Vec2&) { return c; };
  m.e = [e](const Vec2&) { return e; };
  m.d = [d](const Vec2&) { return d; };
  m.bending = [bending](const Vec2&) { return bending; };
  m.sqrt_a = [sqrt_a](const Vec2&) { return sqrt_a; };
  return m;
}

MaterialField MaterialField::scaled(double s) const {
  MaterialField m = *this;
  m.c = [f = c, s](const Vec2& y) { return f(y) * s; };
  m.e = [f = e, s](const Vec2& y) {
    Tensor3 t = f(y);
    t *= s;
    return t;
  };
  m.d = [f = d, s](const Vec2& y) { return Mat2(s * f(y)); };
  m.bending = [f = bending, s](const Vec2& y) { return f(y) * s; };
  return m;
}

void validate_material(const MaterialField& mat, const P2Space& space,
                       const QuadratureRule& rule) {
  if (!mat.c || !mat.e || !mat.d || !mat.bending || !mat.sqrt_a)
    throw MaterialError("material field has unset components");
  const TriMesh& mesh = space.mesh();
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      const Tensor4 c = mat.c(qp.x);
      const Tensor4 cb = mat.bending(qp.x);
      const Tensor3 e = mat.e(qp.x);
      const Mat2 d = mat.d(qp.x);
      const double sa = mat.sqrt_a(qp.x);
      const double ctol = 1e-12 * (1.0 + c.frobenius_norm());
      const double btol = 1e-12 * (1.0 + cb.frobenius_norm());
      if (!c.has_minor_symmetry(ctol) || !c.has_major_symmetry(ctol))
        throw MaterialError("membrane elasticity tensor is not symmetric");
      if (!cb.has_minor_symmetry(btol) || !cb.has_major_symmetry(btol))
        throw MaterialError("bending elasticity tensor is not symmetric");
      if (!e.has_minor_symmetry(1e-12 * (1.0 + std::abs(e(0, 0, 1)) +
                                         std::abs(e(1, 0, 1)))))
        throw MaterialError("coupling tensor is not symmetric in its strain indices");
      if (std::abs(d(0, 1) - d(1, 0)) > 1e-12 * (1.0 + d.norm()))
        throw MaterialError("dielectric tensor is not symmetric");
      if (!(min_sym_eigenvalue(d) > 0))
        throw MaterialError("dielectric tensor is not positive definite");
      if (!(c.min_voigt_eigenvalue() > 0))
        throw MaterialError("membrane elasticity tensor is not coercive");
      if (!(cb.min_voigt_eigenvalue() > 0))
        throw MaterialError("bending elasticity tensor is not coercive");
      if (!(sa > 0)) throw MaterialError("areal weight must be positive");
    }
}

namespace {

// Strain of the basis function of in-plane component `comp` with gradient g.
Mat2 basis_strain(int comp, const Eigen::RowVector2d& g) {
  Mat2 s;
  if (comp == 0)
    s << g(0), 0.5 * g(1), 0.5 * g(1), 0.0;
  else
    s << 0.0, 0.5 * g(0), 0.5 * g(0), g(1);
  return s;
}

// Symmetric gradient of an interpolated 2-vector field on one element.
Mat2 field_strain(const P2Space& space, int t, const ElementQuadPoint& qp,
                  const Eigen::VectorXd& f1, const Eigen::VectorXd& f2) {
  Vec2 g1 = Vec2::Zero(), g2 = Vec2::Zero();
  for (int i = 0; i < 6; ++i) {
    const int n = space.node(t, i);
    g1 += f1[n] * qp.grad.row(i).transpose();
    g2 += f2[n] * qp.grad.row(i).transpose();
  }
  Mat2 x;
  x.col(0) = g1;
  x.col(1) = g2;
  return sym(x);
}

Vec2 field_gradient(const P2Space& space, int t, const ElementQuadPoint& qp,
                    const Eigen::VectorXd& f) {
  Vec2 g = Vec2::Zero();
  for (int i = 0; i < 6; ++i)
    g += f[space.node(t, i)] * qp.grad.row(i).transpose();
  return g;
}

MomentTensorFn bending_moment(const MaterialField& mat) {
  return [c = mat.bending, sa = mat.sqrt_a](const Vec2& y) {
    Tensor4 m = c(y);
    m *= sa(y);
    return m;
  };
}

// Shift a nodal field to zero mean over the perforated cell, the gauge the
// correctors are reported in.
void shift_to_zero_mean(const P2Space& space, Eigen::VectorXd& f) {
  const QuadratureRule rule = triangle_rule(2);
  const TriMesh& mesh = space.mesh();
  double sum = 0.0, area = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      double v = 0.0;
      for (int i = 0; i < 6; ++i) v += f[space.node(t, i)] * qp.shape[i];
      sum += qp.w * v;
      area += qp.w;
    }
  f.array() -= sum / area;
}

}  // namespace

MembraneCellSolutions solve_membrane_cells(const P2Space& space,
                                           const MaterialField& mat,
                                           double tol) {
  const QuadratureRule rule = triangle_rule(4);
  validate_material(mat, space, rule);

  // A single pinned node removes the constant from each field without the
  // dense zero-mean rows that ruin sparse factorization fill-in; the
  // zero-mean gauge is restored exactly after the solve.
  FieldSpec per;
  per.periodic = true;
  per.dirichlet = [](const Vec2& p) { return p.norm() < 1e-12; };
  const DofMap dofs(space, {per, per, per});
  const TriMesh& mesh = space.mesh();

  SparseSystem sys(dofs.num_dofs());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      const Tensor4 c = mat.c(qp.x);
      const Tensor3 e = mat.e(qp.x);
      const Mat2 d = mat.d(qp.x);
      const double w = qp.w * mat.sqrt_a(qp.x);

      Mat2 strain[2][6], stress[2][6], coup[6];
      Vec2 flux[6];
      for (int i = 0; i < 6; ++i) {
        for (int a = 0; a < 2; ++a) {
          strain[a][i] = basis_strain(a, qp.grad.row(i));
          stress[a][i] = c.contract(strain[a][i]);
        }
        coup[i] = e.applied(qp.grad.row(i).transpose());
        flux[i] = d * qp.grad.row(i).transpose();
      }
      for (int i = 0; i < 6; ++i) {
        const int ni = space.node(t, i);
        for (int j = 0; j < 6; ++j) {
          const int nj = space.node(t, j);
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b)
              sys.add(dofs.dof(a, ni), dofs.dof(b, nj),
                      w * (stress[b][j].array() * strain[a][i].array()).sum());
            sys.add(dofs.dof(a, ni), dofs.dof(2, nj),
                    w * (coup[j].array() * strain[a][i].array()).sum());
            sys.add(dofs.dof(2, nj), dofs.dof(a, ni),
                    w * (coup[j].array() * strain[a][i].array()).sum());
          }
          sys.add(dofs.dof(2, ni), dofs.dof(2, nj),
                  -w * qp.grad.row(i).dot(flux[j]));
        }
      }
    }
  const Factorization fact(sys.matrix());

  // Interpolated driving fields: Sigma^{tt} = E^{tt} y and the coordinates.
  std::array<Eigen::VectorXd, 3> sig1, sig2;
  std::array<Eigen::VectorXd, 2> coord;
  for (int v = 0; v < 3; ++v) {
    const Mat2 ev = unit_sym(v);
    sig1[v].resize(space.num_nodes());
    sig2[v].resize(space.num_nodes());
    for (int n = 0; n < space.num_nodes(); ++n) {
      const Vec2 s = ev * space.node_coord(n);
      sig1[v][n] = s.x();
      sig2[v][n] = s.y();
    }
  }
  for (int s = 0; s < 2; ++s) {
    coord[s].resize(space.num_nodes());
    for (int n = 0; n < space.num_nodes(); ++n)
      coord[s][n] = space.node_coord(n)[s];
  }

  std::array<Eigen::VectorXd, 5> rhs;
  rhs.fill(Eigen::VectorXd::Zero(dofs.num_dofs()));
  const auto put = [](Eigen::VectorXd& r, int dof, double v) {
    if (dof >= 0) r[dof] += v;
  };
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      const Tensor4 c = mat.c(qp.x);
      const Tensor3 e = mat.e(qp.x);
      const Mat2 d = mat.d(qp.x);
      const double w = qp.w * mat.sqrt_a(qp.x);

      Mat2 sig_strain[3], sig_stress[3];
      for (int v = 0; v < 3; ++v) {
        sig_strain[v] = field_strain(space, t, qp, sig1[v], sig2[v]);
        sig_stress[v] = c.contract(sig_strain[v]);
      }
      Vec2 grho[2];
      Mat2 rho_coup[2];
      Vec2 rho_flux[2];
      for (int s = 0; s < 2; ++s) {
        grho[s] = field_gradient(space, t, qp, coord[s]);
        rho_coup[s] = e.applied(grho[s]);
        rho_flux[s] = d * grho[s];
      }

      for (int i = 0; i < 6; ++i) {
        const int ni = space.node(t, i);
        const Mat2 coup_i = e.applied(qp.grad.row(i).transpose());
        for (int a = 0; a < 2; ++a) {
          const Mat2 si = basis_strain(a, qp.grad.row(i));
          for (int v = 0; v < 3; ++v)
            put(rhs[v], dofs.dof(a, ni),
                -w * (sig_stress[v].array() * si.array()).sum());
          for (int s = 0; s < 2; ++s)
            put(rhs[3 + s], dofs.dof(a, ni),
                -w * (rho_coup[s].array() * si.array()).sum());
        }
        for (int v = 0; v < 3; ++v)
          put(rhs[v], dofs.dof(2, ni),
              -w * (coup_i.array() * sig_strain[v].array()).sum());
        for (int s = 0; s < 2; ++s)
          put(rhs[3 + s], dofs.dof(2, ni),
              w * qp.grad.row(i).dot(rho_flux[s]));
      }
    }

  MembraneCellSolutions out;
  for (int v = 0; v < 3; ++v) {
    Eigen::VectorXd x;
    try {
      x = fact.solve(rhs[v], tol);
    } catch (const SolverError& err) {
      throw SolverError("membrane cell problem " + std::to_string(v) + ": " +
                        err.what());
    }
    out.w1[v] = dofs.node_values(x, 0);
    out.w2[v] = dofs.node_values(x, 1);
    out.zeta[v] = dofs.node_values(x, 2);
    shift_to_zero_mean(space, out.w1[v]);
    shift_to_zero_mean(space, out.w2[v]);
    shift_to_zero_mean(space, out.zeta[v]);
  }
  for (int s = 0; s < 2; ++s) {
    Eigen::VectorXd x;
    try {
      x = fact.solve(rhs[3 + s], tol);
    } catch (const SolverError& err) {
      throw SolverError("membrane cell problem " + std::to_string(3 + s) +
                        ": " + err.what());
    }
    out.z1[s] = dofs.node_values(x, 0);
    out.z2[s] = dofs.node_values(x, 1);
    out.eta[s] = dofs.node_values(x, 2);
    shift_to_zero_mean(space, out.z1[s]);
    shift_to_zero_mean(space, out.z2[s]);
    shift_to_zero_mean(space, out.eta[s]);
  }
  return out;
}

BendingCellSolutions solve_bending_cells(const P2Space& space,
                                         const MaterialField& mat, double sigma,
                                         double tol) {
  validate_material(mat, space, triangle_rule(4));

  FieldSpec per;
  per.periodic = true;
  per.zero_mean = true;
  const DofMap dofs(space, {per});
  const C0IPForm form(space, bending_moment(mat), sigma);

  if (!form.penalty_stable(dofs, 0))
    throw ConfigError("bending penalty sigma is below the stability threshold");

  SparseSystem sys(dofs.num_dofs());
  form.add_bilinear(sys, dofs, 0);
  add_mean_constraints(sys, space, dofs, triangle_rule(2));
  const Factorization fact(sys.matrix());

  BendingCellSolutions out;
  for (int v = 0; v < 3; ++v) {
    SparseSystem load(dofs.num_dofs());
    form.add_plane_load(load, dofs, 0, unit_sym(v));
    Eigen::VectorXd x;
    try {
      x = fact.solve(load.rhs(), tol);
    } catch (const SolverError& err) {
      throw SolverError("bending cell problem " + std::to_string(v) + ": " +
                        err.what());
    }
    out.w[v] = dofs.node_values(x, 0);
  }
  return out;
}

void assemble_membrane_tensors_direct(const MembraneCellSolutions& cells,
                                      const P2Space& space,
                                      const MaterialField& mat,
                                      HomogenizedTensors& out) {
  const QuadratureRule rule = triangle_rule(4);
  const TriMesh& mesh = space.mesh();

  Mat2 cb[3] = {Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  Vec2 fb[3] = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  Mat2 eb[2] = {Mat2::Zero(), Mat2::Zero()};
  Vec2 db[2] = {Vec2::Zero(), Vec2::Zero()};
  double area = 0.0, area_a = 0.0;

  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      const Tensor4 c = mat.c(qp.x);
      const Tensor3 e = mat.e(qp.x);
      const Mat2 d = mat.d(qp.x);
      const double sa = mat.sqrt_a(qp.x);
      const double w = qp.w * sa;
      area += qp.w;
      area_a += w;

      for (int v = 0; v < 3; ++v) {
        const Mat2 s =
            unit_sym(v) + field_strain(space, t, qp, cells.w1[v], cells.w2[v]);
        const Vec2 gz = field_gradient(space, t, qp, cells.zeta[v]);
        cb[v] += w * (c.contract(s) + e.applied(gz));
        fb[v] += w * (e.contract(s) - d * gz);
      }
      for (int s = 0; s < 2; ++s) {
        const Mat2 sz = field_strain(space, t, qp, cells.z1[s], cells.z2[s]);
        const Vec2 g = Vec2::Unit(s) + field_gradient(space, t, qp, cells.eta[s]);
        eb[s] += w * (c.contract(sz) + e.applied(g));
        db[s] += w * (-e.contract(sz) + d * g);
      }
    }

  out.ystar = area;
  out.ystar_a = area_a;
  for (int v = 0; v < 3; ++v) {
    const auto [tau, theta] = kVoigtPairs[v];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        out.cbar(a, b, tau, theta) = cb[v](a, b);
        out.cbar(a, b, theta, tau) = cb[v](a, b);
      }
      out.fbar(a, tau, theta) = fb[v](a);
      out.fbar(a, theta, tau) = fb[v](a);
    }
  }
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out.ebar(s, a, b) = eb[s](a, b);
    for (int a = 0; a < 2; ++a) out.dbar(a, s) = db[s](a);
  }
}

void assemble_membrane_tensors_energy(const MembraneCellSolutions& cells,
                                      const P2Space& space,
                                      const MaterialField& mat,
                                      HomogenizedTensors& out) {
  const QuadratureRule rule = triangle_rule(4);
  const TriMesh& mesh = space.mesh();
  Mat3 vc = Mat3::Zero();
  Mat2 vd = Mat2::Zero();

  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      const Tensor4 c = mat.c(qp.x);
      const Mat2 d = mat.d(qp.x);
      const double w = qp.w * mat.sqrt_a(qp.x);

      Mat2 s[3], sz[2];
      Vec2 gz[3], g[2];
      for (int v = 0; v < 3; ++v) {
        s[v] = unit_sym(v) + field_strain(space, t, qp, cells.w1[v], cells.w2[v]);
        gz[v] = field_gradient(space, t, qp, cells.zeta[v]);
      }
      for (int a = 0; a < 2; ++a) {
        sz[a] = field_strain(space, t, qp, cells.z1[a], cells.z2[a]);
        g[a] = Vec2::Unit(a) + field_gradient(space, t, qp, cells.eta[a]);
      }
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
          vc(i, j) += w * (c.contract2(s[i], s[j]) + gz[i].dot(d * gz[j]));
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j)
          vd(i, j) += w * (c.contract2(sz[i], sz[j]) + g[i].dot(d * g[j]));
    }

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j) vc(i, j) = vc(j, i);
  for (int j = 0; j < 2; ++j)
    for (int i = j + 1; i < 2; ++i) vd(i, j) = vd(j, i);
  out.cbar_energy = Tensor4::from_voigt(vc);
  out.dbar_energy = vd;
}

void assemble_bending_tensor(const BendingCellSolutions& cells,
                             const P2Space& space, const MaterialField& mat,
                             double sigma, HomogenizedTensors& out) {
  const C0IPForm form(space, bending_moment(mat), sigma);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(space.num_nodes());

  Mat3 vdir = Mat3::Zero(), ven = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      vdir(i, j) = form.pair_energy(cells.w[i], unit_sym(i), zero, unit_sym(j));
    for (int j = i; j < 3; ++j)
      ven(i, j) = form.pair_energy(cells.w[i], unit_sym(i), cells.w[j], unit_sym(j));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j) ven(i, j) = ven(j, i);
  out.cbar_bend = Tensor4::from_voigt(vdir);
  out.cbar_bend_energy = Tensor4::from_voigt(ven);
}

SpdReport spd_report(const HomogenizedTensors& tensors) {
  SpdReport r;
  r.cbar_min = tensors.cbar.min_voigt_eigenvalue();
  r.dbar_min = min_sym_eigenvalue(tensors.dbar);
  r.bending_min = tensors.cbar_bend.min_voigt_eigenvalue();
  return r;
}

CellResults homogenize_cell(const P2Space& space, const MaterialField& mat,
                            double sigma, double tol) {
  CellResults r;
  r.membrane = solve_membrane_cells(space, mat, tol);
  r.bending = solve_bending_cells(space, mat, sigma, tol);
  assemble_membrane_tensors_direct(r.membrane, space, mat, r.tensors);
  assemble_membrane_tensors_energy(r.membrane, space, mat, r.tensors);
  assemble_bending_tensor(r.bending, space, mat, sigma, r.tensors);
  return r;
}

}  // namespace pzshell
