#include "pzshell/macro_shell_solver.hpp"

#include <utility>

#include "pzshell/c0ip.hpp"
#include "pzshell/errors.hpp"
#include "pzshell/fem_assembly.hpp"
#include "pzshell/quadrature.hpp"

namespace pzshell {

std::function<double(const Vec2&)> thickness_reduce(
    std::function<double(const Vec2&, double)> f, int npts) {
  return [f = std::move(f), rule = gauss_legendre(npts)](const Vec2& x) {
    double sum = 0.0;
    for (const auto& gp : rule) sum += gp.w * f(x, gp.x);
    return sum;
  };
}

namespace {

int count_marked(const P2Space& space,
                 const std::function<bool(const Vec2&)>& marker) {
  if (!marker) return 0;
  int n = 0;
  for (int node = 0; node < space.num_nodes(); ++node)
    if (marker(space.node_coord(node))) ++n;
  return n;
}

// Thickness-reduced body load plus surface density for one component.
std::function<double(const Vec2&)> reduced_load(const Loads& loads, int c) {
  std::function<double(const Vec2&)> body;
  if (loads.f[c]) body = thickness_reduce(loads.f[c]);
  const auto& surf = loads.q[c];
  if (!body && !surf) return nullptr;
  return [body, surf](const Vec2& x) {
    return (body ? body(x) : 0.0) + (surf ? surf(x) : 0.0);
  };
}

}  // namespace

MacroSolution solve_homogenized_membrane(const MacroMesh& macro,
                                         const HomogenizedTensors& tensors,
                                         const Loads& loads,
                                         const SurfaceChart& chart,
                                         double tol) {
  if (!(tensors.cbar.min_voigt_eigenvalue() > 0) ||
      !(min_sym_eigenvalue(tensors.dbar) > 0))
    throw MaterialError("effective membrane tensors are not positive definite");

  const P2Space space(macro.mesh);
  if (count_marked(space, macro.clamp) == 0)
    throw ConfigError("mechanical clamp matches no node");

  const bool curved = chart.kind != SurfaceChart::Kind::plane;
  const int nm = curved ? 3 : 2;
  const int pf = nm;

  std::vector<FieldSpec> fields(nm + 1);
  fields[0].dirichlet = macro.clamp;
  fields[1].dirichlet = macro.clamp;
  if (count_marked(space, macro.ground) > 0)
    fields[pf].dirichlet = macro.ground;
  else
    fields[pf].zero_mean = true;
  const DofMap dofs(space, fields);

  std::array<std::function<double(const Vec2&)>, 3> load;
  for (int c = 0; c < 3; ++c) load[c] = reduced_load(loads, c);
  const double scale = tensors.ystar_a;

  const QuadratureRule rule = triangle_rule(4);
  SparseSystem sys(dofs.num_dofs());
  for (int t = 0; t < macro.mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(macro.mesh, t, rule)) {
      const GeometryCoefficients g = geometry_coeffs(chart, qp.x);

      Mat2 strain[3][6];
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < nm; ++c) {
          Vec3 v = Vec3::Zero();
          Mat2 grad = Mat2::Zero();
          v[c] = qp.shape[i];
          if (c < 2) grad.col(c) = qp.grad.row(i).transpose();
          strain[c][i] = membrane_strain(g, v, grad);
        }

      for (int i = 0; i < 6; ++i) {
        const int ni = space.node(t, i);
        const Mat2 coup_i = tensors.ebar.applied(qp.grad.row(i).transpose());
        for (int j = 0; j < 6; ++j) {
          const int nj = space.node(t, j);
          for (int a = 0; a < nm; ++a) {
            for (int b = 0; b < nm; ++b)
              sys.add(dofs.dof(a, ni), dofs.dof(b, nj),
                      qp.w * tensors.cbar.contract2(strain[a][i], strain[b][j]));
            sys.add(dofs.dof(a, nj), dofs.dof(pf, ni),
                    qp.w * (coup_i.array() * strain[a][j].array()).sum());
            sys.add(dofs.dof(pf, ni), dofs.dof(a, nj),
                    qp.w * (coup_i.array() * strain[a][j].array()).sum());
          }
          sys.add(dofs.dof(pf, ni), dofs.dof(pf, nj),
                  -qp.w * qp.grad.row(i).dot(tensors.dbar * qp.grad.row(j).transpose()));
        }
        for (int c = 0; c < nm; ++c)
          if (load[c])
            sys.add_rhs(dofs.dof(c, ni),
                        qp.w * scale * load[c](qp.x) * qp.shape[i]);
      }
    }
  add_mean_constraints(sys, space, dofs, triangle_rule(2));

  Eigen::VectorXd x;
  try {
    x = sys.solve(tol);
  } catch (const SolverError& err) {
    throw SolverError(std::string("membrane problem: ") + err.what());
  }

  MacroSolution out;
  out.u1 = dofs.node_values(x, 0);
  out.u2 = dofs.node_values(x, 1);
  out.u3 = curved ? dofs.node_values(x, 2)
                  : Eigen::VectorXd::Zero(space.num_nodes());
  out.phi = dofs.node_values(x, pf);
  out.residual = (sys.matrix() * x - sys.rhs()).norm();

  const Eigen::VectorXd* comps[3] = {&out.u1, &out.u2, &out.u3};
  for (int t = 0; t < macro.mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(macro.mesh, t, rule)) {
      const GeometryCoefficients g = geometry_coeffs(chart, qp.x);
      Vec3 u = Vec3::Zero();
      Mat2 grad = Mat2::Zero();
      Vec2 gphi = Vec2::Zero();
      for (int i = 0; i < 6; ++i) {
        const int n = space.node(t, i);
        for (int c = 0; c < 3; ++c) {
          u[c] += (*comps[c])[n] * qp.shape[i];
          if (c < 2) grad.col(c) += (*comps[c])[n] * qp.grad.row(i).transpose();
        }
        gphi += out.phi[n] * qp.grad.row(i).transpose();
      }
      const Mat2 gu = membrane_strain(g, u, grad);
      out.energy += qp.w * (tensors.cbar.contract2(gu, gu) +
                            gphi.dot(tensors.dbar * gphi));
      for (int c = 0; c < 3; ++c)
        if (load[c]) out.load_work += qp.w * scale * load[c](qp.x) * u[c];
    }
  return out;
}

MacroSolution solve_homogenized_bending(const MacroMesh& macro,
                                        const HomogenizedTensors& tensors,
                                        const Loads& loads, double sigma,
                                        double tol) {
  if (!(tensors.cbar_bend.min_voigt_eigenvalue() > 0))
    throw MaterialError("effective bending tensor is not positive definite");

  const P2Space space(macro.mesh);
  if (count_marked(space, macro.clamp) == 0)
    throw ConfigError("mechanical clamp matches no node");

  std::vector<FieldSpec> fields(1);
  fields[0].dirichlet = macro.clamp;
  const DofMap dofs(space, fields);

  Tensor4 moment = tensors.cbar_bend;
  moment *= 2.0 / 3.0;
  const C0IPForm form(space, [moment](const Vec2&) { return moment; }, sigma,
                      macro.clamp);
  if (form.quotient_floor(dofs, 0) <= 1e-10)
    throw ConfigError("bending penalty sigma is below the stability threshold");

  const auto load = reduced_load(loads, 2);
  const double scale = tensors.ystar_a;

  SparseSystem sys(dofs.num_dofs());
  form.add_bilinear(sys, dofs, 0);
  const QuadratureRule rule = triangle_rule(4);
  if (load)
    for (int t = 0; t < macro.mesh.num_triangles(); ++t)
      for (const auto& qp : element_quadrature(macro.mesh, t, rule))
        for (int i = 0; i < 6; ++i)
          sys.add_rhs(dofs.dof(0, space.node(t, i)),
                      qp.w * scale * load(qp.x) * qp.shape[i]);

  Eigen::VectorXd x;
  try {
    x = sys.solve(tol);
  } catch (const SolverError& err) {
    throw SolverError(std::string("bending problem: ") + err.what());
  }

  MacroSolution out;
  out.u1 = Eigen::VectorXd::Zero(space.num_nodes());
  out.u2 = Eigen::VectorXd::Zero(space.num_nodes());
  out.u3 = dofs.node_values(x, 0);
  out.phi = Eigen::VectorXd::Zero(space.num_nodes());
  out.residual = (sys.matrix() * x - sys.rhs()).norm();
  out.energy = form.pair_energy(out.u3, Mat2::Zero(), out.u3, Mat2::Zero());
  if (load)
    for (int t = 0; t < macro.mesh.num_triangles(); ++t)
      for (const auto& qp : element_quadrature(macro.mesh, t, rule)) {
        double u = 0.0;
        for (int i = 0; i < 6; ++i)
          u += out.u3[space.node(t, i)] * qp.shape[i];
        out.load_work += qp.w * scale * load(qp.x) * u;
      }
  return out;
}

}  // namespace pzshell
