#include "pzshell/validation_harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pzshell/c0ip.hpp"
#include "pzshell/errors.hpp"
#include "pzshell/fem_assembly.hpp"
#include "pzshell/quadrature.hpp"

namespace pzshell {

namespace {

constexpr double kBoundaryTol = 1e-12;

bool on_unit_boundary(const Vec2& p) {
  return p.x() < kBoundaryTol || p.y() < kBoundaryTol ||
         p.x() > 1.0 - kBoundaryTol || p.y() > 1.0 - kBoundaryTol;
}

int checked_reps(double eps) {
  if (!(eps > 0)) throw ConfigError("cell size must be positive");
  const double m = 1.0 / eps;
  if (std::abs(m - std::lround(m)) > 1e-12 * m)
    throw ConfigError("cell size must be the reciprocal of a positive integer");
  return static_cast<int>(std::lround(m));
}

Vec2 frac_coord(const Vec2& x, double eps) {
  const double y1 = x.x() / eps, y2 = x.y() / eps;
  return {y1 - std::floor(y1), y2 - std::floor(y2)};
}

Mat2 basis_strain(int comp, const Eigen::RowVector2d& g) {
  Mat2 s;
  if (comp == 0)
    s << g(0), 0.5 * g(1), 0.5 * g(1), 0.0;
  else
    s << 0.0, 0.5 * g(0), 0.5 * g(0), g(1);
  return s;
}

int count_marked(const P2Space& space,
                 const std::function<bool(const Vec2&)>& marker) {
  if (!marker) return 0;
  int n = 0;
  for (int node = 0; node < space.num_nodes(); ++node)
    if (marker(space.node_coord(node))) ++n;
  return n;
}

std::function<double(const Vec2&)> reduced_load(const Loads& loads, int c) {
  std::function<double(const Vec2&)> body;
  if (loads.f[c]) body = thickness_reduce(loads.f[c]);
  const auto& surf = loads.q[c];
  if (!body && !surf) return nullptr;
  return [body, surf](const Vec2& x) {
    return (body ? body(x) : 0.0) + (surf ? surf(x) : 0.0);
  };
}

Eigen::Vector3d voigt3(const Mat2& s) {
  return {s(0, 0), s(1, 1), s(0, 1)};
}

Mat2 from_voigt3(const Eigen::Vector3d& v) {
  Mat2 s;
  s << v[0], v[2], v[2], v[1];
  return s;
}

}  // namespace

PerforatedMacroMesh build_perforated_macro(
    const PeriodicCellMesh& cell, double eps,
    std::function<bool(const Vec2&)> clamp,
    std::function<bool(const Vec2&)> ground) {
  PerforatedMacroMesh perf;
  perf.eps = eps;
  perf.reps = checked_reps(eps);
  perf.mesh = tile_cell(cell, perf.reps);
  perf.clamp = clamp ? std::move(clamp) : on_unit_boundary;
  perf.ground = ground ? std::move(ground) : on_unit_boundary;
  return perf;
}

MaterialField material_at_eps(const MaterialField& mat, double eps) {
  checked_reps(eps);
  MaterialField m;
  m.c = [f = mat.c, eps](const Vec2& x) { return f(frac_coord(x, eps)); };
  m.e = [f = mat.e, eps](const Vec2& x) { return f(frac_coord(x, eps)); };
  m.d = [f = mat.d, eps](const Vec2& x) { return f(frac_coord(x, eps)); };
  m.bending = [f = mat.bending, eps](const Vec2& x) {
    return f(frac_coord(x, eps));
  };
  m.sqrt_a = [f = mat.sqrt_a, eps](const Vec2& x) {
    return f(frac_coord(x, eps));
  };
  return m;
}

EpsSolution solve_eps_membrane(const PerforatedMacroMesh& perf,
                               const MaterialField& mat, const Loads& loads,
                               double tol) {
  const P2Space space(perf.mesh);
  if (count_marked(space, perf.clamp) == 0)
    throw ConfigError("mechanical clamp matches no node");
  const MaterialField em = material_at_eps(mat, perf.eps);

  std::vector<FieldSpec> fields(3);
  fields[0].dirichlet = perf.clamp;
  fields[1].dirichlet = perf.clamp;
  if (count_marked(space, perf.ground) > 0)
    fields[2].dirichlet = perf.ground;
  else
    fields[2].zero_mean = true;
  const DofMap dofs(space, fields);

  std::array<std::function<double(const Vec2&)>, 2> load = {
      reduced_load(loads, 0), reduced_load(loads, 1)};

  const QuadratureRule rule = triangle_rule(4);
  SparseSystem sys(dofs.num_dofs());
  for (int t = 0; t < perf.mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(perf.mesh, t, rule)) {
      const Tensor4 c = em.c(qp.x);
      const Tensor3 e = em.e(qp.x);
      const Mat2 d = em.d(qp.x);
      const double w = qp.w * em.sqrt_a(qp.x);

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
        for (int a = 0; a < 2; ++a)
          if (load[a])
            sys.add_rhs(dofs.dof(a, ni), w * load[a](qp.x) * qp.shape[i]);
      }
    }
  add_mean_constraints(sys, space, dofs, triangle_rule(2));

  Eigen::VectorXd x;
  try {
    x = sys.solve(tol);
  } catch (const SolverError& err) {
    throw SolverError(std::string("oscillating membrane problem: ") +
                      err.what());
  }

  EpsSolution out;
  out.u1 = dofs.node_values(x, 0);
  out.u2 = dofs.node_values(x, 1);
  out.u3 = Eigen::VectorXd::Zero(space.num_nodes());
  out.phi = dofs.node_values(x, 2);
  out.residual = (sys.matrix() * x - sys.rhs()).norm();

  for (int t = 0; t < perf.mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(perf.mesh, t, rule)) {
      const double w = qp.w * em.sqrt_a(qp.x);
      Mat2 grad = Mat2::Zero();
      Vec2 gphi = Vec2::Zero();
      double u1 = 0.0, u2 = 0.0;
      for (int i = 0; i < 6; ++i) {
        const int n = space.node(t, i);
        grad.col(0) += out.u1[n] * qp.grad.row(i).transpose();
        grad.col(1) += out.u2[n] * qp.grad.row(i).transpose();
        gphi += out.phi[n] * qp.grad.row(i).transpose();
        u1 += out.u1[n] * qp.shape[i];
        u2 += out.u2[n] * qp.shape[i];
      }
      const Mat2 s = sym(grad);
      out.energy += w * (em.c(qp.x).contract2(s, s) +
                         gphi.dot(em.d(qp.x) * gphi));
      if (load[0]) out.load_work += w * load[0](qp.x) * u1;
      if (load[1]) out.load_work += w * load[1](qp.x) * u2;
    }
  return out;
}

EpsSolution solve_eps_bending(const PerforatedMacroMesh& perf,
                              const MaterialField& mat, const Loads& loads,
                              double sigma, double tol) {
  const P2Space space(perf.mesh);
  if (count_marked(space, perf.clamp) == 0)
    throw ConfigError("mechanical clamp matches no node");
  const MaterialField em = material_at_eps(mat, perf.eps);

  std::vector<FieldSpec> fields(1);
  fields[0].dirichlet = perf.clamp;
  const DofMap dofs(space, fields);

  const MomentTensorFn moment = [c = em.bending, sa = em.sqrt_a](const Vec2& x) {
    Tensor4 m = c(x);
    m *= (2.0 / 3.0) * sa(x);
    return m;
  };
  const C0IPForm form(space, moment, sigma, perf.clamp);
  if (form.quotient_floor(dofs, 0) <= 1e-10)
    throw ConfigError("bending penalty sigma is below the stability threshold");

  const auto load = reduced_load(loads, 2);
  const QuadratureRule rule = triangle_rule(4);
  SparseSystem sys(dofs.num_dofs());
  form.add_bilinear(sys, dofs, 0);
  if (load)
    for (int t = 0; t < perf.mesh.num_triangles(); ++t)
      for (const auto& qp : element_quadrature(perf.mesh, t, rule))
        for (int i = 0; i < 6; ++i)
          sys.add_rhs(dofs.dof(0, space.node(t, i)),
                      qp.w * em.sqrt_a(qp.x) * load(qp.x) * qp.shape[i]);

  Eigen::VectorXd x;
  try {
    x = sys.solve(tol);
  } catch (const SolverError& err) {
    throw SolverError(std::string("oscillating bending problem: ") +
                      err.what());
  }

  EpsSolution out;
  out.u1 = Eigen::VectorXd::Zero(space.num_nodes());
  out.u2 = Eigen::VectorXd::Zero(space.num_nodes());
  out.u3 = dofs.node_values(x, 0);
  out.phi = Eigen::VectorXd::Zero(space.num_nodes());
  out.residual = (sys.matrix() * x - sys.rhs()).norm();
  out.energy = form.pair_energy(out.u3, Mat2::Zero(), out.u3, Mat2::Zero());
  if (load)
    for (int t = 0; t < perf.mesh.num_triangles(); ++t)
      for (const auto& qp : element_quadrature(perf.mesh, t, rule)) {
        double u = 0.0;
        for (int i = 0; i < 6; ++i)
          u += out.u3[space.node(t, i)] * qp.shape[i];
        out.load_work += qp.w * em.sqrt_a(qp.x) * load(qp.x) * u;
      }
  return out;
}

namespace {

// Per-micro-sample tables of the cell solution derivatives, in the layout of
// an EpsGrid built with the same quadrature degree.
struct MicroTables {
  int npt = 0;  // points per element
  std::vector<Eigen::Vector3d> sw[3], sz[2];  // strains, Voigt (11,22,12)
  std::vector<Vec2> gz[3], ge[2];             // potential gradients
  std::vector<Eigen::Vector3d> hw[3];         // bending curvatures
};

MicroTables micro_tables(const P2Space& space, const MembraneCellSolutions* mem,
                         const BendingCellSolutions* bend, const EpsGrid& grid) {
  const TriMesh& mesh = space.mesh();
  const QuadratureRule rule = triangle_rule(grid.degree);
  const int npt = static_cast<int>(rule.points.size());
  if (grid.num_micro() != mesh.num_triangles() * npt)
    throw std::invalid_argument("grid layout does not match the cell space");

  MicroTables tab;
  tab.npt = npt;
  const int nq = grid.num_micro();
  for (int v = 0; v < 3; ++v) {
    if (mem) {
      tab.sw[v].resize(nq);
      tab.gz[v].resize(nq);
    }
    if (bend) tab.hw[v].resize(nq);
  }
  for (int s = 0; s < 2 && mem; ++s) {
    tab.sz[s].resize(nq);
    tab.ge[s].resize(nq);
  }

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto eq = element_quadrature(mesh, t, rule);
    const auto hess = bend ? element_hessians(mesh, t) : std::array<Mat2, 6>{};
    for (int j = 0; j < npt; ++j) {
      const int q = t * npt + j;
      for (int v = 0; v < 3; ++v) {
        if (mem) {
          Mat2 grad = Mat2::Zero();
          Vec2 g = Vec2::Zero();
          for (int i = 0; i < 6; ++i) {
            const int n = space.node(t, i);
            grad.col(0) += mem->w1[v][n] * eq[j].grad.row(i).transpose();
            grad.col(1) += mem->w2[v][n] * eq[j].grad.row(i).transpose();
            g += mem->zeta[v][n] * eq[j].grad.row(i).transpose();
          }
          tab.sw[v][q] = voigt3(sym(grad));
          tab.gz[v][q] = g;
        }
        if (bend) {
          Mat2 h = Mat2::Zero();
          for (int i = 0; i < 6; ++i)
            h += bend->w[v][space.node(t, i)] * hess[i];
          tab.hw[v][q] = voigt3(h);
        }
      }
      if (mem)
        for (int s = 0; s < 2; ++s) {
          Mat2 grad = Mat2::Zero();
          Vec2 g = Vec2::Zero();
          for (int i = 0; i < 6; ++i) {
            const int n = space.node(t, i);
            grad.col(0) += mem->z1[s][n] * eq[j].grad.row(i).transpose();
            grad.col(1) += mem->z2[s][n] * eq[j].grad.row(i).transpose();
            g += mem->eta[s][n] * eq[j].grad.row(i).transpose();
          }
          tab.sz[s][q] = voigt3(sym(grad));
          tab.ge[s][q] = g;
        }
    }
  }
  return tab;
}

// Per-cell averages of the macro coefficient functions over the perforated
// cell, which is how the averaging operator acts on a separable ansatz.
void cell_averages(const EpsGrid& grid,
                   const std::function<Eigen::Vector3d(const Vec2&)>& coeff3,
                   const std::function<Vec2(const Vec2&)>& coeff2,
                   std::vector<Eigen::Vector3d>& avg3,
                   std::vector<Vec2>& avg2) {
  avg3.assign(grid.num_cells(), Eigen::Vector3d::Zero());
  if (coeff2) avg2.assign(grid.num_cells(), Vec2::Zero());
  for (int k = 0; k < grid.num_cells(); ++k) {
    for (int q = 0; q < grid.num_micro(); ++q) {
      const Vec2 x = grid.sample(k, q);
      const double w = grid.micro_weights[q];
      avg3[k] += w * coeff3(x);
      if (coeff2) avg2[k] += w * coeff2(x);
    }
    avg3[k] /= grid.ystar;
    if (coeff2) avg2[k] /= grid.ystar;
  }
}

}  // namespace

MembraneCorrector reconstruct_membrane_corrector(
    const std::function<Mat2(const Vec2&)>& macro_strain,
    const std::function<Vec2(const Vec2&)>& macro_field,
    const P2Space& cell_space, const MembraneCellSolutions& cells,
    const EpsGrid& grid) {
  const MicroTables tab = micro_tables(cell_space, &cells, nullptr, grid);

  std::vector<Eigen::Vector3d> gavg;
  std::vector<Vec2> pavg;
  cell_averages(
      grid,
      [&](const Vec2& x) { return sym_coeffs(macro_strain(x)); },
      macro_field, gavg, pavg);

  MembraneCorrector out;
  out.strain.comps = 3;
  out.field.comps = 2;
  const int nq = grid.num_micro();
  out.strain.values.setZero(grid.num_cells(), 3 * nq);
  out.field.values.setZero(grid.num_cells(), 2 * nq);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < nq; ++q) {
      Eigen::Vector3d s = Eigen::Vector3d::Zero();
      Vec2 g = Vec2::Zero();
      for (int v = 0; v < 3; ++v) {
        s += gavg[k][v] * tab.sw[v][q];
        g += gavg[k][v] * tab.gz[v][q];
      }
      for (int t = 0; t < 2; ++t) {
        s += pavg[k][t] * tab.sz[t][q];
        g += pavg[k][t] * tab.ge[t][q];
      }
      for (int c = 0; c < 3; ++c) out.strain.at(k, q, c) = s[c];
      for (int c = 0; c < 2; ++c) out.field.at(k, q, c) = g[c];
    }
  return out;
}

EpsField reconstruct_bending_corrector(
    const std::function<Mat2(const Vec2&)>& macro_hess,
    const P2Space& cell_space, const BendingCellSolutions& cells,
    const EpsGrid& grid) {
  const MicroTables tab = micro_tables(cell_space, nullptr, &cells, grid);

  std::vector<Eigen::Vector3d> havg;
  std::vector<Vec2> unused;
  cell_averages(
      grid, [&](const Vec2& x) { return sym_coeffs(macro_hess(x)); }, nullptr,
      havg, unused);

  EpsField out;
  out.comps = 3;
  const int nq = grid.num_micro();
  out.values.setZero(grid.num_cells(), 3 * nq);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < nq; ++q) {
      Eigen::Vector3d h = Eigen::Vector3d::Zero();
      for (int v = 0; v < 3; ++v) h += havg[k][v] * tab.hw[v][q];
      for (int c = 0; c < 3; ++c) out.at(k, q, c) = h[c];
    }
  return out;
}

namespace {

struct ErrorAccum {
  double corr = 0.0, plain = 0.0, corr_int = 0.0, plain_int = 0.0;

  void add(double w, double dc, double dp, bool interior) {
    corr += w * dc;
    plain += w * dp;
    if (interior) {
      corr_int += w * dc;
      plain_int += w * dp;
    }
  }
  CorrectorErrors finish() const {
    return {std::sqrt(corr), std::sqrt(plain), std::sqrt(corr_int),
            std::sqrt(plain_int)};
  }
};

bool interior_point(const Vec2& x, double eps) {
  const double m = 2.0 * eps;
  return x.x() >= m && x.x() <= 1.0 - m && x.y() >= m && x.y() <= 1.0 - m;
}

double frob2(const Mat2& m) { return (m.array() * m.array()).sum(); }

// Walks the tiled mesh in step with the corrector layout.
template <typename Visit>
void sweep_eps_mesh(const PerforatedMacroMesh& perf, const EpsGrid& grid,
                    Visit&& visit) {
  const int m = perf.reps;
  const int ntm = perf.mesh.num_triangles() / (m * m);
  const QuadratureRule rule = triangle_rule(grid.degree);
  const int npt = static_cast<int>(rule.points.size());
  const P2Space space(perf.mesh);

  for (int t = 0; t < perf.mesh.num_triangles(); ++t) {
    const int tile = t / ntm;
    const int tmic = t % ntm;
    const auto eq = element_quadrature(perf.mesh, t, rule);
    for (int j = 0; j < npt; ++j)
      visit(space, t, eq[j], tile, tmic * npt + j);
  }
}

}  // namespace

CorrectorErrors corrector_error_membrane_strain(
    const PerforatedMacroMesh& perf, const EpsSolution& sol,
    const std::function<Mat2(const Vec2&)>& macro_strain,
    const MembraneCorrector& corr, const EpsGrid& grid) {
  ErrorAccum acc;
  sweep_eps_mesh(perf, grid,
                 [&](const P2Space& space, int t, const ElementQuadPoint& qp,
                     int k, int q) {
                   Mat2 grad = Mat2::Zero();
                   for (int i = 0; i < 6; ++i) {
                     const int n = space.node(t, i);
                     grad.col(0) += sol.u1[n] * qp.grad.row(i).transpose();
                     grad.col(1) += sol.u2[n] * qp.grad.row(i).transpose();
                   }
                   const Mat2 plain = sym(grad) - macro_strain(qp.x);
                   const Mat2 u = from_voigt3({corr.strain.at(k, q, 0),
                                               corr.strain.at(k, q, 1),
                                               corr.strain.at(k, q, 2)});
                   acc.add(qp.w, frob2(plain - u), frob2(plain),
                           interior_point(qp.x, perf.eps));
                 });
  return acc.finish();
}

CorrectorErrors corrector_error_membrane_field(
    const PerforatedMacroMesh& perf, const EpsSolution& sol,
    const std::function<Vec2(const Vec2&)>& macro_field,
    const MembraneCorrector& corr, const EpsGrid& grid) {
  ErrorAccum acc;
  sweep_eps_mesh(perf, grid,
                 [&](const P2Space& space, int t, const ElementQuadPoint& qp,
                     int k, int q) {
                   Vec2 g = Vec2::Zero();
                   for (int i = 0; i < 6; ++i)
                     g += sol.phi[space.node(t, i)] * qp.grad.row(i).transpose();
                   const Vec2 plain = g - macro_field(qp.x);
                   const Vec2 u{corr.field.at(k, q, 0), corr.field.at(k, q, 1)};
                   acc.add(qp.w, (plain - u).squaredNorm(), plain.squaredNorm(),
                           interior_point(qp.x, perf.eps));
                 });
  return acc.finish();
}

CorrectorErrors corrector_error_bending(
    const PerforatedMacroMesh& perf, const EpsSolution& sol,
    const std::function<Mat2(const Vec2&)>& macro_hess, const EpsField& corr,
    const EpsGrid& grid) {
  const P2Space space(perf.mesh);
  const int m = perf.reps;
  const int ntm = perf.mesh.num_triangles() / (m * m);
  const QuadratureRule rule = triangle_rule(grid.degree);
  const int npt = static_cast<int>(rule.points.size());

  ErrorAccum acc;
  for (int t = 0; t < perf.mesh.num_triangles(); ++t) {
    const int tile = t / ntm;
    const int tmic = t % ntm;
    const auto hess = element_hessians(perf.mesh, t);
    Mat2 he = Mat2::Zero();
    for (int i = 0; i < 6; ++i) he += sol.u3[space.node(t, i)] * hess[i];
    const auto eq = element_quadrature(perf.mesh, t, rule);
    for (int j = 0; j < npt; ++j) {
      const int q = tmic * npt + j;
      const Mat2 plain = he - macro_hess(eq[j].x);
      const Mat2 u = from_voigt3(
          {corr.at(tile, q, 0), corr.at(tile, q, 1), corr.at(tile, q, 2)});
      acc.add(eq[j].w, frob2(plain - u), frob2(plain),
              interior_point(eq[j].x, perf.eps));
    }
  }
  return acc.finish();
}

namespace {

// Point evaluation of P2 fields on the structured square mesh that
// rectangle_mesh(1, 1, n, n) produces.
class RectEval {
 public:
  RectEval(const TriMesh& mesh, const P2Space& space, int n)
      : mesh_(&mesh), space_(&space), n_(n) {}

  Mat2 strain(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2,
              const Vec2& x) const {
    const Piece p = piece(x);
    Mat2 grad = Mat2::Zero();
    for (int i = 0; i < 6; ++i) {
      const int node = space_->node(p.t, i);
      grad.col(0) += u1[node] * p.grad.row(i).transpose();
      grad.col(1) += u2[node] * p.grad.row(i).transpose();
    }
    return sym(grad);
  }

  Vec2 gradient(const Eigen::VectorXd& f, const Vec2& x) const {
    const Piece p = piece(x);
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 6; ++i)
      g += f[space_->node(p.t, i)] * p.grad.row(i).transpose();
    return g;
  }

  Mat2 hessian(const Eigen::VectorXd& f, const Vec2& x) const {
    const Piece p = piece(x);
    const auto hess = element_hessians(*mesh_, p.t);
    Mat2 h = Mat2::Zero();
    for (int i = 0; i < 6; ++i) h += f[space_->node(p.t, i)] * hess[i];
    return h;
  }

 private:
  struct Piece {
    int t;
    Eigen::Matrix<double, 6, 2> grad;
  };

  Piece piece(const Vec2& x) const {
    const int i = std::clamp(static_cast<int>(std::floor(x.x() * n_)), 0, n_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(x.y() * n_)), 0, n_ - 1);
    const double s = x.x() * n_ - i, t = x.y() * n_ - j;
    const int tri = 2 * (j * n_ + i) + (s >= t ? 0 : 1);
    const ElementMap em = element_map(*mesh_, tri);
    const Vec2 xi = em.inv_t.transpose() * (x - em.origin);
    return {tri, P2Basis::gradients(xi) * em.inv_t.transpose()};
  }

  const TriMesh* mesh_;
  const P2Space* space_;
  int n_;
};

}  // namespace

ConvergenceReport run_convergence_study(const StudySetup& setup) {
  if (!setup.cell) throw ConfigError("convergence study needs a cell mesh");
  std::vector<double> eps = setup.eps_list;
  if (eps.empty()) throw ConfigError("convergence study needs an eps list");
  for (double e : eps) checked_reps(e);
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  const TriMesh cell_mesh = as_tri_mesh(*setup.cell);
  const P2Space cell_space(cell_mesh);
  const CellResults cell = homogenize_cell(cell_space, setup.mat, setup.sigma,
                                           setup.tol);

  const TriMesh macro_mesh = rectangle_mesh(1.0, 1.0, setup.macro_n,
                                            setup.macro_n);
  const P2Space macro_space(macro_mesh);
  const RectEval eval(macro_mesh, macro_space, setup.macro_n);
  MacroMesh mm;
  mm.mesh = macro_mesh;
  mm.clamp = on_unit_boundary;
  mm.ground = on_unit_boundary;

  ConvergenceReport report;
  report.tensors = cell.tensors;

  MacroSolution mem, bend;
  if (setup.membrane) {
    mem = solve_homogenized_membrane(mm, cell.tensors, setup.loads,
                                     SurfaceChart::plane(), setup.tol);
    report.macro_membrane_energy = mem.energy;
  }
  if (setup.bending) {
    bend = solve_homogenized_bending(mm, cell.tensors, setup.loads,
                                     setup.sigma, setup.tol);
    report.macro_bending_energy = bend.energy;
  }

  const auto macro_strain = [&](const Vec2& x) {
    return eval.strain(mem.u1, mem.u2, x);
  };
  const auto macro_field = [&](const Vec2& x) {
    return eval.gradient(mem.phi, x);
  };
  const auto macro_hess = [&](const Vec2& x) {
    return eval.hessian(bend.u3, x);
  };

  for (double e : eps) {
    const PerforatedMacroMesh perf =
        build_perforated_macro(*setup.cell, e);
    const EpsGrid grid = make_eps_grid(*setup.cell, e);
    ConvergenceRow row;
    row.eps = e;
    if (setup.membrane) {
      const EpsSolution es = solve_eps_membrane(perf, setup.mat, setup.loads,
                                                setup.tol);
      const MembraneCorrector corr = reconstruct_membrane_corrector(
          macro_strain, macro_field, cell_space, cell.membrane, grid);
      row.membrane_strain =
          corrector_error_membrane_strain(perf, es, macro_strain, corr, grid);
      row.membrane_field =
          corrector_error_membrane_field(perf, es, macro_field, corr, grid);
      row.membrane_energy = es.energy;
    }
    if (setup.bending) {
      const EpsSolution es = solve_eps_bending(perf, setup.mat, setup.loads,
                                               setup.sigma, setup.tol);
      const EpsField corr = reconstruct_bending_corrector(
          macro_hess, cell_space, cell.bending, grid);
      row.bending = corrector_error_bending(perf, es, macro_hess, corr, grid);
      row.bending_energy = es.energy;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pzshell
