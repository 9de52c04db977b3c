#include "pzshell/unfold_ops.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "pzshell/errors.hpp"
#include "pzshell/fem_assembly.hpp"
#include "pzshell/fem_space.hpp"
#include "pzshell/quadrature.hpp"

namespace pzshell {

namespace {

int exact_multiple(double length, double eps, const char* what) {
  const double ratio = length / eps;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-12 * std::max(1.0, ratio))
    throw ConfigError(std::string(what) +
                      " must be a whole multiple of the cell size");
  return n;
}

void check_layout(const EpsField& f, const EpsGrid& grid) {
  if (f.values.rows() != grid.num_cells() ||
      f.values.cols() != static_cast<Eigen::Index>(grid.num_micro()) * f.comps)
    throw std::invalid_argument("field layout does not match the grid");
}

void check_layout(const TwoScaleField& phi, const EpsGrid& grid) {
  const Eigen::Index rows =
      phi.full ? static_cast<Eigen::Index>(grid.num_cells()) * grid.num_micro()
               : grid.num_cells();
  if (phi.values.rows() != rows ||
      phi.values.cols() !=
          static_cast<Eigen::Index>(grid.num_micro()) * phi.comps)
    throw std::invalid_argument("two-scale layout does not match the grid");
}

}  // namespace

EpsGrid make_eps_grid(const PeriodicCellMesh& cell, double eps, double lx,
                      double ly, int degree) {
  if (!(eps > 0)) throw ConfigError("cell size must be positive");
  const double m = 1.0 / eps;
  if (std::abs(m - std::lround(m)) > 1e-12 * m)
    throw ConfigError("cell size must be the reciprocal of a positive integer");

  EpsGrid grid;
  grid.eps = eps;
  grid.lx = lx;
  grid.ly = ly;
  grid.degree = degree;
  grid.nx = exact_multiple(lx, eps, "macro width");
  grid.ny = exact_multiple(ly, eps, "macro height");

  const TriMesh mesh = as_tri_mesh(cell);
  const QuadratureRule rule = triangle_rule(degree);
  std::vector<double> weights;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& qp : element_quadrature(mesh, t, rule)) {
      grid.micro_points.push_back(qp.x);
      weights.push_back(qp.w);
    }
  grid.micro_weights =
      Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size());
  grid.ystar = grid.micro_weights.sum();
  return grid;
}

EpsField sample_field(const EpsGrid& grid,
                      const std::function<double(const Vec2&)>& f) {
  EpsField out;
  out.comps = 1;
  out.values.resize(grid.num_cells(), grid.num_micro());
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < grid.num_micro(); ++q)
      out.values(k, q) = f(grid.sample(k, q));
  return out;
}

TwoScaleField sample_two_scale(
    const EpsGrid& grid,
    const std::function<double(const Vec2&, const Vec2&)>& phi, bool full) {
  TwoScaleField out;
  out.comps = 1;
  out.full = full;
  const int nq = grid.num_micro();
  out.values.resize(full ? static_cast<Eigen::Index>(grid.num_cells()) * nq
                         : grid.num_cells(),
                    nq);
  for (int k = 0; k < grid.num_cells(); ++k) {
    const int nx = full ? nq : 1;
    for (int qx = 0; qx < nx; ++qx) {
      const Vec2 x = full ? grid.sample(k, qx) : grid.cell_corner(k);
      for (int qy = 0; qy < nq; ++qy)
        out.values(out.row(k, qx, nq), qy) = phi(x, grid.micro_points[qy]);
    }
  }
  return out;
}

double unfold_value(const std::function<double(const Vec2&)>& f,
                    const EpsGrid& grid, int k1, int k2, const Vec2& y) {
  return f(grid.eps * (Vec2(k1, k2) + y));
}

TwoScaleField unfold(const EpsField& f, const EpsGrid& grid) {
  check_layout(f, grid);
  TwoScaleField out;
  out.values = f.values;
  out.comps = f.comps;
  out.full = false;
  return out;
}

EpsField average(const TwoScaleField& phi, const EpsGrid& grid) {
  check_layout(phi, grid);
  const int nq = grid.num_micro();
  EpsField out;
  out.comps = phi.comps;
  if (!phi.full) {
    // Compact fields are constant in the reconstruction variable, so the
    // z-mean is the value itself; taking it exactly keeps the averaging
    // operator an exact left inverse of unfolding.
    out.values = phi.values;
    return out;
  }
  out.values.setZero(grid.num_cells(), static_cast<Eigen::Index>(nq) * phi.comps);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int qz = 0; qz < nq; ++qz) {
      const double w = grid.micro_weights[qz] / grid.ystar;
      out.values.row(k) += w * phi.values.row(phi.row(k, qz, nq));
    }
  return out;
}

EpsField micro_mean(const TwoScaleField& phi, const EpsGrid& grid) {
  check_layout(phi, grid);
  const int nq = grid.num_micro();
  EpsField out;
  out.comps = phi.comps;
  out.values.setZero(grid.num_cells(), static_cast<Eigen::Index>(nq) * phi.comps);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int qx = 0; qx < nq; ++qx) {
      const auto row = phi.values.row(phi.row(k, qx, nq));
      for (int c = 0; c < phi.comps; ++c) {
        double mean = 0.0;
        for (int qy = 0; qy < nq; ++qy)
          mean += grid.micro_weights[qy] * row[qy * phi.comps + c];
        out.at(k, qx, c) = mean / grid.ystar;
      }
    }
  return out;
}

double integrate_eps(const EpsField& f, const EpsGrid& grid, int c) {
  check_layout(f, grid);
  double sum = 0.0;
  for (int k = 0; k < grid.num_cells(); ++k) {
    double inner = 0.0;
    for (int q = 0; q < grid.num_micro(); ++q)
      inner += grid.micro_weights[q] * f.at(k, q, c);
    sum += inner;
  }
  return grid.eps * grid.eps * sum;
}

double integrate_two_scale(const TwoScaleField& phi, const EpsGrid& grid,
                           int c) {
  check_layout(phi, grid);
  const int nq = grid.num_micro();
  double sum = 0.0;
  for (int k = 0; k < grid.num_cells(); ++k) {
    if (phi.full) {
      for (int qx = 0; qx < nq; ++qx) {
        double inner = 0.0;
        for (int qy = 0; qy < nq; ++qy)
          inner += grid.micro_weights[qy] * phi.at(k, qx, qy, nq, c);
        sum += grid.micro_weights[qx] * inner;
      }
    } else {
      double inner = 0.0;
      for (int qy = 0; qy < nq; ++qy)
        inner += grid.micro_weights[qy] * phi.at(k, 0, qy, nq, c);
      sum += grid.ystar * inner;
    }
  }
  return grid.eps * grid.eps * sum;
}

double l2_eps(const EpsField& f, const EpsGrid& grid) {
  check_layout(f, grid);
  double sum = 0.0;
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < grid.num_micro(); ++q)
      for (int c = 0; c < f.comps; ++c) {
        const double v = f.at(k, q, c);
        sum += grid.eps * grid.eps * grid.micro_weights[q] * v * v;
      }
  return std::sqrt(sum);
}

double unfold_product_check(const EpsField& v, const EpsField& w,
                            const EpsGrid& grid) {
  check_layout(v, grid);
  check_layout(w, grid);
  EpsField vw;
  vw.comps = 1;
  vw.values = v.values.cwiseProduct(w.values);
  const TwoScaleField tvw = unfold(vw, grid);
  const TwoScaleField tv = unfold(v, grid);
  const TwoScaleField tw = unfold(w, grid);
  return (tvw.values - tv.values.cwiseProduct(tw.values))
      .cwiseAbs()
      .maxCoeff();
}

std::pair<double, double> integration_identity_check(const EpsField& w,
                                                     const EpsGrid& grid) {
  const double direct = integrate_eps(w, grid);
  const double unfolded = integrate_two_scale(unfold(w, grid), grid) / grid.ystar;
  return {direct, unfolded};
}

void write_two_scale_csv(std::ostream& os, const TwoScaleField& phi,
                         const EpsGrid& grid) {
  check_layout(phi, grid);
  const int nq = grid.num_micro();
  os << "k1,k2,y1,y2";
  for (int c = 0; c < phi.comps; ++c) os << ",value" << c;
  os << "\n";
  char buf[32];
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int qy = 0; qy < nq; ++qy) {
      os << (k % grid.nx) << ',' << (k / grid.nx);
      const Vec2 y = grid.micro_points[qy];
      std::snprintf(buf, sizeof buf, "%.17g", y.x());
      os << ',' << buf;
      std::snprintf(buf, sizeof buf, "%.17g", y.y());
      os << ',' << buf;
      for (int c = 0; c < phi.comps; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", phi.at(k, 0, qy, nq, c));
        os << ',' << buf;
      }
      os << '\n';
    }
}

}  // namespace pzshell
