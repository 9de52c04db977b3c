#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "pzshell/cell_domain.hpp"
#include "pzshell/tensors.hpp"

namespace pzshell {

// Discrete two-scale workspace.  The macro rectangle [0,lx]x[0,ly] is split
// into complete eps-cells eps*(k + Y), eps = 1/m, and every cell carries the
// same micro sample layout: the quadrature points of a perforated cell mesh.
// A field on the perforated macro domain is stored by its values at the
// samples x = eps*(k + y_q); holes never contribute slots, so the customary
// extension by zero is built into the layout.
struct EpsGrid {
  double eps = 0.0;
  int nx = 0, ny = 0;
  double lx = 1.0, ly = 1.0;
  int degree = 4;  // quadrature degree of the micro sample layout
  std::vector<Vec2> micro_points;
  Eigen::VectorXd micro_weights;
  double ystar = 0.0;

  int num_cells() const { return nx * ny; }
  int num_micro() const { return static_cast<int>(micro_points.size()); }
  int cell_index(int k1, int k2) const { return k2 * nx + k1; }
  Vec2 cell_corner(int cell) const {
    return {eps * (cell % nx), eps * (cell / nx)};
  }
  Vec2 sample(int cell, int q) const {
    return cell_corner(cell) + eps * micro_points[q];
  }
};

// Builds the grid from a reference cell mesh.  Throws ConfigError unless
// eps = 1/m and the macro side lengths are whole multiples of eps.
EpsGrid make_eps_grid(const PeriodicCellMesh& cell, double eps, double lx = 1.0,
                      double ly = 1.0, int degree = 4);

// Field sampled on the perforated macro domain, one row per eps-cell and one
// column block per micro sample (comps values each).
struct EpsField {
  Eigen::MatrixXd values;
  int comps = 1;

  double& at(int cell, int q, int c = 0) { return values(cell, q * comps + c); }
  double at(int cell, int q, int c = 0) const {
    return values(cell, q * comps + c);
  }
};

// Field on (macro sample, micro sample) pairs.  The compact form stores one
// row per macro cell and is exact for unfolded images, which are constant in
// the macro variable within each cell; the full form stores one row per macro
// sample (cell * num_micro + qx) and represents arbitrary two-scale data.
struct TwoScaleField {
  Eigen::MatrixXd values;
  int comps = 1;
  bool full = false;

  int row(int cell, int qx, int num_micro) const {
    return full ? cell * num_micro + qx : cell;
  }
  double at(int cell, int qx, int qy, int num_micro, int c = 0) const {
    return values(row(cell, qx, num_micro), qy * comps + c);
  }
};

EpsField sample_field(const EpsGrid& grid,
                      const std::function<double(const Vec2&)>& f);
TwoScaleField sample_two_scale(
    const EpsGrid& grid,
    const std::function<double(const Vec2&, const Vec2&)>& phi,
    bool full = true);

// Pointwise unfolding of a function: f(eps*(k + y)).
double unfold_value(const std::function<double(const Vec2&)>& f,
                    const EpsGrid& grid, int k1, int k2, const Vec2& y);

// Unfolding of a sampled field.  The samples sit exactly at x = eps*(k + y_q),
// so the image is the same table read as a compact two-scale field.
TwoScaleField unfold(const EpsField& f, const EpsGrid& grid);

// Averaging operator: the mean over the reconstruction variable z of
// phi(eps*[x/eps] + eps*z, {x/eps}), evaluated at every macro sample.
EpsField average(const TwoScaleField& phi, const EpsGrid& grid);

// Micro mean (1/|Y*|) integral of phi(x, .) as a field on the macro samples.
EpsField micro_mean(const TwoScaleField& phi, const EpsGrid& grid);

double integrate_eps(const EpsField& f, const EpsGrid& grid, int c = 0);
double integrate_two_scale(const TwoScaleField& phi, const EpsGrid& grid,
                           int c = 0);
double l2_eps(const EpsField& f, const EpsGrid& grid);

// max over samples of |T(vw) - T(v) T(w)|.
double unfold_product_check(const EpsField& v, const EpsField& w,
                            const EpsGrid& grid);

// (integral of w over the perforated domain,
//  1/|Y*| times the two-scale integral of its unfolding).
std::pair<double, double> integration_identity_check(const EpsField& w,
                                                     const EpsGrid& grid);

// CSV rows (k1, k2, y1, y2, value...) in fixed cell-major order.
void write_two_scale_csv(std::ostream& os, const TwoScaleField& phi,
                         const EpsGrid& grid);

}  // namespace pzshell
