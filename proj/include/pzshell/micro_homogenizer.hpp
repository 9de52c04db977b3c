#pragma once
// Cell problems on the perforated unit cell and the homogenized tensors.
//
// Membrane correctors solve the coupled saddle system
//   [[A, B^T], [B, -D]] (w, zeta) = loads
// where A carries c(y)sqrt_a, B the coupling e(y)sqrt_a and D the
// dielectric d(y)sqrt_a; the electric line is sign-flipped so the system
// is symmetric.  Three problems are driven by the unit membrane strains
// (through the interpolated fields Sigma^{tt}(y) = E^{tt} y) and two by
// unit electric fields (through the interpolated coordinates y_s).
// Bending correctors solve the C0 interior-penalty fourth-order problem
// driven by the quadratic profiles Pi^{tt} = y_t y_th / 2.
//
// Every homogenized tensor is assembled twice: by direct quadrature of
// the corrected fluxes and through the symmetric energy forms; the two
// agree to solver tolerance and the energy path is symmetric by
// construction.

#include <Eigen/Dense>
#include <array>
#include <functional>

#include "pzshell/c0ip.hpp"
#include "pzshell/fem_assembly.hpp"
#include "pzshell/fem_space.hpp"
#include "pzshell/tensors.hpp"

namespace pzshell {

struct MaterialField {
  std::function<Tensor4(const Vec2&)> c;        // membrane elasticity
  std::function<Tensor3(const Vec2&)> e;        // piezoelectric coupling
  std::function<Mat2(const Vec2&)> d;           // dielectric
  std::function<Tensor4(const Vec2&)> bending;  // bending elasticity
  std::function<double(const Vec2&)> sqrt_a;    // areal weight, default 1

  static MaterialField constant(const Tensor4& c, const Tensor3& e,
                                const Mat2& d, const Tensor4& bending,
                                double sqrt_a = 1.0);
  MaterialField scaled(double s) const;
};

// Pointwise symmetry and positivity checks at the quadrature points of
// the mesh; throws MaterialError naming the first violated property.
void validate_material(const MaterialField& mat, const P2Space& space,
                       const QuadratureRule& rule);

struct MembraneCellSolutions {
  // Node values per field; index is the Voigt slot of the driving strain
  // (w, zeta) or the direction of the driving field (z, eta).
  std::array<Eigen::VectorXd, 3> w1, w2, zeta;
  std::array<Eigen::VectorXd, 2> z1, z2, eta;
};

struct BendingCellSolutions {
  std::array<Eigen::VectorXd, 3> w;
};

struct HomogenizedTensors {
  Tensor4 cbar;
  Tensor3 ebar;
  Tensor3 fbar;
  Mat2 dbar;
  Tensor4 cbar_bend;
  Tensor4 cbar_energy;
  Mat2 dbar_energy;
  Tensor4 cbar_bend_energy;
  double ystar = 0.0;    // |Y*|
  double ystar_a = 0.0;  // |Y*|_a
};

struct SpdReport {
  double cbar_min;
  double dbar_min;
  double bending_min;
};

MembraneCellSolutions solve_membrane_cells(const P2Space& space,
                                           const MaterialField& mat,
                                           double tol = 1e-10);

BendingCellSolutions solve_bending_cells(const P2Space& space,
                                         const MaterialField& mat,
                                         double sigma = 20.0,
                                         double tol = 1e-10);

void assemble_membrane_tensors_direct(const MembraneCellSolutions& cells,
                                      const P2Space& space,
                                      const MaterialField& mat,
                                      HomogenizedTensors& out);

void assemble_membrane_tensors_energy(const MembraneCellSolutions& cells,
                                      const P2Space& space,
                                      const MaterialField& mat,
                                      HomogenizedTensors& out);

void assemble_bending_tensor(const BendingCellSolutions& cells,
                             const P2Space& space, const MaterialField& mat,
                             double sigma, HomogenizedTensors& out);

SpdReport spd_report(const HomogenizedTensors& tensors);

struct CellResults {
  MembraneCellSolutions membrane;
  BendingCellSolutions bending;
  HomogenizedTensors tensors;
};

CellResults homogenize_cell(const P2Space& space, const MaterialField& mat,
                            double sigma = 20.0, double tol = 1e-10);

}  // namespace pzshell
