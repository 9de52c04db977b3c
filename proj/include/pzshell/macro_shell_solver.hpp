#pragma once

#include <Eigen/Dense>
#include <functional>

#include "pzshell/fem_space.hpp"
#include "pzshell/micro_homogenizer.hpp"
#include "pzshell/shell_geometry.hpp"

namespace pzshell {

// Mid-surface domain with boundary part markers.  The marker predicates are
// evaluated at node coordinates (and at edge midpoints for the clamped
// rotation terms), so they must describe the boundary parts geometrically.
struct MacroMesh {
  TriMesh mesh;
  std::function<bool(const Vec2&)> clamp;      // mechanical clamp
  std::function<bool(const Vec2&)> ground;     // electric ground
  std::function<bool(const Vec2&)> electrode;  // default: everywhere
};

// Through-thickness body loads f^i(x, t), t in [-1, 1], plus mid-surface
// traction densities q^i already reduced from the two faces.  Unset entries
// mean zero.
struct Loads {
  std::array<std::function<double(const Vec2&, double)>, 3> f;
  std::array<std::function<double(const Vec2&)>, 3> q;
};

// Thickness integral of one load component by Gauss quadrature (npts >= 3
// integrates degree-5 polynomials exactly).
std::function<double(const Vec2&)> thickness_reduce(
    std::function<double(const Vec2&, double)> f, int npts = 3);

struct MacroSolution {
  Eigen::VectorXd u1, u2, u3, phi;  // nodal values
  double energy = 0.0;              // elastic plus dielectric quadratic energy
  double load_work = 0.0;           // load functional applied to the solution
  double residual = 0.0;
};

// Effective membrane problem on the mid surface: the coupled (u, phi) system
// with constant homogenized tensors, membrane strains built from the chart's
// geometric coefficients, and loads scaled by the weighted cell area.  On a
// flat chart the transverse component decouples from the membrane operator
// and is returned as zero; curved charts carry it as an extra unknown with
// no boundary condition of its own.  Throws ConfigError when the mechanical
// clamp matches no node; a ground marker matching no node falls back to a
// zero-mean potential.
MacroSolution solve_homogenized_membrane(const MacroMesh& macro,
                                         const HomogenizedTensors& tensors,
                                         const Loads& loads,
                                         const SurfaceChart& chart,
                                         double tol = 1e-10);

// Effective bending problem for the transverse deflection on a flat chart:
// interior-penalty discretization of the fourth-order operator with moment
// density (2/3) Cbar, clamped parts taking a strong zero on the deflection
// and one-sided penalty terms on its normal derivative.  Throws ConfigError
// when the penalty is below its stability floor or the clamp is empty.
MacroSolution solve_homogenized_bending(const MacroMesh& macro,
                                        const HomogenizedTensors& tensors,
                                        const Loads& loads, double sigma = 20.0,
                                        double tol = 1e-10);

}  // namespace pzshell
