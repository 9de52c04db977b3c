#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pzshell/unfold_ops.hpp"

using namespace pzshell;

namespace {

constexpr double kPi = 3.14159265358979323846;

EpsField random_field(const EpsGrid& grid, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EpsField f;
  f.comps = 1;
  f.values.resize(grid.num_cells(), grid.num_micro());
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < grid.num_micro(); ++q) f.at(k, q) = u(gen);
  return f;
}

double max_abs_diff(const EpsField& a, const EpsField& b) {
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("unfolding a constant is the constant") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const EpsGrid grid = make_eps_grid(cell, 0.25);
  const auto f = [](const Vec2&) { return 3.5; };
  CHECK(unfold_value(f, grid, 1, 2, Vec2(0.3, 0.8)) == 3.5);
  CHECK(unfold_value(f, grid, 0, 0, Vec2(0.0, 0.0)) == 3.5);
}

TEST_CASE("unfolding evaluates at the reassembled point") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const EpsGrid grid = make_eps_grid(cell, 0.5);
  const auto f = [](const Vec2& x) { return x.x(); };
  CHECK(unfold_value(f, grid, 1, 0, Vec2(0.2, 0.9)) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("unfolding an indicator stays in its cell row") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const EpsGrid grid = make_eps_grid(cell, 0.25);
  const int marked = grid.cell_index(2, 1);
  EpsField f;
  f.comps = 1;
  f.values = Eigen::MatrixXd::Zero(grid.num_cells(), grid.num_micro());
  for (int q = 0; q < grid.num_micro(); ++q) f.at(marked, q) = 1.0;
  const TwoScaleField t = unfold(f, grid);
  CHECK(!t.full);
  for (int k = 0; k < grid.num_cells(); ++k)
    for (int q = 0; q < grid.num_micro(); ++q)
      CHECK(t.at(k, 0, q, grid.num_micro()) == (k == marked ? 1.0 : 0.0));
}

TEST_CASE("unfolding is multiplicative on samples") {
  for (const HoleSpec& hole : {HoleSpec::none(), HoleSpec::disk(Vec2(0.5, 0.5), 0.25)}) {
    const PeriodicCellMesh cell = build_cell_mesh(hole, 8);
    for (double eps : {0.5, 0.25, 0.125}) {
      const EpsGrid grid = make_eps_grid(cell, eps);
      const EpsField v = random_field(grid, 11), w = random_field(grid, 23);
      CHECK(unfold_product_check(v, w, grid) <= 1e-14);

      // Constants multiply exactly.
      EpsField c2 = v, c3 = v;
      c2.values.setConstant(2.0);
      c3.values.setConstant(3.0);
      CHECK(unfold_product_check(c2, c3, grid) == 0.0);

      // A zero factor annihilates.
      EpsField z = v;
      z.values.setZero();
      CHECK(unfold_product_check(v, z, grid) == 0.0);

      // Smooth coordinate fields.
      const EpsField x1 = sample_field(grid, [](const Vec2& x) { return x.x(); });
      const EpsField x2 = sample_field(grid, [](const Vec2& x) { return x.y(); });
      CHECK(unfold_product_check(x1, x2, grid) <= 1e-15);
    }
  }
}

TEST_CASE("unfolding is linear") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 8);
  const EpsGrid grid = make_eps_grid(cell, 0.25);
  const EpsField v = random_field(grid, 5), w = random_field(grid, 7);
  EpsField lin = v;
  lin.values = 2.5 * v.values - 0.75 * w.values;
  const TwoScaleField tl = unfold(lin, grid);
  const TwoScaleField tv = unfold(v, grid), tw = unfold(w, grid);
  CHECK((tl.values - (2.5 * tv.values - 0.75 * tw.values)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("averaging inverts unfolding exactly") {
  for (const HoleSpec& hole : {HoleSpec::none(), HoleSpec::disk(Vec2(0.5, 0.5), 0.25)}) {
    const PeriodicCellMesh cell = build_cell_mesh(hole, 8);
    for (double eps : {0.5, 0.25}) {
      const EpsGrid grid = make_eps_grid(cell, eps);
      const EpsField f = random_field(grid, 17);
      const EpsField back = average(unfold(f, grid), grid);
      CHECK(max_abs_diff(f, back) == 0.0);
    }
  }
}

TEST_CASE("integration identity for the unfolded image") {
  const PeriodicCellMesh full = build_cell_mesh(HoleSpec::none(), 8);

  // Constant one over the full domain.
  {
    const EpsGrid grid = make_eps_grid(full, 0.25);
    const EpsField one = sample_field(grid, [](const Vec2&) { return 1.0; });
    const auto [lhs, rhs] = integration_identity_check(one, grid);
    CHECK(lhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(lhs - rhs) <= 1e-14);
  }

  // Perforated domain: the integral of one is the cell area.
  {
    const PeriodicCellMesh disk = build_cell_mesh(HoleSpec::disk(Vec2(0.5, 0.5), 0.25), 64);
    const EpsGrid grid = make_eps_grid(disk, 0.25);
    const EpsField one = sample_field(grid, [](const Vec2&) { return 1.0; });
    const auto [lhs, rhs] = integration_identity_check(one, grid);
    CHECK(std::abs(lhs - rhs) <= 1e-13);
    CHECK(std::abs(lhs - (1.0 - kPi / 16.0)) <= 2e-3);
  }

  // Smooth integrand over the full domain.
  {
    const EpsGrid grid = make_eps_grid(full, 0.5);
    const EpsField f = sample_field(grid, [](const Vec2& x) { return x.x() * x.y(); });
    const auto [lhs, rhs] = integration_identity_check(f, grid);
    CHECK(lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(lhs - rhs) <= 1e-14);
  }

  // Randomized fields satisfy the identity to roundoff.
  for (const HoleSpec& hole : {HoleSpec::none(), HoleSpec::disk(Vec2(0.5, 0.5), 0.25)}) {
    const PeriodicCellMesh cell = build_cell_mesh(hole, 8);
    for (double eps : {0.5, 0.25, 0.125}) {
      const EpsGrid grid = make_eps_grid(cell, eps);
      const EpsField w = random_field(grid, 31);
      const auto [lhs, rhs] = integration_identity_check(w, grid);
      CHECK(std::abs(lhs - rhs) <= 1e-14 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("averaging a macro-constant two-scale field takes cell means") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 8);
  const EpsGrid grid = make_eps_grid(cell, 0.25);
  const auto g = [](const Vec2& x) { return std::sin(x.x()) + x.y() * x.y(); };
  const TwoScaleField phi =
      sample_two_scale(grid, [&](const Vec2& x, const Vec2&) { return g(x); }, true);
  const EpsField avg = average(phi, grid);
  // The z-average of a y-constant field is the plain cell average, the same
  // number at every micro sample of the cell.
  for (int k = 0; k < grid.num_cells(); ++k) {
    double mean = 0.0;
    for (int q = 0; q < grid.num_micro(); ++q)
      mean += grid.micro_weights(q) * g(grid.sample(k, q));
    mean /= grid.ystar;
    for (int q = 0; q < grid.num_micro(); ++q)
      CHECK(avg.at(k, q) == doctest::Approx(mean).epsilon(1e-13));
  }
}

TEST_CASE("micro mean of a pure oscillation vanishes") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 16);
  const EpsGrid grid = make_eps_grid(cell, 0.25, 1.0, 1.0, 6);
  const TwoScaleField phi = sample_two_scale(
      grid, [](const Vec2&, const Vec2& y) { return std::sin(2.0 * kPi * y.x()); }, false);
  const EpsField mean = micro_mean(phi, grid);
  CHECK(mean.values.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("averages converge to the micro mean as eps shrinks") {
  // For data without micro oscillation the averaging operator returns
  // per-cell means, so the distance to the function itself shrinks at
  // first order in eps; this is the strong-convergence regime of the
  // averaging/unfolding pair.
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const auto g = [](const Vec2& x) {
    return std::sin(kPi * x.x()) * std::cos(kPi * x.y()) + x.x() * x.y();
  };
  double prev = -1.0;
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    const EpsGrid grid = make_eps_grid(cell, eps);
    const TwoScaleField phi =
        sample_two_scale(grid, [&](const Vec2& x, const Vec2&) { return g(x); }, true);
    const EpsField diff{average(phi, grid).values - micro_mean(phi, grid).values, 1};
    const double err = l2_eps(diff, grid);
    if (prev >= 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("oscillatory data converges weakly under averaging") {
  // With genuine micro oscillation the averaged field keeps an O(1)
  // oscillating remainder; only its pairing against a fixed smooth test
  // field decays.
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const auto b = [](const Vec2& y) { return std::sin(2.0 * kPi * y.x()); };
  const auto g = [](const Vec2& x) { return 1.0 + x.x() + std::sin(kPi * x.y()); };
  const auto psi = [](const Vec2& x) { return std::cos(kPi * x.x()) * x.y(); };
  double prev = -1.0;
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    const EpsGrid grid = make_eps_grid(cell, eps);
    const TwoScaleField phi = sample_two_scale(
        grid, [&](const Vec2& x, const Vec2& y) { return g(x) * b(y); }, true);
    EpsField rem{average(phi, grid).values - micro_mean(phi, grid).values, 1};
    const EpsField test = sample_field(grid, psi);
    rem.values = rem.values.cwiseProduct(test.values);
    const double pairing = std::abs(integrate_eps(rem, grid));
    if (prev >= 0.0) CHECK(pairing < prev);
    prev = pairing;
  }
}

TEST_CASE("grid construction rejects incompatible sizes") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  CHECK_THROWS_AS(make_eps_grid(cell, 0.3), ConfigError);
  CHECK_THROWS_AS(make_eps_grid(cell, 0.25, 1.1, 1.0), ConfigError);
  CHECK_THROWS_AS(make_eps_grid(cell, 0.0), ConfigError);
  CHECK_NOTHROW(make_eps_grid(cell, 1.0 / 3.0));
  CHECK_NOTHROW(make_eps_grid(cell, 0.25, 2.0, 1.0));
}

TEST_CASE("two-scale csv rows are cell-major and reproducible") {
  const PeriodicCellMesh cell = build_cell_mesh(HoleSpec::none(), 4);
  const EpsGrid grid = make_eps_grid(cell, 0.5);
  const EpsField f = random_field(grid, 3);
  const TwoScaleField t = unfold(f, grid);
  std::ostringstream a, b;
  write_two_scale_csv(a, t, grid);
  write_two_scale_csv(b, t, grid);
  CHECK(a.str() == b.str());
  int lines = 0;
  for (char c : a.str()) lines += c == '\n';
  CHECK(lines == grid.num_cells() * grid.num_micro() + 1);
}
