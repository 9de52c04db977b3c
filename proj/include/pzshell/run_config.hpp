#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pzshell/cell_domain.hpp"
#include "pzshell/macro_shell_solver.hpp"
#include "pzshell/micro_homogenizer.hpp"
#include "pzshell/shell_geometry.hpp"

// Run configuration: one JSON file drives every subcommand.  The schema is
// documented in the README; unknown keys are rejected with the offending key
// path so that typos never silently fall back to defaults.  All validation
// failures throw ConfigError.

namespace pzshell {

struct RunConfig {
  std::string output_dir = "out";

  SurfaceChart chart = SurfaceChart::plane();

  int cell_n = 16;
  HoleSpec hole = HoleSpec::none();

  MaterialField material;
  Loads loads;

  int macro_nx = 16, macro_ny = 16;
  double macro_lx = 1.0, macro_ly = 1.0;
  std::function<bool(const Vec2&)> clamp;   // nullptr: marker "none"
  std::function<bool(const Vec2&)> ground;  // nullptr: zero-mean potential

  std::vector<double> eps_list{0.5, 0.25, 0.125};
  int validate_macro_n = 16;
  bool validate_membrane = true;
  bool validate_bending = true;

  double tol = 1e-10;
  double sigma = 20.0;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace pzshell
