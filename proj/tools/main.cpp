#include <string>

#include "CLI11.hpp"
#include "pzshell/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Two-scale homogenization toolkit for thin piezoelectric shells on "
      "perforated periodic microstructures"};
  app.require_subcommand(1);

  std::string config, outdir;
  const std::pair<const char*, const char*> cmds[] = {
      {"cell", "mesh the unit cell and solve the corrector problems"},
      {"homogenize", "compute the effective tensor set"},
      {"macro", "solve the homogenized mid-surface problems"},
      {"validate", "run the oscillating-coefficient convergence study"},
  };
  for (const auto& [name, desc] : cmds) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("config", config, "run configuration file (JSON)")
        ->required();
    sub->add_option("output_dir", outdir,
                    "output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return pzshell::run_cli(app.get_subcommands().front()->get_name(), config,
                          outdir);
}
