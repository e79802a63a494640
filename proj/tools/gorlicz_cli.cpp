#include <iostream>

#include "CLI11.hpp"

#include "gorlicz/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generalized-Orlicz energy minimisation: check-phi, solve, sweep and denoise runs from a JSON config"};
  gorlicz::CliOptions opts;
  std::uint64_t seed = 0;
  app.add_option("--config", opts.config_path, "JSON run configuration")->required();
  app.add_option("--output-dir", opts.output_dir, "directory for reports and fields")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  app.add_flag("--quiet", opts.quiet, "suppress the report on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gorlicz::kExitUsage;
  }
  if (*seed_opt) opts.seed = seed;
  return gorlicz::run_cli(opts, std::cout, std::cerr);
}
