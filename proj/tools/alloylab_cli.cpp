#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "alloylab/runner.hpp"

namespace {

int dispatch(const std::string& command, const std::string& config_path,
             const alloylab::RunOptions& options) {
  nlohmann::json config;
  if (config_path.empty()) {
    config = alloylab::default_config(command, options.smoke);
  } else {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "config error: cannot open " << config_path << "\n";
      return 2;
    }
    try {
      in >> config;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  }
  const auto outcome = alloylab::run_command(command, std::move(config), options);
  if (outcome.exit_code == 2) {
    std::cerr << outcome.summary;
    return 2;
  }
  std::cout << outcome.summary;
  if (!outcome.run_dir.empty()) std::cout << "outputs: " << outcome.run_dir << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alloylab: numerical experiments for alloy type random operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  alloylab::RunOptions options;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "JSON config path (built-in defaults otherwise)");
  app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", options.out_dir, "output directory (default runs/)");
  app.add_option("--workers", options.workers, "worker threads");
  app.add_flag("--smoke", options.smoke, "reduced sizes for a quick pass");

  for (const std::string name :
       {"toeplitz-check", "density-examples", "wegner", "ids", "msa", "spav"})
    app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  if (seed_set) options.seed = seed;
  return dispatch(app.get_subcommands().front()->get_name(), config_path, options);
}
