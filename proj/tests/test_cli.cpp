#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alloylab/csv.hpp"
#include "alloylab/runner.hpp"

using namespace alloylab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string run_dir_of(const RunOutcome& outcome) {
  REQUIRE_FALSE(outcome.run_dir.empty());
  return outcome.run_dir;
}

int spawn_cli(const std::string& args) {
  const std::string cmd = std::string(ALLOYLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("double formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0, 2.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv writer is rfc 4180 shaped") {
  CsvWriter w({"a", "b"}, "deadbeef", 7);
  w.add_row({"1", "x,y"});
  const std::string out = w.render();
  CHECK(out.find("config_hash,seed,a,b\r\n") == 0);
  CHECK(out.find("deadbeef,7,1,\"x,y\"\r\n") != std::string::npos);
  CHECK_THROWS_AS(w.add_row({"only-one"}), ConfigError);
}

TEST_CASE("model parsing and strict keys") {
  const auto model = parse_model(default_config("wegner", false));
  CHECK(model.dim == 1);
  CHECK(model.mesh == 5);
  CHECK(model.u.alpha.coeffs().size() == 2);

  nlohmann::json bad = default_config("wegner", false);
  bad["model"]["typo"] = 1;
  CHECK_THROWS_AS(parse_model(bad), ConfigError);

  nlohmann::json bad_density = default_config("ids", false);
  bad_density["density"]["family"] = "gaussian";
  CHECK_THROWS_AS(parse_model(bad_density), ConfigError);
}

TEST_CASE("unknown keys are rejected with exit code 2") {
  RunOptions options;
  options.out_dir = (fs::temp_directory_path() / "alloylab_cli_badkey").string();
  nlohmann::json config = default_config("toeplitz-check", true);
  config["surprise"] = 1;
  CHECK(run_command("toeplitz-check", config, options).exit_code == 2);

  nlohmann::json config2 = default_config("spav", true);
  config2["experiment"]["oops"] = 1;
  CHECK(run_command("spav", config2, options).exit_code == 2);

  CHECK(run_command("no-such-command", default_config("spav", true), options).exit_code == 2);
}

TEST_CASE("cli process exit codes") {
  // malformed config file -> 2
  const fs::path bad = fs::temp_directory_path() / "alloylab_bad_config.json";
  std::ofstream(bad) << "{ not json";
  CHECK(spawn_cli("toeplitz-check --config " + bad.string()) == 2);
  CHECK(spawn_cli("--config /nonexistent.json spav") == 2);

  // smoke runs -> 0
  const fs::path out = fs::temp_directory_path() / "alloylab_cli_ok";
  CHECK(spawn_cli("density-examples --smoke --out " + out.string()) == 0);
  CHECK(spawn_cli("toeplitz-check --smoke --out " + out.string()) == 0);
  CHECK(spawn_cli("spav --smoke --out " + out.string()) == 0);

  // violated numeric expectation -> 1
  const fs::path cfg = fs::temp_directory_path() / "alloylab_expect.json";
  nlohmann::json config = default_config("density-examples", true);
  config["experiment"]["expect_divergence_min"] = 1e9;
  std::ofstream(cfg) << config.dump();
  CHECK(spawn_cli("density-examples --config " + cfg.string() + " --out " + out.string()) == 1);
}

TEST_CASE("outputs are bit identical across worker counts and reruns") {
  nlohmann::json config = {
      {"model",
       {{"dim", 1},
        {"mesh", 4},
        {"alpha", {{"coeffs_from_zero", {1.0, -0.5}}}},
        {"w", {{"kind", "indicator"}, {"kappa", 6.0}}},
        {"v0", {{"kind", "zero"}}}}},
      {"density", {{"family", "triangular"}}},
      {"grid", {{"box_sizes", {4, 6}}}},
      {"experiment",
       {{"samples", 24}, {"energy_percentiles", {10.0, 30.0}}, {"bootstrap", 40}}},
      {"seed", 12}};

  const fs::path base = fs::temp_directory_path() / "alloylab_det";
  fs::remove_all(base);
  std::vector<std::string> contents;
  for (int workers : {1, 3, 1}) {
    RunOptions options;
    options.workers = workers;
    options.out_dir = (base / ("w" + std::to_string(contents.size()))).string();
    const auto outcome = run_command("ids", config, options);
    REQUIRE(outcome.exit_code == 0);
    contents.push_back(slurp(fs::path(run_dir_of(outcome)) / "ids_curve.csv"));
  }
  CHECK(contents[0] == contents[1]);
  CHECK(contents[0] == contents[2]);
}

TEST_CASE("run artifacts: manifest, hash stamping, svg provenance") {
  RunOptions options;
  options.out_dir = (fs::temp_directory_path() / "alloylab_artifacts").string();
  fs::remove_all(options.out_dir);
  const auto outcome = run_command("density-examples", default_config("density-examples", true),
                                   options);
  REQUIRE(outcome.exit_code == 0);
  const fs::path dir = run_dir_of(outcome);
  const std::string hash = dir.filename().string();

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("config_hash").get<std::string>() == hash);
  CHECK(manifest.at("tool_version").get<std::string>() == kToolVersion);
  CHECK(manifest.at("outputs").size() >= 3);

  const std::string csv = slurp(dir / "density_lin.csv");
  CHECK(csv.rfind("config_hash,seed,", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(csv.find(hash) != std::string::npos);

  const std::string svg = slurp(dir / "density_divergence.svg");
  CHECK(svg.find("config_hash=" + hash) != std::string::npos);
  CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("zero-disorder ids run has an exactly zero std column") {
  nlohmann::json config = {
      {"model",
       {{"dim", 1},
        {"mesh", 4},
        {"alpha", {{"coeffs_from_zero", {1.0, -0.5}}}},
        {"w", {{"kind", "indicator"}, {"kappa", 1.0}}},
        {"v0", {{"kind", "zero"}}}}},
      {"density", {{"family", "triangular"}}},
      {"grid", {{"box_sizes", {4, 6}}}},
      {"experiment",
       {{"samples", 8},
        {"energy_percentiles", {20.0, 60.0}},
        {"bootstrap", 20},
        {"frozen_coupling", 0.25}}},
      {"seed", 2}};
  RunOptions options;
  options.out_dir = (fs::temp_directory_path() / "alloylab_frozen").string();
  fs::remove_all(options.out_dir);
  const auto outcome = run_command("ids", config, options);
  REQUIRE(outcome.exit_code == 0);

  std::istringstream csv(slurp(fs::path(run_dir_of(outcome)) / "ids_curve.csv"));
  std::string line;
  std::getline(csv, line);  // header: ...,mean_n,std_n,...
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() >= 9);
    CHECK(fields[5] == "0");  // std_n column
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("config hash is stable for identical documents") {
  const auto a = default_config("wegner", false);
  const auto b = default_config("wegner", false);
  CHECK(config_hash_hex(a) == config_hash_hex(b));
  auto c = b;
  c["seed"] = 99;
  CHECK(config_hash_hex(a) != config_hash_hex(c));
}

TEST_CASE("seed flag overrides the config seed") {
  RunOptions options;
  options.seed = 5;
  options.out_dir = (fs::temp_directory_path() / "alloylab_seed_override").string();
  fs::remove_all(options.out_dir);
  const auto outcome =
      run_command("density-examples", default_config("density-examples", true), options);
  REQUIRE(outcome.exit_code == 0);
  const auto manifest =
      nlohmann::json::parse(slurp(fs::path(run_dir_of(outcome)) / "manifest.json"));
  CHECK(manifest.at("seed").get<std::uint64_t>() == 5);
  CHECK(manifest.at("config").at("seed").get<std::uint64_t>() == 5);
}
