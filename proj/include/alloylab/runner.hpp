#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alloylab/model.hpp"

namespace alloylab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::string out_dir = "runs";
  int workers = 1;
  bool smoke = false;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 numeric failure, 2 config error
  std::string run_dir;
  std::vector<std::string> outputs;  // file names inside run_dir
  std::string summary;               // human readable lines
};

// Built-in configuration for a subcommand; smoke variants shrink sample
// counts so a full run stays in the seconds range.
nlohmann::json default_config(const std::string& command, bool smoke);

// FNV-1a over the canonical (sorted-key) dump of the effective run document.
std::string config_hash_hex(const nlohmann::json& canonical);

// Parses the model/density sections; exposed for tests.
ModelSpec parse_model(const nlohmann::json& config);

// Executes one subcommand with an already loaded config document.
RunOutcome run_command(const std::string& command, nlohmann::json config,
                       const RunOptions& options);

}  // namespace alloylab
