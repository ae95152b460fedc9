#pragma once

/// @file experiment.hpp
/// @brief Batch pipelines behind the `mixlab` subcommands.
///
/// Every run writes into the output directory:
///   config.echo      canonical listing of the configuration
///   summary.json     headline numbers, warnings and the version stamp
/// plus pipeline specific CSV, PGM and binary artifacts.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "mixlab/config.hpp"
#include "mixlab/torus.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

inline constexpr std::string_view version = "1.0.0";

enum class Command { simulate, perturb, diagnose, young, metric, selftest };
Command parse_command(std::string_view s);
std::string_view to_string(Command c);

/// Exit codes of a run.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_selftest = 2;
inline constexpr int exit_resolution = 3;

struct RunOptions {
  bool resume = false;
  std::optional<std::filesystem::path> output_dir;  ///< overrides output.dir
  std::ostream* log = nullptr;
};

struct RunResult {
  int exit_code = exit_ok;
  nlohmann::json summary;
};

/// Base field of the configuration, perturbed when the perturbation block is enabled.
FieldPtr build_field(const ExperimentConfig& cfg);
/// Initial density on the configured grid.
ScalarField initial_data(const ExperimentConfig& cfg, Grid grid);

/// Runs one pipeline. Invalid configurations and unreadable inputs throw
/// ConfigError or IoError; resolution problems become warnings, or exit
/// code 3 when run.strict is set.
RunResult run(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace mixlab
