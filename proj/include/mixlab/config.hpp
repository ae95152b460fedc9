#pragma once

/// @file config.hpp
/// @brief Strict plain-text experiment configuration.
///
/// Syntax: `key = value` lines, `[section]` headers prefixing keys with
/// `section.`, `#` comments. Every key has a default; unknown or repeated
/// keys are errors reported with their line number.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixlab/perturbation.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& what);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

enum class InitKind { ball, sin_x1, sin_x2, checkerboard, half_plane, random_sign, file };

struct ExperimentConfig {
  FieldParams field{FieldKind::alternating_shear, 1.0, 1, 1.0, {}};
  FieldKind composite_base = FieldKind::alternating_shear;  ///< base when field.kind is composite
  int n = 128;
  double horizon = 1.0;     ///< time.T
  double dt = 0.01;         ///< time.dt
  double snapshot_every = 0.25;

  InitKind init = InitKind::ball;
  TorusPoint init_center{0.5, 0.5};  ///< unset: the default anchor of the grid
  bool init_center_set = false;
  double init_radius = 0.1;
  int init_wavenumber = 1;
  std::string init_path;

  bool perturb = false;
  double perturb_delta = 0.1;
  std::optional<TorusPoint> perturb_anchor;
  Backend perturb_backend = Backend::stream;
  double perturb_p = 2.0;
  std::vector<double> perturb_sweep;  ///< extra deltas for the smallness certificate

  std::vector<double> sobolev_s{1.0};
  std::vector<double> alphas;  ///< empty: 17 quantiles of the initial data
  double kappa = 1.0 / 3.0;
  double budget_p = 2.0;
  int budget_grid = 64;
  double probe_epsilon = 0.1;
  double probe_gap = 1.0;

  int young_macro = 8;
  int young_micro = 16;
  double young_start = -1.0;  ///< negative: T / 2
  double young_step = 0.5;
  int young_count = 8;

  std::string diagnose_input;
  std::string metric_input;

  std::filesystem::path output_dir = "mixlab-out";
  bool write_pgm = true;
  bool strict = false;
  std::uint64_t seed = 1;

  std::vector<double> snapshot_times() const;
  std::vector<double> young_times() const;
  /// Canonical `key = value` listing of every setting, used as the config echo.
  std::string echo() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string_view to_string(InitKind k);

}  // namespace mixlab
