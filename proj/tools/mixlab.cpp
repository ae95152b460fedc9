// mixlab: batch runner for transport, perturbation and mixing diagnostics.
//
//   mixlab <subcommand> --config <path> [--out <dir>] [--resume]
//
// MIXLAB_THREADS caps the OpenMP thread count.

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mixlab/config.hpp"
#include "mixlab/experiment.hpp"
#include "mixlab/io.hpp"

int main(int argc, char** argv) {
  using namespace mixlab;

  if (const char* env = std::getenv("MIXLAB_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) omp_set_num_threads(threads);
  }

  CLI::App app{"Transport, anti-mixing perturbation and mixing diagnostics on the 2-torus"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  bool resume = false, quiet = false;
  for (const char* name : {"simulate", "perturb", "diagnose", "young", "metric", "selftest"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--resume", resume, "reuse checkpointed snapshots of an identical configuration");
    sub->add_flag("-q,--quiet", quiet, "suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  const Command cmd = parse_command(app.get_subcommands().front()->get_name());
  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (cmd != Command::selftest) {
      std::cerr << "mixlab: --config is required for " << to_string(cmd) << "\n";
      return exit_config;
    }
    RunOptions opt;
    opt.resume = resume;
    if (!out_dir.empty()) opt.output_dir = out_dir;
    if (!quiet) opt.log = &std::cerr;
    const RunResult r = run(cmd, cfg, opt);
    if (!quiet) std::cerr << "mixlab " << to_string(cmd) << ": exit " << r.exit_code << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "mixlab: " << e.what() << "\n";
    return exit_config;
  } catch (const IoError& e) {
    std::cerr << "mixlab: " << e.what() << "\n";
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mixlab: invalid input: " << e.what() << "\n";
    return exit_config;
  }
}
