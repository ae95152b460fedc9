#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixlab/experiment.hpp"
#include "mixlab/io.hpp"

using namespace mixlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mixlab-experiment-tests" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentConfig small(const std::string& extra = "") {
  return parse_config("grid.n = 32\ntime.T = 1\ntime.dt = 0.05\nsnapshots.every = 0.125\n" + extra);
}

RunOptions to(const fs::path& dir, bool resume = false) {
  RunOptions o;
  o.output_dir = dir;
  o.resume = resume;
  return o;
}

}  // namespace

TEST_CASE("subcommand names") {
  for (auto c : {Command::simulate, Command::perturb, Command::diagnose, Command::young, Command::metric,
                 Command::selftest})
    CHECK(parse_command(to_string(c)) == c);
  CHECK_THROWS(parse_command("plot"));
}

TEST_CASE("initial data kinds") {
  const Grid g(32);
  CHECK(initial_data(small("init.kind = half-plane\n"), g).mean() == doctest::Approx(0.0));
  CHECK(initial_data(small("init.kind = checkerboard\ninit.wavenumber = 2\n"), g).mean() == doctest::Approx(0.0));
  const auto r1 = initial_data(small("init.kind = random-sign\nseed = 3\n"), g);
  const auto r2 = initial_data(small("init.kind = random-sign\nseed = 3\n"), g);
  const auto r3 = initial_data(small("init.kind = random-sign\nseed = 4\n"), g);
  CHECK((r1 - r2).l2_norm() == 0.0);
  CHECK((r1 - r3).l2_norm() > 0.0);
  const auto ball = initial_data(small("init.radius = 0.2\n"), g);
  CHECK(ball.max() == 1.0);
  CHECK(ball.min() == 0.0);
}

TEST_CASE("simulate writes the schedule and a summary") {
  const auto out = fresh("simulate");
  const auto r = run(Command::simulate, small("field.kind = steady-shear\ninit.kind = sin-x1\n"), to(out));
  CHECK(r.exit_code == exit_ok);
  CHECK(r.summary["mix_norm"]["s=1"].size() == 9);
  CHECK(r.summary["version"] == std::string(version));
  for (const char* f : {"summary.json", "config.echo", "mixnorm_s1.csv", "l2.csv", "budget.csv", "decay_fit.csv",
                        "levelset_hminus1.csv", "precompactness_l2.csv", "snapshots/index.csv",
                        "snapshots/rho_0008.sf1", "pgm/rho_0000.pgm"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  CHECK_FALSE(r.summary["decay_fit"][0]["violation"].get<bool>());
}

TEST_CASE("re-running a configuration reproduces every artifact") {
  const auto cfg = small("init.kind = checkerboard\n");
  const auto a = fresh("det-a"), b = fresh("det-b");
  run(Command::simulate, cfg, to(a));
  run(Command::simulate, cfg, to(b));
  for (const char* f : {"summary.json", "mixnorm_s1.csv", "geometric_scale.csv", "snapshots/rho_0005.sf1"})
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
}

TEST_CASE("resume from checkpoints equals the uninterrupted run") {
  const auto cfg = small("init.kind = half-plane\n");
  const auto full = fresh("resume-full"), part = fresh("resume-part");
  run(Command::simulate, cfg, to(full));
  run(Command::simulate, cfg, to(part));
  fs::remove(part / "snapshots" / "rho_0006.sf1");
  fs::remove(part / "snapshots" / "rho_0007.sf1");
  fs::remove(part / "summary.json");
  run(Command::simulate, cfg, to(part, true));
  for (const char* f : {"summary.json", "mixnorm_s1.csv", "snapshots/rho_0006.sf1", "snapshots/rho_0007.sf1"})
    CHECK_MESSAGE(slurp(full / f) == slurp(part / f), f);
  CHECK_THROWS_AS(run(Command::simulate, small("init.kind = sin-x2\n"), to(part, true)), ConfigError);
}

TEST_CASE("diagnose reads saved snapshots without a field") {
  const auto sim = fresh("diag-src"), out = fresh("diag-out");
  const auto cfg = small("init.kind = checkerboard\n");
  run(Command::simulate, cfg, to(sim));
  auto dcfg = cfg;
  dcfg.diagnose_input = (sim / "snapshots").string();
  const auto r = run(Command::diagnose, dcfg, to(out));
  CHECK(slurp(out / "mixnorm_s1.csv") == slurp(sim / "mixnorm_s1.csv"));
  CHECK_FALSE(fs::exists(out / "budget.csv"));
  CHECK(r.summary["snapshots"] == 9);
  auto missing = cfg;
  missing.diagnose_input = (out / "nowhere").string();
  CHECK_THROWS_AS(run(Command::diagnose, missing, to(fresh("diag-missing"))), IoError);
}

TEST_CASE("metric on computed and on saved permutations") {
  const auto a = fresh("metric-a"), b = fresh("metric-b");
  const auto r = run(Command::metric, small(), to(a));
  CHECK(r.summary["permutations"] == 9);
  CHECK(fs::exists(a / "metric_sym.csv"));
  CHECK(fs::exists(a / "maps" / "map_0003.fm1"));
  auto cfg = small();
  cfg.metric_input = (a / "permutations").string();
  run(Command::metric, cfg, to(b));
  CHECK(slurp(a / "metric_sym.csv").substr(slurp(a / "metric_sym.csv").find('\n')) ==
        slurp(b / "metric_sym.csv").substr(slurp(b / "metric_sym.csv").find('\n')));
}

TEST_CASE("young pipeline") {
  const auto out = fresh("young");
  const auto r =
      run(Command::young, small("init.kind = half-plane\nyoung.macro = 4\nyoung.micro = 8\nyoung.count = 4\n"), to(out));
  const auto& y = r.summary["young"];
  CHECK(y["jensen_gap"].get<double>() >= 0.0);
  CHECK(y["marginal_young"].get<double>() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(fs::exists(out / "young.ym1"));
  CHECK_THROWS_AS(run(Command::young, small("young.macro = 3\n"), to(out)), ConfigError);
}

TEST_CASE("perturb reports the certificate and the frozen ball") {
  const auto out = fresh("perturb");
  const auto r = run(Command::perturb,
                     parse_config("grid.n = 64\ntime.T = 1\ntime.dt = 0.05\nsnapshots.every = 0.125\n"
                                  "perturb.delta = 0.1\nperturb.sweep = 0.05\ninit.radius = 0.1\n"),
                     to(out));
  CHECK(r.summary["smallness_certificate"].size() == 2);
  CHECK(r.summary["frozen_ball"]["defect"].size() == 9);
  CHECK(fs::exists(out / "frozen_ball.csv"));
  CHECK(fs::exists(out / "smallness.csv"));
}

TEST_CASE("strict mode turns resolution warnings into exit code 3") {
  const std::string cfg = "grid.n = 8\ntime.T = 4\ntime.dt = 0.5\nsnapshots.every = 0.5\nfield.kind = cellular\n"
                          "field.amplitude = 4\ninit.kind = half-plane\n";
  const auto lax = run(Command::simulate, parse_config(cfg), to(fresh("lax")));
  CHECK(lax.exit_code == exit_ok);
  CHECK_FALSE(lax.summary["warnings"].empty());
  const auto strict = run(Command::simulate, parse_config(cfg + "run.strict = true\n"), to(fresh("strict")));
  CHECK(strict.exit_code == exit_resolution);
}
