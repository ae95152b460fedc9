#include "mixlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "mixlab/diagnostics.hpp"
#include "mixlab/io.hpp"
#include "mixlab/metric.hpp"
#include "mixlab/perturbation.hpp"
#include "mixlab/selftest.hpp"
#include "mixlab/spectral.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/young.hpp"

namespace mixlab {

namespace fs = std::filesystem;
using nlohmann::json;

Command parse_command(std::string_view s) {
  if (s == "simulate") return Command::simulate;
  if (s == "perturb") return Command::perturb;
  if (s == "diagnose") return Command::diagnose;
  if (s == "young") return Command::young;
  if (s == "metric") return Command::metric;
  if (s == "selftest") return Command::selftest;
  throw std::invalid_argument("unknown subcommand '" + std::string(s) + "'");
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::perturb: return "perturb";
    case Command::diagnose: return "diagnose";
    case Command::young: return "young";
    case Command::metric: return "metric";
    case Command::selftest: return "selftest";
  }
  return "?";
}

namespace {

TorusPoint perturbation_anchor(const ExperimentConfig& cfg, Grid grid) {
  return cfg.perturb_anchor.value_or(default_anchor(grid));
}

double field_horizon(const ExperimentConfig& cfg) {
  const auto yt = cfg.young_times();
  return yt.empty() ? cfg.horizon : std::max(cfg.horizon, yt.back());
}

PerturbationPtr make_perturbation(const ExperimentConfig& cfg, FieldPtr base, double delta) {
  PerturbationSpec spec;
  spec.delta = delta;
  spec.anchor = cfg.perturb_anchor;
  spec.backend = cfg.perturb_backend;
  spec.horizon = field_horizon(cfg);
  spec.h_t = cfg.dt;
  return std::make_shared<const Perturbation>(std::move(base), spec, perturbation_anchor(cfg, Grid(cfg.n)));
}

std::string numbered(std::string_view stem, std::size_t k, std::string_view ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu", k);
  return std::string(stem) + buf + std::string(ext);
}

std::vector<std::string> labels(std::span<const double> v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(format_double(x));
  return out;
}

/// Per-run state shared by the pipelines.
class Run {
 public:
  Run(const ExperimentConfig& cfg, const RunOptions& opt)
      : cfg_(cfg), out_(opt.output_dir.value_or(cfg.output_dir)), log_(opt.log), resume_(opt.resume) {
    summary_["version"] = std::string(version);
    summary_["config"] = cfg.echo();
    summary_["warnings"] = json::array();
  }

  const ExperimentConfig& cfg() const { return cfg_; }
  const fs::path& out() const { return out_; }
  json& summary() { return summary_; }
  bool resume() const { return resume_; }

  void note(const std::string& msg) {
    if (log_) *log_ << msg << '\n';
  }
  void warn(const std::string& msg) {
    summary_["warnings"].push_back(msg);
    note("warning: " + msg);
  }
  void resolution_failure(const std::string& msg) {
    warn(msg);
    resolution_failed_ = true;
  }

  /// Checks or writes the config echo. A resumed run must see the same echo.
  void open_output() {
    fs::create_directories(out_);
    const fs::path echo = out_ / "config.echo";
    if (resume_ && fs::exists(echo)) {
      std::ifstream is(echo, std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      if (ss.str() != cfg_.echo())
        throw ConfigError(0, "", "cannot resume: " + echo.string() + " records a different configuration");
    }
    std::ofstream os(echo, std::ios::binary | std::ios::trunc);
    os << cfg_.echo();
    if (!os) throw IoError("cannot write " + echo.string());
  }

  RunResult finish(const std::string& command) {
    summary_["command"] = command;
    const fs::path path = out_ / "summary.json";
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << summary_.dump(2) << '\n';
    if (!os) throw IoError("cannot write " + path.string());
    RunResult r;
    r.summary = summary_;
    r.exit_code = (cfg_.strict && resolution_failed_) ? exit_resolution : exit_ok;
    return r;
  }

 private:
  const ExperimentConfig& cfg_;
  fs::path out_;
  std::ostream* log_;
  bool resume_;
  bool resolution_failed_ = false;
  json summary_;
};

void write_audit(const fs::path& path, const MeasureReport& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << "under_resolved = " << (m.under_resolved ? 1 : 0) << '\n'
     << "jacobian_max_dev = " << format_double(m.jacobian_max_dev) << '\n'
     << "empty_fraction = " << format_double(m.empty_fraction) << '\n'
     << "multi_fraction = " << format_double(m.multi_fraction) << '\n';
  if (!os) throw IoError("cannot write " + path.string());
}

MeasureReport read_audit(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  MeasureReport m;
  std::string key, eq;
  double value = 0.0;
  while (is >> key >> eq >> value) {
    if (key == "under_resolved") m.under_resolved = value != 0.0;
    else if (key == "jacobian_max_dev") m.jacobian_max_dev = value;
    else if (key == "empty_fraction") m.empty_fraction = value;
    else if (key == "multi_fraction") m.multi_fraction = value;
  }
  return m;
}

struct Series {
  std::vector<double> times;
  std::vector<ScalarField> snapshots;
};

/// rho(t) = rho0 o Phi_t^{-1} at every scheduled time, each from its own
/// backward trace so a resumed run reproduces the uninterrupted one.
Series transport_series(Run& run, const VelocityField& u, const ScalarField& rho0) {
  const auto& cfg = run.cfg();
  const Grid grid = rho0.grid();
  Series s;
  s.times = cfg.snapshot_times();
  const fs::path dir = run.out() / "snapshots";
  fs::create_directories(dir);
  std::ofstream index(dir / "index.csv", std::ios::binary | std::ios::trunc);
  index << "k,t,file,under_resolved,jacobian_max_dev\n";
  std::size_t reused = 0, flagged = 0;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const double t = s.times[k];
    const fs::path file = dir / numbered("rho", k, ".sf1");
    const fs::path audit_file = dir / numbered("rho", k, ".audit");
    MeasureReport audit;
    if (run.resume() && fs::exists(file) && fs::exists(audit_file)) {
      s.snapshots.push_back(read_scalar_field(file));
      audit = read_audit(audit_file);
      ++reused;
    } else {
      const FlowMap inv = t == 0.0 ? identity_map(grid) : inverse_flow_map(u, t, grid, cfg.dt);
      audit = measure_preservation_report(inv);
      s.snapshots.push_back(compose(rho0, inv));
      write_scalar_field(file, s.snapshots.back());
      write_audit(audit_file, audit);
    }
    if (audit.under_resolved) ++flagged;
    index << k << ',' << format_double(t) << ',' << file.filename().string() << ',' << (audit.under_resolved ? 1 : 0)
          << ',' << format_double(audit.jacobian_max_dev) << '\n';
    run.note("snapshot " + std::to_string(k) + " t = " + format_double(t));
  }
  if (!index) throw IoError("cannot write snapshot index");
  run.summary()["snapshots"] = s.times.size();
  if (reused > 0) run.note("reused " + std::to_string(reused) + " checkpointed snapshots");
  if (flagged > 0)
    run.resolution_failure(std::to_string(flagged) + " snapshot flow maps failed the measure-preservation audit");
  return s;
}

/// The two values of a binary field, if it has exactly two.
std::optional<std::pair<double, double>> binary_levels(const ScalarField& f) {
  std::set<double> v(f.values().begin(), f.values().end());
  if (v.size() != 2) return std::nullopt;
  return std::pair{*v.begin(), *v.rbegin()};
}

void series_diagnostics(Run& run, const Series& s, const VelocityField* u) {
  const auto& cfg = run.cfg();
  json& sum = run.summary();
  const ScalarField& rho0 = s.snapshots.front();
  const fs::path out = run.out();

  std::vector<double> budget;
  if (u) {
    budget = gradient_budget(*u, s.times, cfg.budget_p, Grid(cfg.budget_grid));
    write_series_csv(out / "budget.csv", s.times, budget);
    sum["gradient_budget"] = budget.back();
  }

  std::vector<double> l2;
  for (const auto& r : s.snapshots) l2.push_back(r.shifted(-r.mean()).l2_norm());
  write_series_csv(out / "l2.csv", s.times, l2);
  sum["l2"] = l2;

  json fits = json::array();
  for (double sob : cfg.sobolev_s) {
    std::vector<double> m;
    for (const auto& r : s.snapshots) m.push_back(mix_norm(r, sob));
    const std::string tag = "s=" + format_double(sob);
    write_series_csv(out / ("mixnorm_s" + format_double(sob) + ".csv"), s.times, m);
    sum["mix_norm"][tag] = m;
    if (!u) continue;
    if (s.times.size() < 4 || std::any_of(m.begin(), m.end(), [](double x) { return !(x > 0.0); })) {
      run.warn("decay fit skipped for " + tag + ": needs 4 positive values");
      continue;
    }
    const DecayFit f = fit_decay(s.times, m, budget);
    fits.push_back({{"s", sob}, {"c1", f.c1}, {"c2", f.c2}, {"fitted_points", f.fitted_points},
                    {"max_shortfall", f.max_shortfall}, {"violation", f.violation}});
    if (f.violation) run.warn("mix-norm " + tag + " decays faster than exponentially in the gradient budget");
  }
  if (u) {
    sum["decay_fit"] = fits;
    std::ofstream os(out / "decay_fit.csv", std::ios::binary | std::ios::trunc);
    os << "s,c1,c2,fitted_points,max_shortfall,violation\n";
    for (const auto& f : fits)
      os << format_double(f["s"].get<double>()) << ',' << format_double(f["c1"].get<double>()) << ','
         << format_double(f["c2"].get<double>()) << ',' << f["fitted_points"].get<std::size_t>() << ','
         << format_double(f["max_shortfall"].get<double>()) << ',' << (f["violation"].get<bool>() ? 1 : 0) << '\n';
  }

  if (const auto lv = binary_levels(rho0)) {
    const double mid = 0.5 * (lv->first + lv->second);
    std::vector<double> eps;
    std::vector<int> unmixed;
    for (const auto& r : s.snapshots) {
      std::vector<double> sign(r.grid().size());
      for (std::size_t k = 0; k < sign.size(); ++k) sign[k] = r[k] >= mid ? 1.0 : -1.0;
      const GeometricScale g = geometric_mixing_scale(ScalarField(r.grid(), std::move(sign)), cfg.kappa);
      eps.push_back(g.epsilon);
      unmixed.push_back(g.unmixed ? 1 : 0);
    }
    write_series_csv(out / "geometric_scale.csv", s.times, eps);
    sum["geometric_scale"] = eps;
    sum["geometric_unmixed"] = unmixed;
  }

  if (s.snapshots.size() >= 8) {
    const auto p = precompactness_probe(s.snapshots, s.times, cfg.probe_epsilon, cfg.probe_gap);
    write_matrix_csv(out / "precompactness_l2.csv", "t", labels(s.times), labels(s.times), p.l2_distance);
    sum["precompactness"] = {{"hint", p.hint},
                             {"net_size", p.net_size},
                             {"epsilon", p.epsilon},
                             {"min_separated_distance", p.min_separated_distance},
                             {"tail_min_separated_distance", p.tail_min_separated_distance}};
  } else {
    run.warn("precompactness probe skipped: fewer than 8 snapshots");
  }

  const std::vector<double> alphas = cfg.alphas.empty() ? default_alphas(rho0) : cfg.alphas;
  const auto prof = level_set_profile_from_snapshots(rho0, s.snapshots, s.times, alphas);
  const auto verdict = level_set_verdict(prof);
  auto rows = labels(prof.alphas);
  auto values = prof.hminus1;
  rows.push_back("rho");
  values.push_back(prof.rho_hminus1);
  write_matrix_csv(out / "levelset_hminus1.csv", "alpha", labels(s.times), rows, values);
  sum["level_set"] = {{"all_agree", verdict.all_agree},
                      {"min_rank_correlation", verdict.min_rank_correlation},
                      {"correlated_rows", verdict.correlated_rows}};

  if (cfg.write_pgm) {
    for (std::size_t k = 0; k < s.snapshots.size(); ++k)
      write_pgm(out / "pgm" / numbered("rho", k, ".pgm"), s.snapshots[k], rho0.min(), rho0.max());
  }
}

RunResult simulate(const ExperimentConfig& cfg, const RunOptions& opt) {
  Run run(cfg, opt);
  run.open_output();
  const FieldPtr u = build_field(cfg);
  run.summary()["field"] = u->describe();
  const Series s = transport_series(run, *u, initial_data(cfg, Grid(cfg.n)));
  series_diagnostics(run, s, u.get());
  return run.finish("simulate");
}

RunResult perturb(ExperimentConfig cfg, const RunOptions& opt) {
  cfg.perturb = true;
  Run run(cfg, opt);
  run.open_output();
  const Grid grid(cfg.n);
  const FieldPtr base = make_field(cfg.field);
  const auto pert = make_perturbation(cfg, base, cfg.perturb_delta);
  const auto field = std::make_shared<const PerturbedField>(base, pert);
  json& sum = run.summary();
  sum["field"] = field->describe();
  sum["backend"] = std::string(to_string(pert->backend()));
  if (pert->fell_back()) run.warn("base field has no closed-form stream function; using the bogovskii backend");

  const Series s = transport_series(run, *field, initial_data(cfg, grid));
  series_diagnostics(run, s, field.get());

  std::vector<double> deltas{cfg.perturb_delta};
  for (double d : cfg.perturb_sweep)
    if (std::find(deltas.begin(), deltas.end(), d) == deltas.end()) deltas.push_back(d);
  std::vector<std::vector<double>> cert_rows;
  json certs = json::array();
  for (double d : deltas) {
    const auto p = d == cfg.perturb_delta ? pert : make_perturbation(cfg, base, d);
    const auto c = smallness_certificate(*p, cfg.perturb_p, s.times, grid);
    cert_rows.push_back({c.sup_v_w1p, c.sup_local_grad, c.ratio, c.max_pointwise_ratio});
    certs.push_back({{"delta", d},
                     {"p", c.p},
                     {"sup_v_w1p", c.sup_v_w1p},
                     {"sup_local_grad", c.sup_local_grad},
                     {"ratio", c.ratio}});
  }
  write_matrix_csv(run.out() / "smallness.csv", "delta", {"sup_v_w1p", "sup_local_grad", "ratio", "max_pointwise_ratio"},
                   labels(deltas), cert_rows);
  sum["smallness_certificate"] = certs;

  const auto fb = verify_frozen_ball(*field, s.times, grid, cfg.dt);
  std::vector<std::vector<double>> fb_rows;
  for (std::size_t k = 0; k < fb.times.size(); ++k)
    fb_rows.push_back({fb.defect[k], fb.hminus1_perturbed[k], fb.hminus1_base[k], fb.center_gap[k]});
  write_matrix_csv(run.out() / "frozen_ball.csv", "t", {"defect", "hminus1_perturbed", "hminus1_base", "center_gap"},
                   labels(fb.times), fb_rows);
  sum["frozen_ball"] = {{"defect", fb.defect}, {"max_defect", fb.max_defect}, {"resolution_warning", fb.resolution_warning}};
  if (fb.resolution_warning) run.resolution_failure("frozen ball: Jacobian audit inside the ball failed");
  return run.finish("perturb");
}

std::vector<fs::path> inputs_with_extension(const fs::path& dir, std::string_view ext) {
  if (!fs::is_directory(dir)) throw IoError("input directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no " + std::string(ext) + " files in " + dir.string());
  return files;
}

/// Times from a snapshot index written by simulate, if present and complete.
std::optional<std::vector<double>> indexed_times(const fs::path& dir, std::size_t count) {
  std::ifstream is(dir / "index.csv");
  if (!is) return std::nullopt;
  std::string line;
  std::getline(is, line);
  std::vector<double> t;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string k, v;
    if (!std::getline(ls, k, ',') || !std::getline(ls, v, ',')) return std::nullopt;
    t.push_back(std::stod(v));
  }
  if (t.size() != count) return std::nullopt;
  return t;
}

RunResult diagnose(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.diagnose_input.empty()) throw ConfigError(0, "diagnose.input", "diagnose needs an input directory");
  Run run(cfg, opt);
  run.open_output();
  const fs::path dir = cfg.diagnose_input;
  Series s;
  for (const auto& f : inputs_with_extension(dir, ".sf1")) s.snapshots.push_back(read_scalar_field(f));
  for (const auto& f : s.snapshots)
    if (!(f.grid() == s.snapshots.front().grid())) throw IoError("snapshots in " + dir.string() + " differ in size");
  if (auto t = indexed_times(dir, s.snapshots.size())) {
    s.times = std::move(*t);
  } else {
    for (std::size_t k = 0; k < s.snapshots.size(); ++k) s.times.push_back(static_cast<double>(k) * cfg.snapshot_every);
    run.warn("no snapshot index; times taken from snapshots.every");
  }
  run.summary()["snapshots"] = s.snapshots.size();
  series_diagnostics(run, s, nullptr);
  return run.finish("diagnose");
}

RunResult young(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.n % cfg.young_macro != 0) throw ConfigError(0, "young.macro", "must divide grid.n");
  if (cfg.n % cfg.young_micro != 0) throw ConfigError(0, "young.micro", "must divide grid.n");
  if (cfg.young_count < 4) throw ConfigError(0, "young.count", "needs at least 4 window times");
  Run run(cfg, opt);
  run.open_output();
  const Grid grid(cfg.n);
  const FieldPtr u = build_field(cfg);
  const ScalarField rho0 = initial_data(cfg, grid);
  const auto times = cfg.young_times();
  std::vector<FlowMap> maps;
  std::size_t flagged = 0;
  for (double t : times) {
    maps.push_back(t == 0.0 ? identity_map(grid) : inverse_flow_map(*u, t, grid, cfg.dt));
    if (measure_preservation_report(maps.back()).under_resolved) ++flagged;
    run.note("window map t = " + format_double(t));
  }
  if (flagged > 0) run.resolution_failure(std::to_string(flagged) + " window flow maps failed the measure-preservation audit");

  const auto nu = empirical_young_measure(maps, cfg.young_macro, cfg.young_micro);
  const double l2 = rho0.shifted(-rho0.mean()).l2_norm();
  const double gap = jensen_gap(nu, rho0);
  std::vector<bool> left(static_cast<std::size_t>(cfg.young_micro) * cfg.young_micro);
  for (std::size_t c = 0; c < left.size(); ++c)
    left[c] = static_cast<int>(c % cfg.young_micro) < cfg.young_micro / 2;
  const auto mc = marginal_check(nu, left);

  // <nu, rho0> against the window average of the macro averages of rho(t_j).
  const auto expect = pushforward_expectation(nu, rho0);
  std::vector<double> window(expect.size(), 0.0);
  for (const auto& m : maps) {
    const auto a = macro_average(compose(rho0, m), cfg.young_macro);
    for (std::size_t c = 0; c < a.size(); ++c) window[c] += a[c] / static_cast<double>(maps.size());
  }
  double weak_gap = 0.0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < expect.size(); ++c) {
    weak_gap = std::max(weak_gap, std::abs(expect[c] - window[c]));
    rows.push_back({expect[c], window[c]});
    names.push_back(std::to_string(c));
  }
  write_matrix_csv(run.out() / "young.csv", "macro_cell", {"expectation", "window_average"}, names, rows);

  const std::size_t entries = nu.rows() * static_cast<std::size_t>(nu.micro()) * nu.micro();
  if (entries <= (std::size_t{1} << 22))
    write_young_weights(run.out() / "young.ym1", {nu.macro(), nu.micro(), nu.t_lo(), nu.t_hi(), nu.count()},
                        nu.dense());
  else
    run.note("young.ym1 skipped: " + std::to_string(entries) + " weights");

  json& sum = run.summary();
  sum["field"] = u->describe();
  sum["young"] = {{"window", times},
                  {"jensen_gap", gap},
                  {"l2_squared", l2 * l2},
                  {"gap_ratio", l2 > 0.0 ? gap / (l2 * l2) : 0.0},
                  {"max_tv_to_uniform", max_tv_to_uniform(nu)},
                  {"marginal_young", mc.young_mass},
                  {"marginal_lebesgue", mc.lebesgue_mass},
                  {"weak_limit_max_diff", weak_gap}};
  return run.finish("young");
}

RunResult metric(const ExperimentConfig& cfg, const RunOptions& opt) {
  Run run(cfg, opt);
  run.open_output();
  std::vector<CellPermutation> perms;
  std::vector<double> times;
  if (!cfg.metric_input.empty()) {
    for (const auto& f : inputs_with_extension(cfg.metric_input, ".cp1")) perms.push_back(read_permutation(f));
    if (auto t = indexed_times(cfg.metric_input, perms.size())) {
      times = std::move(*t);
    } else {
      run.warn("no permutation index; labelling by position");
      for (std::size_t k = 0; k < perms.size(); ++k) times.push_back(static_cast<double>(k));
    }
  } else {
    const Grid grid(cfg.n);
    const FieldPtr u = build_field(cfg);
    run.summary()["field"] = u->describe();
    times = cfg.snapshot_times();
    const auto maps = flow_maps_at(*u, times, grid, cfg.dt);
    fs::create_directories(run.out() / "permutations");
    std::ofstream index(run.out() / "permutations" / "index.csv", std::ios::binary | std::ios::trunc);
    index << "k,t,file\n";
    for (std::size_t k = 0; k < maps.size(); ++k) {
      perms.push_back(to_permutation(maps[k]));
      write_flow_map(run.out() / "maps" / numbered("map", k, ".fm1"), maps[k]);
      const auto name = numbered("perm", k, ".cp1");
      write_permutation(run.out() / "permutations" / name, perms.back());
      index << k << ',' << format_double(times[k]) << ',' << name << '\n';
    }
  }
  for (const auto& p : perms)
    if (p.side() != perms.front().side()) throw IoError("permutations differ in size");
  const auto sym = pairwise_sym_diff(perms);
  std::vector<std::vector<double>> dl(perms.size(), std::vector<double>(perms.size(), 0.0));
  for (std::size_t i = 0; i < perms.size(); ++i)
    for (std::size_t j = 0; j < perms.size(); ++j) dl[i][j] = i == j ? 0.0 : dl_metric(perms[i], perms[j]);
  const auto names = labels(times);
  write_matrix_csv(run.out() / "metric_sym.csv", "t", names, names, sym);
  write_matrix_csv(run.out() / "metric_dl.csv", "t", names, names, dl);
  json& sum = run.summary();
  sum["permutations"] = perms.size();
  if (perms.size() >= 8) {
    const auto c = compactness_probe(perms);
    sum["compactness"] = {{"eps", c.eps}, {"net_size", c.net_size}, {"min_late_distance", c.min_late_distance}};
  } else {
    run.warn("compactness probe skipped: fewer than 8 permutations");
  }
  return run.finish("metric");
}

RunResult selftest(const ExperimentConfig& cfg, const RunOptions& opt) {
  Run run(cfg, opt);
  run.open_output();
  const auto checks = run_selftest(opt.log);
  json list = json::array();
  bool ok = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    ok = ok && c.passed;
  }
  run.summary()["selftest"] = list;
  RunResult r = run.finish("selftest");
  if (!ok) r.exit_code = exit_selftest;
  return r;
}

}  // namespace

FieldPtr build_field(const ExperimentConfig& cfg) {
  FieldPtr base = make_field(cfg.field);
  if (!cfg.perturb) return base;
  auto pert = make_perturbation(cfg, base, cfg.perturb_delta);
  return std::make_shared<const PerturbedField>(std::move(base), std::move(pert));
}

ScalarField initial_data(const ExperimentConfig& cfg, Grid grid) {
  const double k = cfg.init_wavenumber;
  const double tau = 2.0 * std::numbers::pi;
  switch (cfg.init) {
    case InitKind::ball: {
      const TorusPoint c = cfg.init_center_set ? cfg.init_center : perturbation_anchor(cfg, grid);
      auto ind = ball_indicator(c, cfg.init_radius, grid);
      if (ind.empty) throw ConfigError(0, "init.radius", "ball contains no cell center");
      return std::move(ind.field);
    }
    case InitKind::sin_x1:
      return ScalarField::from_function(grid, [&](TorusPoint x) { return std::sin(tau * k * x.x1()); });
    case InitKind::sin_x2:
      return ScalarField::from_function(grid, [&](TorusPoint x) { return std::sin(tau * k * x.x2()); });
    case InitKind::checkerboard:
      return ScalarField::from_function(grid, [&](TorusPoint x) {
        const auto a = static_cast<long>(std::floor(2.0 * k * x.x1()));
        const auto b = static_cast<long>(std::floor(2.0 * k * x.x2()));
        return (a + b) % 2 == 0 ? 1.0 : -1.0;
      });
    case InitKind::half_plane:
      return ScalarField::from_function(grid, [](TorusPoint x) { return x.x1() < 0.5 ? 1.0 : -1.0; });
    case InitKind::random_sign: {
      std::mt19937_64 rng(cfg.seed);
      std::vector<double> v(grid.size());
      for (auto& x : v) x = (rng() >> 63) ? 1.0 : -1.0;
      return ScalarField(grid, std::move(v));
    }
    case InitKind::file: {
      ScalarField f = read_scalar_field(cfg.init_path);
      if (!(f.grid() == grid)) throw ConfigError(0, "init.path", "field resolution differs from grid.n");
      return f;
    }
  }
  throw std::logic_error("unhandled initial data kind");
}

RunResult run(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt) {
  switch (cmd) {
    case Command::simulate: return simulate(cfg, opt);
    case Command::perturb: return perturb(cfg, opt);
    case Command::diagnose: return diagnose(cfg, opt);
    case Command::young: return young(cfg, opt);
    case Command::metric: return metric(cfg, opt);
    case Command::selftest: return selftest(cfg, opt);
  }
  throw std::logic_error("unhandled command");
}

}  // namespace mixlab
