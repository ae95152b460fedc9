#include "mixlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mixlab/io.hpp"

namespace mixlab {

ConfigError::ConfigError(int line, std::string key, const std::string& what)
    : std::runtime_error((line > 0 ? "config line " + std::to_string(line) : std::string("config")) +
                         (key.empty() ? "" : " (" + key + ")") + ": " + what),
      line_(line),
      key_(std::move(key)) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Ctx {
  int line;
  const std::string& key;
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(line, key, what); }
};

double to_double(const std::string& v, const Ctx& c) {
  double x = 0.0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x)) c.fail("expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v, const Ctx& c) {
  long long x = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) c.fail("expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const Ctx& c) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  c.fail("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const Ctx& c) {
  std::vector<double> out;
  std::string s = v;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok, c));
  return out;
}

TorusPoint to_point(const std::string& v, const Ctx& c) {
  const auto xs = to_list(v, c);
  if (xs.size() != 2) c.fail("expected two coordinates");
  return {xs[0], xs[1]};
}

double positive(double x, const Ctx& c) {
  if (!(x > 0.0)) c.fail("must be positive");
  return x;
}

InitKind to_init(const std::string& v, const Ctx& c) {
  static const std::map<std::string, InitKind> table{
      {"ball", InitKind::ball},           {"sin-x1", InitKind::sin_x1},
      {"sin-x2", InitKind::sin_x2},       {"checkerboard", InitKind::checkerboard},
      {"half-plane", InitKind::half_plane}, {"random-sign", InitKind::random_sign},
      {"file", InitKind::file}};
  auto it = table.find(v);
  if (it == table.end()) c.fail("unknown initial data '" + v + "'");
  return it->second;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Ctx&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"field.kind",
       [](auto& k, auto& v, auto& c) {
         try {
           k.field.kind = parse_field_kind(v);
         } catch (const std::exception& e) {
           c.fail(e.what());
         }
       }},
      {"field.base",
       [](auto& k, auto& v, auto& c) {
         try {
           k.composite_base = parse_field_kind(v);
         } catch (const std::exception& e) {
           c.fail(e.what());
         }
         if (k.composite_base == FieldKind::composite) c.fail("a composite field cannot be its own base");
       }},
      {"field.amplitude", [](auto& k, auto& v, auto& c) { k.field.amplitude = to_double(v, c); }},
      {"field.wavenumber",
       [](auto& k, auto& v, auto& c) {
         const auto m = to_int(v, c);
         if (m < 1 || m > 1024) c.fail("wavenumber must lie in [1, 1024]");
         k.field.wavenumber = static_cast<int>(m);
       }},
      {"field.switch_period", [](auto& k, auto& v, auto& c) { k.field.switch_period = positive(to_double(v, c), c); }},
      {"field.uniform_velocity",
       [](auto& k, auto& v, auto& c) {
         const auto xs = to_list(v, c);
         if (xs.size() != 2) c.fail("expected two components");
         k.field.uniform_velocity = {xs[0], xs[1]};
       }},
      {"grid.n",
       [](auto& k, auto& v, auto& c) {
         const auto n = to_int(v, c);
         if (n < 8 || n > 4096 || !is_power_of_two(static_cast<int>(n))) c.fail("n must be a power of two in [8, 4096]");
         k.n = static_cast<int>(n);
       }},
      {"time.T",
       [](auto& k, auto& v, auto& c) {
         k.horizon = to_double(v, c);
         if (k.horizon < 0.0) c.fail("horizon must be nonnegative");
       }},
      {"time.dt", [](auto& k, auto& v, auto& c) { k.dt = positive(to_double(v, c), c); }},
      {"snapshots.every", [](auto& k, auto& v, auto& c) { k.snapshot_every = positive(to_double(v, c), c); }},
      {"init.kind", [](auto& k, auto& v, auto& c) { k.init = to_init(v, c); }},
      {"init.center",
       [](auto& k, auto& v, auto& c) {
         k.init_center = to_point(v, c);
         k.init_center_set = true;
       }},
      {"init.radius",
       [](auto& k, auto& v, auto& c) {
         k.init_radius = to_double(v, c);
         if (!(k.init_radius > 0.0 && k.init_radius < 0.5)) c.fail("radius must lie in (0, 1/2)");
       }},
      {"init.wavenumber",
       [](auto& k, auto& v, auto& c) {
         const auto m = to_int(v, c);
         if (m < 1) c.fail("wavenumber must be positive");
         k.init_wavenumber = static_cast<int>(m);
       }},
      {"init.path", [](auto& k, auto& v, auto&) { k.init_path = v; }},
      {"perturb.enabled", [](auto& k, auto& v, auto& c) { k.perturb = to_bool(v, c); }},
      {"perturb.delta",
       [](auto& k, auto& v, auto& c) {
         k.perturb_delta = to_double(v, c);
         if (!(k.perturb_delta > 0.0 && k.perturb_delta < 0.25)) c.fail("delta must lie in (0, 1/4)");
       }},
      {"perturb.anchor",
       [](auto& k, auto& v, auto& c) {
         if (v == "default")
           k.perturb_anchor.reset();
         else
           k.perturb_anchor = to_point(v, c);
       }},
      {"perturb.backend",
       [](auto& k, auto& v, auto& c) {
         try {
           k.perturb_backend = parse_backend(v);
         } catch (const std::exception& e) {
           c.fail(e.what());
         }
       }},
      {"perturb.p",
       [](auto& k, auto& v, auto& c) {
         k.perturb_p = to_double(v, c);
         if (!(k.perturb_p > 1.0)) c.fail("p must exceed 1");
       }},
      {"perturb.sweep",
       [](auto& k, auto& v, auto& c) {
         k.perturb_sweep = to_list(v, c);
         for (double d : k.perturb_sweep)
           if (!(d > 0.0 && d < 0.25)) c.fail("sweep deltas must lie in (0, 1/4)");
       }},
      {"diagnostics.s",
       [](auto& k, auto& v, auto& c) {
         k.sobolev_s = to_list(v, c);
         if (k.sobolev_s.empty()) c.fail("need at least one exponent");
         for (double s : k.sobolev_s)
           if (!(s > 0.0 && s <= 2.0)) c.fail("mix-norm exponents must lie in (0, 2]");
       }},
      {"diagnostics.alphas",
       [](auto& k, auto& v, auto& c) {
         if (v == "quantiles")
           k.alphas.clear();
         else
           k.alphas = to_list(v, c);
       }},
      {"diagnostics.kappa",
       [](auto& k, auto& v, auto& c) {
         k.kappa = to_double(v, c);
         if (!(k.kappa > 0.0 && k.kappa < 0.5)) c.fail("kappa must lie in (0, 1/2)");
       }},
      {"diagnostics.p",
       [](auto& k, auto& v, auto& c) {
         k.budget_p = to_double(v, c);
         if (!(k.budget_p > 1.0)) c.fail("p must exceed 1");
       }},
      {"diagnostics.budget_grid",
       [](auto& k, auto& v, auto& c) {
         const auto n = to_int(v, c);
         if (n < 8 || n > 4096 || !is_power_of_two(static_cast<int>(n))) c.fail("must be a power of two in [8, 4096]");
         k.budget_grid = static_cast<int>(n);
       }},
      {"diagnostics.epsilon", [](auto& k, auto& v, auto& c) { k.probe_epsilon = positive(to_double(v, c), c); }},
      {"diagnostics.gap", [](auto& k, auto& v, auto& c) { k.probe_gap = to_double(v, c); }},
      {"young.macro",
       [](auto& k, auto& v, auto& c) {
         const auto m = to_int(v, c);
         if (m < 1) c.fail("must be positive");
         k.young_macro = static_cast<int>(m);
       }},
      {"young.micro",
       [](auto& k, auto& v, auto& c) {
         const auto m = to_int(v, c);
         if (m < 1) c.fail("must be positive");
         k.young_micro = static_cast<int>(m);
       }},
      {"young.start", [](auto& k, auto& v, auto& c) { k.young_start = to_double(v, c); }},
      {"young.step", [](auto& k, auto& v, auto& c) { k.young_step = positive(to_double(v, c), c); }},
      {"young.count",
       [](auto& k, auto& v, auto& c) {
         const auto m = to_int(v, c);
         if (m < 4 || m > 4096) c.fail("window needs between 4 and 4096 maps");
         k.young_count = static_cast<int>(m);
       }},
      {"diagnose.input", [](auto& k, auto& v, auto&) { k.diagnose_input = v; }},
      {"metric.input", [](auto& k, auto& v, auto&) { k.metric_input = v; }},
      {"output.dir", [](auto& k, auto& v, auto&) { k.output_dir = v; }},
      {"output.pgm", [](auto& k, auto& v, auto& c) { k.write_pgm = to_bool(v, c); }},
      {"run.strict", [](auto& k, auto& v, auto& c) { k.strict = to_bool(v, c); }},
      {"seed",
       [](auto& k, auto& v, auto& c) {
         const auto s = to_int(v, c);
         if (s < 0) c.fail("seed must be nonnegative");
         k.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

std::string list_string(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + format_double(xs[k]);
  return s;
}

}  // namespace

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::ball: return "ball";
    case InitKind::sin_x1: return "sin-x1";
    case InitKind::sin_x2: return "sin-x2";
    case InitKind::checkerboard: return "checkerboard";
    case InitKind::half_plane: return "half-plane";
    case InitKind::random_sign: return "random-sign";
    case InitKind::file: return "file";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw, section;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "", "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(line, "", "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected key = value");
    const std::string name = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string key = section.empty() ? name : section + "." + name;
    if (name.empty()) throw ConfigError(line, "", "missing key");
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line, key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(line, key, "key given twice");
    if (value.empty()) throw ConfigError(line, key, "missing value");
    it->second(cfg, value, Ctx{line, key});
  }
  if (cfg.init == InitKind::file && cfg.init_path.empty()) throw ConfigError(line, "init.path", "file initial data needs a path");
  if (cfg.field.kind == FieldKind::composite) {
    cfg.field.kind = cfg.composite_base;
    cfg.perturb = true;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(0, "", "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> ExperimentConfig::snapshot_times() const {
  std::vector<double> t;
  for (long k = 0;; ++k) {
    const double v = static_cast<double>(k) * snapshot_every;
    if (v > horizon * (1.0 + 1e-12)) break;
    t.push_back(std::min(v, horizon));
  }
  if (t.back() < horizon) t.push_back(horizon);
  return t;
}

std::vector<double> ExperimentConfig::young_times() const {
  const double start = young_start < 0.0 ? 0.5 * horizon : young_start;
  std::vector<double> t;
  for (int j = 0; j < young_count; ++j) t.push_back(start + j * young_step);
  return t;
}

std::string ExperimentConfig::echo() const {
  auto path_line = [](const char* key, const std::string& v) {
    return v.empty() ? std::string("# ") + key + " unset\n" : std::string(key) + " = " + v + "\n";
  };
  std::ostringstream os;
  os << "field.kind = " << to_string(field.kind) << "\n"
     << "field.base = " << to_string(composite_base) << "\n"
     << "field.amplitude = " << format_double(field.amplitude) << "\n"
     << "field.wavenumber = " << field.wavenumber << "\n"
     << "field.switch_period = " << format_double(field.switch_period) << "\n"
     << "field.uniform_velocity = " << format_double(field.uniform_velocity.x1) << ", "
     << format_double(field.uniform_velocity.x2) << "\n"
     << "grid.n = " << n << "\n"
     << "time.T = " << format_double(horizon) << "\n"
     << "time.dt = " << format_double(dt) << "\n"
     << "snapshots.every = " << format_double(snapshot_every) << "\n"
     << "init.kind = " << to_string(init) << "\n"
     << (init_center_set ? "init.center = " + format_double(init_center.x1()) + ", " + format_double(init_center.x2()) + "\n"
                         : std::string("# init.center default\n"))
     << "init.radius = " << format_double(init_radius) << "\n"
     << "init.wavenumber = " << init_wavenumber << "\n"
     << path_line("init.path", init_path)
     << "perturb.enabled = " << (perturb ? "true" : "false") << "\n"
     << "perturb.delta = " << format_double(perturb_delta) << "\n"
     << (perturb_anchor
             ? "perturb.anchor = " + format_double(perturb_anchor->x1()) + ", " + format_double(perturb_anchor->x2()) + "\n"
             : std::string("# perturb.anchor default\n"))
     << "perturb.backend = " << to_string(perturb_backend) << "\n"
     << "perturb.p = " << format_double(perturb_p) << "\n"
     << (perturb_sweep.empty() ? std::string("# perturb.sweep unset\n")
                               : "perturb.sweep = " + list_string(perturb_sweep) + "\n")
     << "diagnostics.s = " << list_string(sobolev_s) << "\n"
     << (alphas.empty() ? std::string("# diagnostics.alphas quantiles\n")
                        : "diagnostics.alphas = " + list_string(alphas) + "\n")
     << "diagnostics.kappa = " << format_double(kappa) << "\n"
     << "diagnostics.p = " << format_double(budget_p) << "\n"
     << "diagnostics.budget_grid = " << budget_grid << "\n"
     << "diagnostics.epsilon = " << format_double(probe_epsilon) << "\n"
     << "diagnostics.gap = " << format_double(probe_gap) << "\n"
     << "young.macro = " << young_macro << "\n"
     << "young.micro = " << young_micro << "\n"
     << "young.start = " << format_double(young_start) << "\n"
     << "young.step = " << format_double(young_step) << "\n"
     << "young.count = " << young_count << "\n"
     << path_line("diagnose.input", diagnose_input)
     << path_line("metric.input", metric_input)
     << "output.dir = " << output_dir.string() << "\n"
     << "output.pgm = " << (write_pgm ? "true" : "false") << "\n"
     << "run.strict = " << (strict ? "true" : "false") << "\n"
     << "seed = " << seed << "\n";
  return os.str();
}

}  // namespace mixlab
