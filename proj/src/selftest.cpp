#include "mixlab/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mixlab/bogovskii.hpp"
#include "mixlab/metric.hpp"
#include "mixlab/perturbation.hpp"
#include "mixlab/spectral.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/velocity.hpp"
#include "mixlab/young.hpp"

namespace mixlab {

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

std::string describe(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [k, v] : items) {
    os << (first ? "" : ", ") << k << " = " << v;
    first = false;
  }
  return os.str();
}

CheckResult fourier_values() {
  const Grid g(256);
  const auto f = ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * x.x1()); });
  const double got = sobolev_norm(f, -1.0);
  const double want = 1.0 / (2.0 * std::sqrt(2.0) * std::numbers::pi);
  // cos(2 pi (x1 + 2 x2)): |k|^2 = 5, two modes of weight 1/4
  const auto c = ScalarField::from_function(g, [](TorusPoint x) { return std::cos(tau * (x.x1() + 2.0 * x.x2())); });
  const double got2 = sobolev_norm(c, 1.0);
  const double want2 = tau * std::sqrt(5.0) / std::sqrt(2.0);
  const double e1 = std::abs(got - want), e2 = std::abs(got2 - want2) / want2;
  return {"fourier-values", e1 <= 1e-6 && e2 <= 1e-10, describe({{"H-1 error", e1}, {"H1 rel error", e2}})};
}

CheckResult shear_advection() {
  const Grid g(256);
  const FieldPtr u = make_field({FieldKind::steady_shear, 1.0, 1, 1.0, {}});
  const double t = 2.0;
  const auto rho0 = ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * x.x1()); });
  const auto got = advect(rho0, *u, 0.0, t, 0.01);
  const auto exact = ScalarField::from_function(
      g, [&](TorusPoint x) { return std::sin(tau * (x.x1() - t * std::sin(tau * x.x2()))); });
  const double err = (got - exact).l2_norm();
  return {"shear-advection", err <= 1e-3, describe({{"L2 error", err}})};
}

CheckResult bogovskii_manufactured() {
  const double d = 0.1;
  // f = div(b V) with b = ((r - d)(2d - r)/d^2)^4 and V divergence-free
  auto f = [d](Vec2 y) {
    const double r = norm(y);
    if (r <= d || r >= 2.0 * d) return 0.0;
    const double a = (r - d) * (2.0 * d - r) / (d * d);
    const double da = (3.0 * d - 2.0 * r) / (d * d);
    const Vec2 v{0.3 + y.x2 / d, 0.5 * y.x1 / d - 0.2};
    return 4.0 * a * a * a * da * dot(y, v) / r;
  };
  const AnnulusSource src(d, f);
  const auto w = bogovskii_solve(src);
  const auto a = audit_bogovskii(w, src, 2.0);

  // compatibility of the physical source along the mixer trajectory
  const FieldPtr u = make_field({FieldKind::alternating_shear, 1.0, 1, 1.0, {}});
  const auto traj = integrate_trajectory(*u, TorusPoint(0.3, 0.6), 0.0, 2.0, 0.01);
  double compat = 0.0;
  for (double t : {0.0, 0.37, 1.0, 1.71}) {
    const auto s = annulus_source(*u, t, traj.at(t), d, Limit::right, 1.0);
    compat = std::max(compat, s.compatibility_residual());
  }
  const bool ok = a.residual_rel_l2 <= 1e-3 && a.boundary_max <= 1e-6 && compat <= 1e-8;
  return {"bogovskii-manufactured", ok,
          describe({{"residual", a.residual_rel_l2}, {"boundary", a.boundary_max}, {"compatibility", compat}})};
}

CheckResult young_properties() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Grid g(8);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int macro = 1 << (trial % 3);
    const int micro = 2 << ((trial / 3) % 3);
    const auto cells = static_cast<std::uint32_t>(micro * micro);
    std::vector<EmpiricalYoungMeasure::Row> rows(static_cast<std::size_t>(macro) * macro);
    for (auto& r : rows) {
      for (std::uint32_t c = 0; c < cells; ++c)
        if (unit(rng) < 0.4) r.emplace_back(c, unit(rng));
      if (r.empty()) r.emplace_back(static_cast<std::uint32_t>(rng() % cells), 1.0);
    }
    const EmpiricalYoungMeasure nu(macro, micro, std::move(rows));
    std::vector<double> v(g.size());
    for (auto& x : v) x = 2.0 * unit(rng) - 1.0;
    worst = std::min(worst, jensen_gap(nu, ScalarField(g, std::move(v))));
  }

  // identity and rigid whole-cell translations at macro = micro = n
  const Grid fine(16);
  std::vector<double> v(fine.size());
  for (auto& x : v) x = 2.0 * unit(rng) - 1.0;
  const ScalarField rho(fine, std::move(v));
  double deterministic = 0.0;
  for (int shift : {0, 3}) {
    std::vector<FlowMap> maps;
    for (int k = 0; k < 4; ++k) {
      FlowMap m = identity_map(fine);
      for (auto& p : m.positions) p = p + Vec2{shift * fine.h(), -2.0 * shift * fine.h()};
      m.inverse = true;
      m.time = k;
      maps.push_back(std::move(m));
    }
    deterministic = std::max(deterministic, jensen_gap(empirical_young_measure(maps, 16, 16), rho));
  }
  return {"young-properties", worst >= 0.0 && deterministic <= 1e-14,
          describe({{"min random gap", worst}, {"deterministic gap", deterministic}})};
}

CheckResult metric_brute_force() {
  std::size_t mismatches = 0, pairs = 0;
  std::vector<std::uint32_t> a{0, 1, 2, 3};
  do {
    std::vector<std::uint32_t> b{0, 1, 2, 3};
    do {
      const CellPermutation p(2, a), q(2, b);
      mismatches += sym_diff_metric(p, q) != brute_force_sym_diff(p, q);
      ++pairs;
    } while (std::next_permutation(b.begin(), b.end()));
  } while (std::next_permutation(a.begin(), a.end()));
  std::mt19937_64 rng(7);
  std::vector<std::uint32_t> base(16);
  for (std::uint32_t k = 0; k < 16; ++k) base[k] = k;
  for (int trial = 0; trial < 500; ++trial) {
    auto x = base, y = base;
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    const CellPermutation p(4, x), q(4, y);
    mismatches += sym_diff_metric(p, q) != brute_force_sym_diff(p, q);
    ++pairs;
  }
  return {"metric-brute-force", mismatches == 0,
          describe({{"pairs", static_cast<double>(pairs)}, {"mismatches", static_cast<double>(mismatches)}})};
}

CheckResult metric_shrinking_translation() {
  const int side = 256;
  std::vector<CellPermutation> seq;
  for (int k = 1; k <= 8; ++k) seq.push_back(CellPermutation::translation(side, side >> k, 0));
  const auto id = CellPermutation::identity(side);
  const auto r = equivalence_experiment(seq, id);
  const double weak = weak_dyadic_metric(seq.back(), id);
  return {"metric-shrinking-translation", r.sym_to_zero && r.dl_to_zero,
          describe({{"last d_sym", r.d_sym.back()}, {"last d_DL", r.d_dl.back()}, {"last weak dyadic", weak}})};
}

CheckResult metric_half_translation() {
  const int side = 256;
  const auto id = CellPermutation::identity(side);
  const std::vector<CellPermutation> seq(8, CellPermutation::translation(side, side / 2, 0));
  const auto r = equivalence_experiment(seq, id);
  double dl_err = 0.0, sym_err = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    dl_err = std::max(dl_err, std::abs(r.d_dl[k] - 0.5));
    sym_err = std::max(sym_err, std::abs(r.d_sym[k] - 1.0));
  }
  return {"metric-half-translation", dl_err <= 1e-12 && sym_err == 0.0,
          describe({{"d_DL error", dl_err}, {"d_sym error", sym_err}})};
}

}  // namespace

std::vector<CheckResult> run_selftest(std::ostream* log) {
  std::vector<CheckResult> out;
  const std::pair<const char*, CheckResult (*)()> checks[] = {
      {"fourier-values", fourier_values},
      {"shear-advection", shear_advection},
      {"bogovskii-manufactured", bogovskii_manufactured},
      {"young-properties", young_properties},
      {"metric-brute-force", metric_brute_force},
      {"metric-shrinking-translation", metric_shrinking_translation},
      {"metric-half-translation", metric_half_translation},
  };
  for (const auto& [name, check] : checks) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {name, false, std::string("exception: ") + e.what()};
    }
    if (log) *log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mixlab
