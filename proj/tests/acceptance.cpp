// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.
//
//   acceptance --criterion N      run one criterion (1..10)
//   acceptance                    run all of them

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <CLI11.hpp>

#include "mixlab/bogovskii.hpp"
#include "mixlab/diagnostics.hpp"
#include "mixlab/metric.hpp"
#include "mixlab/perturbation.hpp"
#include "mixlab/spectral.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/young.hpp"

using namespace mixlab;

namespace tol {
constexpr double c1_value = 1e-6;
constexpr double c1_seconds = 1.0;
constexpr double c2_l2 = 1e-3;
constexpr double c2_seconds = 30.0;
constexpr double c3_defect = 0.05;
constexpr double c3_keep = 0.5;
constexpr double c3_mixed = 0.1;
constexpr double c3_ratio_spread = 2.0;
constexpr double c3_seconds = 600.0;
constexpr double c4_residual = 1e-3;
constexpr double c4_boundary = 1e-6;
constexpr double c4_compat = 1e-8;
constexpr double c4_seconds = 120.0;
constexpr double c6_mixer_gap = 0.5;
constexpr double c6_frozen_gap = 0.05;
constexpr double c6_marginal = 0.02;
constexpr double c6_seconds = 300.0;
constexpr double c7_rank = 0.9;
constexpr double c7_floor = 0.01;
constexpr double c7_seconds = 300.0;
constexpr double c8_band = 0.05;
constexpr double c8_seconds = 60.0;
constexpr double c9_eps = 0.25;
constexpr std::size_t c9_frozen_net = 4;
constexpr double c9_seconds = 300.0;
constexpr double c10_seconds = 900.0;
}  // namespace tol

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

void line(const std::string& s) { std::cout << "  " << s << std::endl; }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string verdict(bool ok) { return ok ? "ok" : "FAILED"; }

std::vector<double> range(double t0, double t1, double step) {
  std::vector<double> t;
  for (int k = 0; t0 + k * step <= t1 + 1e-12; ++k) t.push_back(t0 + k * step);
  return t;
}

FieldPtr mixer() { return make_field({FieldKind::alternating_shear, 1.0, 1, 1.0, {}}); }

std::shared_ptr<const PerturbedField> frozen(double delta, double horizon, Grid grid) {
  PerturbationSpec s;
  s.delta = delta;
  s.horizon = horizon;
  s.h_t = 0.01;
  auto base = mixer();
  auto p = std::make_shared<const Perturbation>(base, s, default_anchor(grid));
  return std::make_shared<const PerturbedField>(base, p);
}

std::vector<ScalarField> transported(const ScalarField& rho0, const VelocityField& u, std::span<const double> times,
                                     double h_t) {
  std::vector<ScalarField> out;
  for (double t : times)
    out.push_back(t == 0.0 ? rho0 : compose(rho0, inverse_flow_map(u, t, rho0.grid(), h_t)));
  return out;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  const Grid g(256);
  const auto f = ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * x.x1()); });
  const double got = sobolev_norm(f, -1.0);
  const double want = 1.0 / (2.0 * std::sqrt(2.0) * std::numbers::pi);
  line("H^-1 norm of sin(2 pi x1) = " + fmt(got) + ", closed form " + fmt(want));
  return std::abs(got - want) <= tol::c1_value;
}

bool criterion2() {
  const Grid g(256);
  const double t = 2.0;
  const auto u = make_field({FieldKind::steady_shear, 1.0, 1, 1.0, {}});
  auto rho0_fn = [](double x1, double x2) { return std::sin(tau * x1) + 0.5 * std::cos(tau * (x1 + 2.0 * x2)); };
  const auto rho0 = ScalarField::from_function(g, [&](TorusPoint x) { return rho0_fn(x.x1(), x.x2()); });
  const auto got = advect(rho0, *u, 0.0, t, 0.01);
  const auto exact = ScalarField::from_function(
      g, [&](TorusPoint x) { return rho0_fn(x.x1() - t * std::sin(tau * x.x2()), x.x2()); });
  const double err = (got - exact).l2_norm();
  line("L2 distance to the exact shear solution at t = 2: " + fmt(err));
  return err <= tol::c2_l2;
}

bool criterion3() {
  const Grid g(512);
  const double horizon = 8.0, delta = 0.1;
  const auto field = frozen(delta, horizon, g);
  const auto& pert = field->perturbation();

  // (a) support of v and freezing inside B_delta, on every cell center
  double outside = 0.0, inside = 0.0;
  std::vector<TorusPoint> pts(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) pts[k] = g.center(k);
  std::vector<Vec2> v(g.size()), w(g.size());
  for (double t : range(0.0, horizon, 0.25)) {
    const auto f = pert.frame(t);
    pert.velocities(t, pts, v, Limit::right);
    field->velocities(t, pts, w, Limit::right);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double r = norm(torus_offset(f.center, pts[k]));
      if (r >= 2.0 * delta) outside = std::max(outside, norm(v[k]));
      if (r <= delta) inside = std::max(inside, norm(w[k] - f.center_velocity));
    }
  }
  const bool a = outside == 0.0 && inside <= 1e-12;
  line("(a) max |v| outside B_2delta = " + fmt(outside) + ", max |u+v - u(c)| inside B_delta = " + fmt(inside) +
       " " + verdict(a));

  // (b), (c) frozen ball under u+v and mixing under u
  const auto times = range(0.0, horizon, 0.5);
  const auto fb = verify_frozen_ball(*field, times, g, 0.01, false, 1.0);
  const bool b = fb.max_defect <= tol::c3_defect;
  line("(b) max frozen-ball defect r(t) = " + fmt(fb.max_defect) + " (budget " + fmt(tol::c3_defect) + ")" +
       (fb.resolution_warning ? " [resolution warning]" : "") + " " + verdict(b));
  double kept = 1.0;
  for (double h : fb.hminus1_perturbed) kept = std::min(kept, h / fb.hminus1_perturbed.front());
  const double mixed = fb.hminus1_base.back() / fb.hminus1_base.front();
  const bool c = kept >= tol::c3_keep && mixed < tol::c3_mixed;
  line("(c) min H^-1 ratio under u+v = " + fmt(kept) + ", H^-1 ratio under u at t = 8: " + fmt(mixed) + " " +
       verdict(c));

  // (d) smallness across delta
  const auto cert_times = range(0.0, horizon, 0.25);
  std::vector<double> sup_v, ratio;
  for (double d : {0.1, 0.05, 0.025}) {
    const auto f = frozen(d, horizon, g);
    const auto cert = smallness_certificate(f->perturbation(), 2.0, cert_times, g);
    sup_v.push_back(cert.sup_v_w1p);
    ratio.push_back(cert.ratio);
    line("    delta = " + fmt(d) + ": sup ||v||_W1,2 = " + fmt(cert.sup_v_w1p) + ", sup local ||grad u||_L2 = " +
         fmt(cert.sup_local_grad) + ", ratio = " + fmt(cert.ratio));
  }
  const bool monotone = sup_v[0] > sup_v[1] && sup_v[1] > sup_v[2];
  const double spread = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
  const bool d = monotone && spread <= tol::c3_ratio_spread;
  line("(d) monotone decrease " + std::string(monotone ? "yes" : "no") + ", ratio spread x" + fmt(spread) + " " +
       verdict(d));
  return a && b && c && d;
}

AnnulusSource manufactured_source(double d) {
  return AnnulusSource(d, [d](Vec2 y) {
    const double r = norm(y);
    if (r <= d || r >= 2.0 * d) return 0.0;
    const double a = (r - d) * (2.0 * d - r) / (d * d);
    const double da = (3.0 * d - 2.0 * r) / (d * d);
    const Vec2 v{0.3 + y.x2 / d, 0.5 * y.x1 / d - 0.2};
    return 4.0 * a * a * a * da * dot(y, v) / r;
  });
}

bool criterion4() {
  const double d = 0.1;
  const auto src = manufactured_source(d);
  BogovskiiOptions coarse;
  coarse.angular_nodes = 32;
  coarse.ray_panels = 2;
  const auto a_coarse = audit_bogovskii(bogovskii_solve(src, coarse), src, 2.0);
  const auto a = audit_bogovskii(bogovskii_solve(src), src, 2.0);
  line("refinement: residual " + fmt(a_coarse.residual_rel_l2) + " (coarse) -> " + fmt(a.residual_rel_l2) +
       " (default)");
  line("boundary max |w| = " + fmt(a.boundary_max) + ", stability ||w||_W1,2 / ||f||_L2 = " + fmt(a.stability));
  double compat = 0.0;
  for (auto kind : {FieldKind::alternating_shear, FieldKind::cellular, FieldKind::steady_shear}) {
    const auto u = make_field({kind, 1.0, 1, 1.0, {}});
    const auto traj = integrate_trajectory(*u, TorusPoint(0.3, 0.6), 0.0, 4.0, 0.01);
    for (double t : range(0.0, 4.0, 0.37)) {
      const auto s = annulus_source(*u, t, traj.at(t), d, Limit::right, 1.0);
      compat = std::max(compat, s.compatibility_residual());
    }
  }
  line("max compatibility residual of f_t = " + fmt(compat));
  return a.residual_rel_l2 <= tol::c4_residual && a.boundary_max <= tol::c4_boundary && compat <= tol::c4_compat;
}

bool criterion5() {
  const Grid g(256);
  const auto times = range(0.0, 8.0, 0.5);
  const auto ball = ball_indicator(default_anchor(g), 0.1, g).field;
  const auto sin1 = ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * x.x1()); });
  const auto half = ScalarField::from_function(g, [](TorusPoint x) { return x.x1() < 0.5 ? 1.0 : -1.0; });
  struct Run {
    std::string name;
    FieldPtr u;
    ScalarField rho0;
  };
  const std::vector<Run> runs{
      {"mixer", mixer(), ball},
      {"shear", make_field({FieldKind::steady_shear, 1.0, 1, 1.0, {}}), sin1},
      {"cellular", make_field({FieldKind::cellular, 1.0, 1, 1.0, {}}), half},
      {"perturbed", frozen(0.1, 8.0, g), ball},
  };
  bool ok = true;
  for (const auto& r : runs) {
    const auto snaps = transported(r.rho0, *r.u, times, 0.01);
    const auto G = gradient_budget(*r.u, times, 2.0, Grid(64));
    for (double s : {0.5, 1.0}) {
      std::vector<double> m;
      for (const auto& f : snaps) m.push_back(mix_norm(f, s));
      const auto fit = fit_decay(times, m, G);
      line(r.name + " s = " + fmt(s) + ": c2 = " + fmt(fit.c2) + ", max shortfall " + fmt(fit.max_shortfall) +
           (fit.violation ? " VIOLATION" : ""));
      ok = ok && !fit.violation;
    }
  }
  return ok;
}

bool criterion6() {
  bool ok = true;
  // exact property on random pairs
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int macro = 1 << (trial % 4), micro = 2 << (trial % 3);
    const Grid g(16);
    std::vector<EmpiricalYoungMeasure::Row> rows(static_cast<std::size_t>(macro) * macro);
    for (auto& row : rows) {
      for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(micro * micro); ++c)
        if (unit(rng) < 0.35) row.emplace_back(c, unit(rng) + 1e-9);
      if (row.empty()) row.emplace_back(0u, 1.0);
    }
    std::vector<double> v(g.size());
    for (auto& x : v) x = 4.0 * unit(rng) - 2.0;
    worst = std::min(worst, jensen_gap(EmpiricalYoungMeasure(macro, micro, std::move(rows)), ScalarField(g, v)));
  }
  line("min Jensen gap over 1000 random pairs = " + fmt(worst) + " " + verdict(worst >= 0.0));
  ok = ok && worst >= 0.0;

  // identity and translation windows
  const Grid g16(16);
  std::vector<double> v(g16.size());
  for (auto& x : v) x = unit(rng);
  const ScalarField rho(g16, v);
  double det = 0.0;
  for (int shift : {0, 5}) {
    std::vector<FlowMap> maps;
    for (int k = 0; k < 4; ++k) {
      FlowMap m = identity_map(g16);
      for (auto& p : m.positions) p = p + Vec2{shift * g16.h(), 3 * shift * g16.h()};
      m.inverse = true;
      maps.push_back(std::move(m));
    }
    det = std::max(det, jensen_gap(empirical_young_measure(maps, 16, 16), rho));
  }
  line("gap of identity / translation windows = " + fmt(det) + " " + verdict(det == 0.0));
  ok = ok && det == 0.0;

  const Grid g(256);
  std::vector<bool> left(64);
  for (std::size_t c = 0; c < left.size(); ++c) left[c] = c % 8 < 4;

  // mixer tail, binary rho
  {
    const auto half = ScalarField::from_function(g, [](TorusPoint x) { return x.x1() < 0.5 ? 1.0 : -1.0; });
    std::vector<FlowMap> maps;
    for (double t : range(4.0, 7.5, 0.5)) maps.push_back(inverse_flow_map(*mixer(), t, g, 0.01));
    const auto nu = empirical_young_measure(maps, 8, 8);
    const double l2 = half.shifted(-half.mean()).l2_norm();
    const double gap = jensen_gap(nu, half);
    const auto mc = marginal_check(nu, left);
    const double rel = std::abs(mc.young_mass - mc.lebesgue_mass) / mc.lebesgue_mass;
    const bool pass = gap >= tol::c6_mixer_gap * l2 * l2 && rel <= tol::c6_marginal;
    line("mixer tail: gap / ||rho - mean||^2 = " + fmt(gap / (l2 * l2)) + ", marginal error " + fmt(rel) + " " +
         verdict(pass));
    ok = ok && pass;
  }

  // frozen ball, window of nearby times so the centers converge
  {
    const auto field = frozen(0.1, 4.1, g);
    const auto ball = ball_indicator(default_anchor(g), 0.1, g).field;
    std::vector<FlowMap> maps;
    for (double t : range(4.0, 4.0007, 1e-4)) maps.push_back(inverse_flow_map(*field, t, g, 0.01));
    const int M = 128;
    const auto nu = empirical_young_measure(maps, M, M);
    const double l2 = ball.shifted(-ball.mean()).l2_norm();
    const double gap = jensen_gap(nu, ball);
    std::vector<bool> lm(static_cast<std::size_t>(M) * M);
    for (std::size_t c = 0; c < lm.size(); ++c) lm[c] = static_cast<int>(c % M) < M / 2;
    const auto mc = marginal_check(nu, lm);
    const double rel = std::abs(mc.young_mass - mc.lebesgue_mass) / mc.lebesgue_mass;
    const bool pass = gap <= tol::c6_frozen_gap * l2 * l2 && rel <= tol::c6_marginal;
    line("frozen ball: gap / ||rho - mean||^2 = " + fmt(gap / (l2 * l2)) + ", marginal error " + fmt(rel) + " " +
         verdict(pass));
    ok = ok && pass;
  }
  return ok;
}

bool level_set_run(const std::string& name, const ScalarField& rho0, const VelocityField& u,
                   std::span<const double> times) {
  std::vector<FlowMap> maps;
  for (double t : times) maps.push_back(inverse_flow_map(u, t, rho0.grid(), 0.01));
  const auto prof = level_set_profile(rho0, maps, default_alphas(rho0));
  const auto v = level_set_verdict(prof);
  line(name + ": indicator advection vs thresholded rho, max mismatch " + fmt(prof.max_threshold_mismatch) +
       " of the set measure");
  std::size_t decayed = 0;
  for (bool b : v.rho_decayed) decayed += b;
  const bool pass = v.all_agree && v.min_rank_correlation >= tol::c7_rank;
  line(name + ": rho decayed at " + std::to_string(decayed) + "/" + std::to_string(times.size()) +
       " snapshots, verdicts agree " + (v.all_agree ? "everywhere" : "NOT everywhere") + ", min rank correlation " +
       fmt(v.min_rank_correlation) + " over " + std::to_string(v.correlated_rows) + " rows " + verdict(pass));
  if (!v.all_agree)
    for (std::size_t k = 0; k < times.size(); ++k)
      if (!v.agree[k])
        line("    t = " + fmt(times[k]) + ": rho " + (v.rho_decayed[k] ? "decayed" : "not decayed") +
             ", all level sets " + (v.alpha_decayed[k] ? "decayed" : "not decayed"));
  return pass;
}

bool criterion7() {
  const Grid g(256);
  const auto times = range(0.0, 8.0, 0.5);
  bool ok = true;
  const auto invariant = ScalarField::from_function(g, [](TorusPoint x) { return std::cos(tau * x.x2()); });
  ok = level_set_run("shear-invariant data", invariant, *make_field({FieldKind::steady_shear, 1.0, 1, 1.0, {}}),
                     times) && ok;
  const auto smooth = ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * x.x1()); });
  ok = level_set_run("mixer data", smooth, *mixer(), times) && ok;
  const auto ball = ball_indicator(default_anchor(g), 0.1, g).field;
  ok = level_set_run("frozen-ball data", ball, *frozen(0.1, 8.0, g), times) && ok;

  // rho_k = (1/k) sin(2 pi k x1) sin(2 pi k x2)
  const Grid fine(512);
  bool family = true;
  std::vector<ScalarField> indicators;
  for (int k = 1; k <= 16; ++k) {
    const auto rho = ScalarField::from_function(
        fine, [k](TorusPoint x) { return std::sin(tau * k * x.x1()) * std::sin(tau * k * x.x2()) / k; });
    const auto ind = ScalarField::from_function(fine, [k](TorusPoint x) {
      return std::sin(tau * k * x.x1()) * std::sin(tau * k * x.x2()) >= 0.0 ? 1.0 : 0.0;
    });
    const double l2 = rho.l2_norm();
    const double h = sobolev_norm(ind, -1.0);
    const bool row = std::abs(l2 - 0.5 / k) <= 1e-9 && h >= tol::c7_floor;
    line("    k = " + std::to_string(k) + ": ||rho_k||_L2 = " + fmt(l2) + ", H^-1 of 1{rho_k >= 0} = " + fmt(h) +
         ", measure " + fmt(ind.mean()) + (row ? "" : " FAILED"));
    family = family && row;
    indicators.push_back(ind);
  }
  double apart = 1.0;
  for (std::size_t i = 0; i + 1 < indicators.size(); ++i)
    apart = std::min(apart, (indicators[i] - indicators.back()).l2_norm());
  line("indicator family: min L2 distance to the k = 16 indicator = " + fmt(apart) +
       " (no L2 Cauchy subsequence)");
  line(std::string("counterexample family ") + verdict(family));
  return ok && family;
}

bool criterion8() {
  bool ok = true;
  std::size_t mismatches = 0;
  std::vector<std::uint32_t> a{0, 1, 2, 3};
  do {
    std::vector<std::uint32_t> b{0, 1, 2, 3};
    do mismatches += sym_diff_metric(CellPermutation(2, a), CellPermutation(2, b)) !=
                     brute_force_sym_diff(CellPermutation(2, a), CellPermutation(2, b));
    while (std::next_permutation(b.begin(), b.end()));
  } while (std::next_permutation(a.begin(), a.end()));
  std::mt19937_64 rng(8);
  std::vector<std::uint32_t> base(16);
  std::iota(base.begin(), base.end(), 0u);
  for (int k = 0; k < 500; ++k) {
    auto x = base, y = base;
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    mismatches += sym_diff_metric(CellPermutation(4, x), CellPermutation(4, y)) !=
                  brute_force_sym_diff(CellPermutation(4, x), CellPermutation(4, y));
  }
  line("cycle formula vs exhaustive search, 576 + 500 pairs: " + std::to_string(mismatches) + " mismatches " +
       verdict(mismatches == 0));
  ok = ok && mismatches == 0;

  const int side = 256;
  const auto id = CellPermutation::identity(side);
  std::vector<CellPermutation> shrinking;
  for (int k = 1; k <= 8; ++k) shrinking.push_back(CellPermutation::translation(side, side >> k, 0));
  const auto r = equivalence_experiment(shrinking, id, tol::c8_band);
  for (std::size_t k = 0; k < shrinking.size(); ++k)
    line("    shift 2^-" + std::to_string(k + 1) + ": d_sym = " + fmt(r.d_sym[k]) + ", d_DL = " + fmt(r.d_dl[k]) +
         ", weak dyadic = " + fmt(weak_dyadic_metric(shrinking[k], id)));
  const bool shrink = r.sym_to_zero && r.dl_to_zero;
  line("shrinking translations: d_sym -> 0 " + std::string(r.sym_to_zero ? "yes" : "no") + ", d_DL -> 0 " +
       (r.dl_to_zero ? "yes" : "no") + " " + verdict(shrink));
  ok = ok && shrink;

  const std::vector<CellPermutation> half(8, CellPermutation::translation(side, side / 2, 0));
  const auto h = equivalence_experiment(half, id, tol::c8_band);
  bool exact = true;
  for (std::size_t k = 0; k < half.size(); ++k) exact = exact && std::abs(h.d_dl[k] - 0.5) <= 1e-12 && h.d_sym[k] == 1.0;
  line("constant (1/2, 0) translation: d_DL = " + fmt(h.d_dl.front()) + ", d_sym = " + fmt(h.d_sym.front()) + " " +
       verdict(exact));
  return ok && exact;
}

bool criterion9() {
  const Grid g(256);
  const auto times = range(0.5, 8.0, 0.5);
  auto probe = [&](const std::string& name, const VelocityField& u) {
    std::vector<CellPermutation> seq;
    for (const auto& fm : flow_maps_at(u, times, g, 0.01)) seq.push_back(to_permutation(fm));
    const auto c = compactness_probe(seq, {tol::c9_eps});
    line(name + ": net size at eps = 0.25 is " + std::to_string(c.net_size[0]) + " of " +
         std::to_string(seq.size()) + ", min late distance " + fmt(c.min_late_distance));
    return c.net_size[0];
  };
  const auto field = frozen(0.1, 8.0, g);
  const std::size_t fnet = probe("frozen ball", *field);
  const std::size_t mnet = probe("mixer", *mixer());

  // level-set verdicts of the two flows, on the ball indicator
  const auto ball = ball_indicator(default_anchor(g), 0.1, g).field;
  auto decays = [&](const VelocityField& u) {
    const double h0 = sobolev_norm(ball, -1.0);
    const double h1 = sobolev_norm(compose(ball, inverse_flow_map(u, times.back(), g, 0.01)), -1.0);
    return h1 < 0.5 * h0;
  };
  const bool frozen_mixes = decays(*field), mixer_mixes = decays(*mixer());
  line(std::string("level-set verdicts: frozen ball ") + (frozen_mixes ? "mixing" : "not mixing") + ", mixer " +
       (mixer_mixes ? "mixing" : "not mixing"));
  const bool f_ok = fnet <= tol::c9_frozen_net;
  const bool m_ok = 2 * mnet >= times.size();
  line("frozen net <= 4 " + verdict(f_ok) + ", mixer net >= half " + verdict(m_ok));
  return f_ok && m_ok && !frozen_mixes && mixer_mixes;
}

bool criterion10() {
#ifndef MIXLAB_EXE
  line("mixlab executable path not configured");
  return false;
#else
  const std::string cmd = std::string(MIXLAB_EXE) + " selftest --out acceptance-selftest";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  line("mixlab selftest exit code " + std::to_string(code));
  return code == 0;
#endif
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "criterion number, 0 for all")->check(CLI::Range(0, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "spectral correctness", tol::c1_seconds, criterion1},
      {2, "advection oracle", tol::c2_seconds, criterion2},
      {3, "anti-mixing construction", tol::c3_seconds, criterion3},
      {4, "Bogovskii backend", tol::c4_seconds, criterion4},
      {5, "lower-bound consistency", 0.0, criterion5},
      {6, "Young-measure suite", tol::c6_seconds, criterion6},
      {7, "level-set characterization", tol::c7_seconds, criterion7},
      {8, "metric equivalence", tol::c8_seconds, criterion8},
      {9, "compactness concordance", tol::c9_seconds, criterion9},
      {10, "full selftest", tol::c10_seconds, criterion10},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    std::cout << "criterion " << c.id << " (" << c.title << ")" << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.run();
    } catch (const std::exception& e) {
      line(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs <= c.budget_seconds;
    if (!in_time) line("runtime " + fmt(secs) + " s exceeds the budget of " + fmt(c.budget_seconds) + " s");
    pass = pass && in_time;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << fmt(secs) << " s)"
              << std::endl;
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}
