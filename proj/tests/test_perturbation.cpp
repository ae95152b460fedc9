#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "mixlab/perturbation.hpp"
#include "mixlab/transport.hpp"

using namespace mixlab;

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

FieldPtr mixer() { return make_field({FieldKind::alternating_shear, 1.0, 1, 1.0, {}}); }

PerturbationPtr make(FieldPtr base, double delta, Backend b, double horizon = 2.0) {
  PerturbationSpec s;
  s.delta = delta;
  s.backend = b;
  s.horizon = horizon;
  s.h_t = 0.01;
  return std::make_shared<const Perturbation>(std::move(base), s, TorusPoint(0.45, 0.3));
}

double numerical_divergence(const VelocityField& v, double t, TorusPoint x, double e) {
  const double d1 = (v.velocity(t, x + Vec2{e, 0}).x1 - v.velocity(t, x + Vec2{-e, 0}).x1) / (2 * e);
  const double d2 = (v.velocity(t, x + Vec2{0, e}).x2 - v.velocity(t, x + Vec2{0, -e}).x2) / (2 * e);
  return d1 + d2;
}

}  // namespace

TEST_CASE("cutoff profile and its gradient bound") {
  const double d = 0.1;
  CHECK(cutoff(d, {0.05, 0.0}) == 1.0);
  CHECK(cutoff(d, {0.0, 0.2}) == 0.0);
  CHECK(cutoff(d, {0.15, 0.0}) == doctest::Approx(0.5));
  double worst = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const Vec2 y{d + d * k / 1000.0, 0.0};
    worst = std::max(worst, norm(cutoff_gradient(d, y)));
    if (k > 0 && k < 1000) {
      const double e = 1e-7;
      const double fd = (cutoff(d, y + Vec2{e, 0}) - cutoff(d, y - Vec2{e, 0})) / (2 * e);
      CHECK(cutoff_gradient(d, y).x1 == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  CHECK(worst * d == doctest::Approx(cutoff_gradient_constant).epsilon(1e-6));
  CHECK_THROWS(cutoff(0.3, {0.0, 0.0}));
  CHECK_THROWS(cutoff(0.0, {0.0, 0.0}));
}

TEST_CASE("backend names") {
  CHECK(parse_backend("stream") == Backend::stream);
  CHECK(parse_backend("bogovskii") == Backend::bogovskii);
  CHECK_THROWS(parse_backend("fourier"));
}

TEST_CASE("default anchor sits half a cell off the center") {
  const auto a = default_anchor(Grid(64));
  CHECK(a.x1() == doctest::Approx(0.5 + 0.5 / 64));
  CHECK(a.x2() == doctest::Approx(0.5 + 0.5 / 64));
}

TEST_CASE("stream perturbation freezes the inner ball and vanishes outside") {
  const auto base = mixer();
  const auto p = make(base, 0.1, Backend::stream);
  const PerturbedField w(base, p);
  for (double t : {0.3, 1.0, 1.7}) {
    const auto f = p->frame(t);
    for (int k = 0; k < 24; ++k) {
      const double th = tau * k / 24.0;
      const Vec2 dir{std::cos(th), std::sin(th)};
      const Vec2 inner = w.velocity(t, f.center + dir * 0.09);
      CHECK(norm(inner - f.center_velocity) < 1e-14);
      CHECK(norm(p->velocity(t, f.center + dir * 0.2001)) == 0.0);
      CHECK(norm(p->velocity(t, f.center + dir * 0.35)) == 0.0);
      CHECK(std::abs(numerical_divergence(w, t, f.center + dir * 0.15, 1e-6)) < 1e-6);
    }
  }
}

TEST_CASE("stream perturbation has a stream function") {
  const auto base = mixer();
  const auto p = make(base, 0.1, Backend::stream);
  const auto f = p->frame(0.4);
  const TorusPoint o = f.center + Vec2{0.12, 0.03};
  const double e = 1e-6;
  auto psi = [&](Vec2 d) { return *p->local_stream(0.4, o, d, Limit::right); };
  const Vec2 v = p->velocity(0.4, o);
  CHECK(v.x1 == doctest::Approx(-(psi({0, e}) - psi({0, -e})) / (2 * e)).epsilon(1e-6));
  CHECK(v.x2 == doctest::Approx((psi({e, 0}) - psi({-e, 0})) / (2 * e)).epsilon(1e-6));
}

TEST_CASE("fields without a stream function fall back to the Bogovskii backend") {
  const FieldPtr base = std::make_shared<FunctionField>(
      [](double, TorusPoint x) { return Vec2{std::sin(tau * x.x2()), 0.0}; }, 1.0, "shear-function");
  const auto p = make(base, 0.1, Backend::stream, 0.5);
  CHECK(p->fell_back());
  CHECK(p->backend() == Backend::bogovskii);
}

TEST_CASE("Bogovskii perturbation has the same support and freezing") {
  const auto base = mixer();
  const auto p = make(base, 0.1, Backend::bogovskii, 0.5);
  const PerturbedField w(base, p);
  const double t = 0.25;
  const auto f = p->frame(t);
  for (int k = 0; k < 8; ++k) {
    const double th = tau * (k + 0.3) / 8.0;
    const Vec2 dir{std::cos(th), std::sin(th)};
    CHECK(norm(w.velocity(t, f.center + dir * 0.08) - f.center_velocity) < 1e-12);
    CHECK(norm(p->velocity(t, f.center + dir * 0.21)) == 0.0);
  }
  CHECK(std::abs(numerical_divergence(w, t, f.center + Vec2{0.14, 0.02}, 1e-4)) < 5e-3);
}

TEST_CASE("annulus source of a compressible field is rejected") {
  const FunctionField bad([](double, TorusPoint x) { return Vec2{std::sin(tau * x.x1()), 0.0}; }, 1.0);
  CHECK_THROWS_AS(annulus_source(bad, 0.0, {0.3, 0.5}, 0.1), std::runtime_error);
  CHECK_NOTHROW(annulus_source(*mixer(), 0.0, {0.3, 0.5}, 0.1));
}

TEST_CASE("switching instants of the perturbed field come from the base") {
  const auto base = mixer();
  const PerturbedField w(base, make(base, 0.05, Backend::stream));
  CHECK(w.switch_times(0.0, 1.9).size() == 1);
  CHECK(w.describe().find("composite") != std::string::npos);
}

TEST_CASE("smallness certificate shrinks with the radius") {
  const auto base = mixer();
  const double times[] = {0.0, 0.5, 1.25};
  const Grid g(256);
  const auto a = smallness_certificate(*make(base, 0.1, Backend::stream), 2.0, times, g);
  const auto b = smallness_certificate(*make(base, 0.05, Backend::stream), 2.0, times, g);
  CHECK(b.sup_v_w1p < a.sup_v_w1p);
  CHECK(b.sup_local_grad < a.sup_local_grad);
  CHECK(a.ratio > 0.0);
  CHECK(a.v_w1p.size() == 3);
}

TEST_CASE("frozen ball survives under the perturbed flow") {
  const auto base = mixer();
  const PerturbedField w(base, make(base, 0.1, Backend::stream, 2.0));
  const double times[] = {0.0, 1.0, 2.0};
  const auto r = verify_frozen_ball(w, times, Grid(128), 0.02, false, 0.5);
  CHECK(r.max_defect < 0.1);
  CHECK(r.hminus1_perturbed.back() == doctest::Approx(r.hminus1_perturbed.front()).epsilon(0.1));
  CHECK(r.center_gap.back() < 1e-6);
  CHECK(r.hminus1_base.back() < r.hminus1_perturbed.back());
}
