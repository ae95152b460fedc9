#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixlab/hilbert.hpp"
#include "mixlab/transport.hpp"

using namespace mixlab;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;
FieldPtr shear() { return make_field({FieldKind::steady_shear, 1.0, 1, 1.0, {}}); }
FieldPtr mixer() { return make_field({FieldKind::alternating_shear, 1.0, 1, 1.0, {}}); }
}  // namespace

TEST_CASE("step schedule hits every switching instant") {
  const auto s = step_schedule(*mixer(), 0.0, 2.5, 0.3);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == 2.5);
  CHECK(std::find(s.begin(), s.end(), 1.0) != s.end());
  CHECK(std::find(s.begin(), s.end(), 2.0) != s.end());
  for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] - s[k - 1] <= 0.3 + 1e-12);
  const auto back = step_schedule(*mixer(), 2.5, 0.0, 0.3);
  CHECK(back.front() == 2.5);
  CHECK(back.back() == 0.0);
}

TEST_CASE("RK4 reproduces the alternating shear map with large steps") {
  const TorusPoint x0(0.2, 0.7);
  const auto tr = integrate_trajectory(*mixer(), x0, 0.0, 2.0, 0.5);
  const double a1 = x0.x1() + std::sin(tau * x0.x2());
  const double a2 = x0.x2() + std::sin(tau * a1);
  const TorusPoint want(a1, a2);
  CHECK(torus_dist(tr.at(2.0), want) < 1e-14);
  CHECK(torus_dist(tr.at(1.0), TorusPoint(a1, x0.x2())) < 1e-14);
  CHECK_THROWS(tr.at(2.5));
  CHECK_THROWS(integrate_trajectory(*mixer(), x0, 1.0, 0.0, 0.1));
}

TEST_CASE("trajectory interpolation is accurate between nodes") {
  const auto u = make_field({FieldKind::cellular, 1.0, 1, 1.0, {}});
  const TorusPoint x0(0.3, 0.15);
  const auto coarse = integrate_trajectory(*u, x0, 0.0, 1.0, 0.01);
  const auto fine = integrate_trajectory(*u, x0, 0.0, 0.555, 0.0005);
  CHECK(torus_dist(coarse.at(0.555), fine.at(0.555)) < 1e-7);
}

TEST_CASE("inverse and forward flow maps compose to the identity") {
  const Grid g(32);
  const auto u = make_field({FieldKind::cellular, 1.0, 1, 1.0, {}});
  const auto fwd = flow_map(*u, 0.7, g, 0.01);
  const auto back = transport_points(*u, fwd.positions, 0.7, 0.0, 0.01);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, torus_dist(back[k], g.center(k)));
  CHECK(worst < 1e-7);
  const auto inv = inverse_flow_map(*u, 0.7, g, 0.01);
  CHECK(inv.inverse);
  CHECK_FALSE(fwd.inverse);
}

TEST_CASE("flow maps at several times match separate integrations") {
  const Grid g(16);
  const double times[] = {0.0, 0.5, 1.25};
  const auto maps = flow_maps_at(*mixer(), times, g, 0.05);
  REQUIRE(maps.size() == 3);
  const auto single = flow_map(*mixer(), 1.25, g, 0.05);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(torus_dist(maps[2].positions[k], single.positions[k]) < 1e-12);
    CHECK(maps[0].positions[k] == g.center(k));
  }
}

TEST_CASE("bicubic interpolation is exact at nodes and accurate between them") {
  const Grid g(64);
  const auto f = ScalarField::from_function(g, [](TorusPoint x) { return std::cos(tau * x.x1()); });
  CHECK(interpolate(f, g.center(5, 9)) == doctest::Approx(f.at(5, 9)));
  CHECK(interpolate(f, {0.3141, 0.2}) == doctest::Approx(std::cos(tau * 0.3141)).epsilon(1e-5));
}

TEST_CASE("steady shear advection matches the closed form") {
  const Grid g(128);
  const auto rho0 = ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * x.x1()); });
  const auto got = advect(rho0, *shear(), 0.0, 1.0, 0.01);
  const auto exact =
      ScalarField::from_function(g, [](TorusPoint x) { return std::sin(tau * (x.x1() - std::sin(tau * x.x2()))); });
  CHECK((got - exact).l2_norm() < 1e-5);
  CHECK(got.mean() == doctest::Approx(rho0.mean()).epsilon(1e-14));
}

TEST_CASE("composition keeps the mean") {
  const Grid g(64);
  const auto rho0 = threshold(ball_indicator({0.5, 0.5}, 0.2, g).field);
  const auto rho = compose(rho0, inverse_flow_map(*mixer(), 2.0, g, 0.1));
  CHECK(rho.mean() == doctest::Approx(rho0.mean()).epsilon(1e-13));
}

TEST_CASE("cell permutations") {
  const auto t = CellPermutation::translation(4, 1, 2);
  CHECK(t[0] == 9);
  CHECK(t.after(t.inverse()) == CellPermutation::identity(4));
  const auto twice = t.after(t);
  CHECK(twice == CellPermutation::translation(4, 2, 0));
  CHECK_THROWS(CellPermutation(2, {0, 0, 1, 2}));
}

TEST_CASE("rank matching recovers exact lattice maps") {
  const Grid g(16);
  CHECK(to_permutation(identity_map(g)) == CellPermutation::identity(16));
  auto m = identity_map(g);
  for (auto& p : m.positions) p = p + Vec2{3 * g.h(), -5 * g.h()};
  CHECK(to_permutation(m) == CellPermutation::translation(16, 3, -5));
}

TEST_CASE("rank matching always returns a bijection") {
  const Grid g(32);
  const auto fm = flow_map(*mixer(), 3.0, g, 0.1);
  const auto p = to_permutation(fm);
  std::vector<int> hits(g.size(), 0);
  for (std::size_t k = 0; k < p.size(); ++k) ++hits[p[k]];
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("Hilbert order is a bijection with adjacent steps") {
  const int order = 4, side = 16;
  for (std::uint64_t d = 0; d + 1 < side * side; ++d) {
    const auto [x, y] = hilbert_cell(order, d);
    CHECK(hilbert_index(order, x, y) == d);
    const auto [x2, y2] = hilbert_cell(order, d + 1);
    CHECK(std::abs(int(x) - int(x2)) + std::abs(int(y) - int(y2)) == 1);
  }
}

TEST_CASE("measure audit passes smooth flows and flags folded maps") {
  const Grid g(64);
  const auto ok = measure_preservation_report(inverse_flow_map(*shear(), 1.0, g, 0.01));
  CHECK_FALSE(ok.under_resolved);
  CHECK(ok.jacobian_max_dev < 0.05);
  auto folded = identity_map(g);
  for (auto& p : folded.positions) p = TorusPoint(0.5 * p.x1(), p.x2());
  CHECK(measure_preservation_report(folded).under_resolved);
}
