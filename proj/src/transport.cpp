#include "mixlab/transport.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mixlab/hilbert.hpp"

namespace mixlab {

std::vector<double> step_schedule(const VelocityField& u, double t0, double t1, double h_t) {
  if (!(h_t > 0.0) || !std::isfinite(h_t)) throw std::invalid_argument("time step must be positive");
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  std::vector<double> breaks{lo};
  for (double s : u.switch_times(lo, hi)) breaks.push_back(s);
  breaks.push_back(hi);
  std::vector<double> nodes{lo};
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double a = breaks[b], c = breaks[b + 1];
    if (!(c > a)) continue;
    const auto m = std::max<long long>(1, static_cast<long long>(std::ceil((c - a) / h_t - 1e-9)));
    for (long long k = 1; k < m; ++k) nodes.push_back(a + (c - a) * static_cast<double>(k) / m);
    nodes.push_back(c);
  }
  if (t1 < t0) std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Vec2> points, std::vector<Vec2> v_start,
                       std::vector<Vec2> v_end)
    : times_(std::move(times)), points_(std::move(points)), v_start_(std::move(v_start)), v_end_(std::move(v_end)) {
  if (times_.empty() || points_.size() != times_.size() || v_start_.size() + 1 != times_.size() ||
      v_end_.size() + 1 != times_.size())
    throw std::invalid_argument("inconsistent trajectory samples");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw std::invalid_argument("trajectory times must increase");
}

TorusPoint Trajectory::at(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - slack || t > times_.back() + slack)
    throw std::out_of_range("time outside the cached trajectory range");
  if (times_.size() == 1) return point(0);
  t = std::clamp(t, times_.front(), times_.back());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (k + 1 >= times_.size()) k = times_.size() - 2;
  const double dt = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / dt;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  const Vec2 p = points_[k] * h00 + v_start_[k] * (h10 * dt) + points_[k + 1] * h01 + v_end_[k] * (h11 * dt);
  return {p.x1, p.x2};
}

namespace {

inline TorusPoint as_point(Vec2 v) { return {v.x1, v.x2}; }

// One RK4 step for all points from s0 to s1 (either direction).
void rk4_step(const VelocityField& u, std::vector<Vec2>& x, double s0, double s1,
              std::vector<TorusPoint>& tmp, std::vector<Vec2>& k1, std::vector<Vec2>& k2,
              std::vector<Vec2>& k3, std::vector<Vec2>& k4) {
  const double h = s1 - s0;
  const Limit at0 = h > 0 ? Limit::right : Limit::left;
  const Limit at1 = h > 0 ? Limit::left : Limit::right;
  const double sm = s0 + 0.5 * h;
  const auto n = static_cast<std::ptrdiff_t>(x.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q) tmp[q] = as_point(x[q]);
  u.velocities(s0, tmp, k1, at0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q) tmp[q] = as_point(x[q] + k1[q] * (0.5 * h));
  u.velocities(sm, tmp, k2, Limit::right);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q) tmp[q] = as_point(x[q] + k2[q] * (0.5 * h));
  u.velocities(sm, tmp, k3, Limit::right);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q) tmp[q] = as_point(x[q] + k3[q] * h);
  u.velocities(s1, tmp, k4, at1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q) x[q] += (k1[q] + k2[q] * 2.0 + k3[q] * 2.0 + k4[q]) * (h / 6.0);
}

struct Stepper {
  std::vector<TorusPoint> tmp;
  std::vector<Vec2> k1, k2, k3, k4;
  explicit Stepper(std::size_t n) : tmp(n), k1(n), k2(n), k3(n), k4(n) {}
  void step(const VelocityField& u, std::vector<Vec2>& x, double s0, double s1) {
    rk4_step(u, x, s0, s1, tmp, k1, k2, k3, k4);
  }
};

}  // namespace

Trajectory integrate_trajectory(const VelocityField& u, TorusPoint x0, double t0, double t1, double h_t) {
  if (t1 < t0) throw std::invalid_argument("integrate_trajectory requires t1 >= t0");
  const auto nodes = t1 > t0 ? step_schedule(u, t0, t1, h_t) : std::vector<double>{t0};
  std::vector<Vec2> x{{x0.x1(), x0.x2()}};
  std::vector<Vec2> pts{x[0]}, vs, ve;
  Stepper st(1);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    vs.push_back(u.velocity(nodes[k], as_point(x[0]), Limit::right));
    st.step(u, x, nodes[k], nodes[k + 1]);
    ve.push_back(u.velocity(nodes[k + 1], as_point(x[0]), Limit::left));
    pts.push_back(x[0]);
  }
  return Trajectory(nodes, std::move(pts), std::move(vs), std::move(ve));
}

std::vector<TorusPoint> transport_points(const VelocityField& u, std::span<const TorusPoint> x,
                                         double t_from, double t_to, double h_t) {
  std::vector<Vec2> pos(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) pos[k] = {x[k].x1(), x[k].x2()};
  if (t_from != t_to) {
    const auto nodes = step_schedule(u, t_from, t_to, h_t);
    Stepper st(x.size());
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) st.step(u, pos, nodes[k], nodes[k + 1]);
  }
  std::vector<TorusPoint> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = as_point(pos[k]);
  return out;
}

namespace {
std::vector<TorusPoint> centers(Grid g) {
  std::vector<TorusPoint> c(g.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = g.center(k);
  return c;
}
}  // namespace

FlowMap identity_map(Grid grid) { return FlowMap{grid, 0.0, false, centers(grid)}; }

FlowMap flow_map(const VelocityField& u, double t0, double t1, Grid grid, double h_t) {
  if (t1 < t0) throw std::invalid_argument("flow_map requires t1 >= t0");
  return FlowMap{grid, t1 - t0, false, transport_points(u, centers(grid), t0, t1, h_t)};
}

FlowMap inverse_flow_map(const VelocityField& u, double t0, double t1, Grid grid, double h_t) {
  if (t1 < t0) throw std::invalid_argument("inverse_flow_map requires t1 >= t0");
  return FlowMap{grid, t1 - t0, true, transport_points(u, centers(grid), t1, t0, h_t)};
}

std::vector<FlowMap> flow_maps_at(const VelocityField& u, std::span<const double> times, Grid grid,
                                  double h_t) {
  std::vector<FlowMap> out;
  auto c = centers(grid);
  std::vector<Vec2> pos(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) pos[k] = {c[k].x1(), c[k].x2()};
  Stepper st(c.size());
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("flow_maps_at requires increasing nonnegative times");
    if (target > t) {
      const auto nodes = step_schedule(u, t, target, h_t);
      for (std::size_t k = 0; k + 1 < nodes.size(); ++k) st.step(u, pos, nodes[k], nodes[k + 1]);
      t = target;
    }
    FlowMap fm{grid, target, false, std::vector<TorusPoint>(c.size())};
    for (std::size_t k = 0; k < c.size(); ++k) fm.positions[k] = as_point(pos[k]);
    out.push_back(std::move(fm));
  }
  return out;
}

namespace {
inline void keys_weights(double s, double w[4]) {
  constexpr double a = -0.5;
  auto near = [](double d) { return ((a + 2) * d - (a + 3)) * d * d + 1; };
  auto far = [](double d) { return ((a * d - 5 * a) * d + 8 * a) * d - 4 * a; };
  w[0] = far(1 + s);
  w[1] = near(s);
  w[2] = near(1 - s);
  w[3] = far(2 - s);
}
}  // namespace

double interpolate(const ScalarField& f, TorusPoint p) {
  const Grid& g = f.grid();
  const int n = g.n();
  const double u = p.x1() * n - 0.5, v = p.x2() * n - 0.5;
  const double fu = std::floor(u), fv = std::floor(v);
  const int i0 = static_cast<int>(fu), j0 = static_cast<int>(fv);
  double wu[4], wv[4];
  keys_weights(u - fu, wu);
  keys_weights(v - fv, wv);
  auto vals = f.values();
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int j = g.wrap(j0 - 1 + b);
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wu[a] * vals[g.index(g.wrap(i0 - 1 + a), j)];
    acc += wv[b] * row;
  }
  return acc;
}

ScalarField compose(const ScalarField& rho0, const FlowMap& inverse) {
  if (!(rho0.grid() == inverse.grid)) throw std::invalid_argument("grid mismatch in compose");
  std::vector<double> out(inverse.positions.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = interpolate(rho0, inverse.positions[k]);
  ScalarField r(rho0.grid(), std::move(out));
  return r.shifted(rho0.mean() - r.mean());
}

ScalarField advect(const ScalarField& rho0, const VelocityField& u, double t0, double t1, double h_t) {
  return compose(rho0, inverse_flow_map(u, t0, t1, rho0.grid(), h_t));
}

ScalarField threshold(const ScalarField& f, double level) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = x > level ? 1.0 : 0.0;
  return ScalarField(f.grid(), std::move(v));
}

CellPermutation::CellPermutation(int side, std::vector<std::uint32_t> perm) : side_(side), perm_(std::move(perm)) {
  if (side_ < 1) throw std::invalid_argument("permutation side must be positive");
  const std::size_t N = static_cast<std::size_t>(side_) * side_;
  if (perm_.size() != N) throw std::invalid_argument("permutation length must be side^2");
  std::vector<char> seen(N, 0);
  for (auto p : perm_) {
    if (p >= N || seen[p]) throw std::invalid_argument("cell map is not a bijection");
    seen[p] = 1;
  }
}

CellPermutation CellPermutation::identity(int side) {
  std::vector<std::uint32_t> p(static_cast<std::size_t>(side) * side);
  std::iota(p.begin(), p.end(), 0u);
  return CellPermutation(side, std::move(p));
}

CellPermutation CellPermutation::translation(int side, int di, int dj) {
  std::vector<std::uint32_t> p(static_cast<std::size_t>(side) * side);
  auto wrap = [side](int i) { return ((i % side) + side) % side; };
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i)
      p[static_cast<std::size_t>(j) * side + i] =
          static_cast<std::uint32_t>(wrap(j + dj) * side + wrap(i + di));
  return CellPermutation(side, std::move(p));
}

CellPermutation CellPermutation::inverse() const {
  std::vector<std::uint32_t> q(perm_.size());
  for (std::size_t k = 0; k < perm_.size(); ++k) q[perm_[k]] = static_cast<std::uint32_t>(k);
  return CellPermutation(side_, std::move(q));
}

CellPermutation CellPermutation::after(const CellPermutation& other) const {
  if (other.side_ != side_) throw std::invalid_argument("permutation size mismatch");
  std::vector<std::uint32_t> q(perm_.size());
  for (std::size_t k = 0; k < perm_.size(); ++k) q[k] = perm_[other.perm_[k]];
  return CellPermutation(side_, std::move(q));
}

CellPermutation to_permutation(const FlowMap& fm) {
  constexpr int order = 20;
  const double scale = static_cast<double>(1u << order);
  const Grid& g = fm.grid;
  const std::size_t N = g.size();
  auto key = [&](TorusPoint p) {
    const auto xi = std::min<std::uint32_t>(static_cast<std::uint32_t>(p.x1() * scale), (1u << order) - 1);
    const auto yi = std::min<std::uint32_t>(static_cast<std::uint32_t>(p.x2() * scale), (1u << order) - 1);
    return hilbert_index(order, xi, yi);
  };
  std::vector<std::uint64_t> image_key(N), cell_key(N);
  for (std::size_t k = 0; k < N; ++k) {
    image_key[k] = key(fm.positions[k]);
    cell_key[k] = key(g.center(k));
  }
  std::vector<std::uint32_t> by_image(N), by_cell(N);
  std::iota(by_image.begin(), by_image.end(), 0u);
  std::iota(by_cell.begin(), by_cell.end(), 0u);
  auto cmp = [](const std::vector<std::uint64_t>& keys) {
    return [&keys](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b] || (keys[a] == keys[b] && a < b); };
  };
  std::sort(by_image.begin(), by_image.end(), cmp(image_key));
  std::sort(by_cell.begin(), by_cell.end(), cmp(cell_key));
  std::vector<std::uint32_t> perm(N);
  for (std::size_t r = 0; r < N; ++r) perm[by_image[r]] = by_cell[r];
  return CellPermutation(g.n(), std::move(perm));
}

MeasureReport measure_preservation_report(const FlowMap& fm, double eps_j, std::optional<Ball> region) {
  const Grid& g = fm.grid;
  const int n = g.n();
  std::vector<std::uint32_t> hits(g.size(), 0);
  for (const auto& p : fm.positions) ++hits[g.cell_of(p)];
  MeasureReport r;
  r.eps_j = eps_j;
  r.hit_histogram.assign(5, 0);
  for (auto c : hits) ++r.hit_histogram[std::min<std::size_t>(c, 4)];
  r.empty_fraction = static_cast<double>(r.hit_histogram[0]) / static_cast<double>(g.size());
  r.multi_fraction = 1.0 - r.empty_fraction - static_cast<double>(r.hit_histogram[1]) / static_cast<double>(g.size());

  const double inv_area = 1.0 / (g.h() * g.h());
  bool first = true;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (region && torus_dist(g.center(i, j), region->center) >= region->radius) continue;
      const TorusPoint p0 = fm.positions[g.index(i, j)];
      const Vec2 a = torus_offset(p0, fm.positions[g.index(g.wrap(i + 1), j)]);
      const Vec2 b = torus_offset(p0, fm.positions[g.index(g.wrap(i + 1), g.wrap(j + 1))]);
      const Vec2 c = torus_offset(p0, fm.positions[g.index(i, g.wrap(j + 1))]);
      // shoelace over (0, a, b, c)
      const double area = 0.5 * ((a.x1 * b.x2 - b.x1 * a.x2) + (b.x1 * c.x2 - c.x1 * b.x2));
      const double J = area * inv_area;
      if (first) {
        r.jacobian_min = r.jacobian_max = J;
        first = false;
      }
      r.jacobian_min = std::min(r.jacobian_min, J);
      r.jacobian_max = std::max(r.jacobian_max, J);
      r.jacobian_max_dev = std::max(r.jacobian_max_dev, std::abs(J - 1.0));
    }
  r.under_resolved = r.jacobian_max_dev > eps_j;
  return r;
}

}  // namespace mixlab
