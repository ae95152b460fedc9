#include "mixlab/torus.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mixlab {

double torus_dist(TorusPoint p, TorusPoint q) {
  double d1 = std::abs(p.x1() - q.x1());
  double d2 = std::abs(p.x2() - q.x2());
  d1 = std::min(d1, 1.0 - d1);
  d2 = std::min(d2, 1.0 - d2);
  return std::hypot(d1, d2);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(int n) : n_(n), h_(1.0 / n) {
  if (!is_power_of_two(n) || n < 8)
    throw std::invalid_argument("grid size must be a power of two >= 8, got " + std::to_string(n));
}

std::size_t Grid::cell_of(TorusPoint p) const {
  int i = std::min(static_cast<int>(p.x1() * n_), n_ - 1);
  int j = std::min(static_cast<int>(p.x2() * n_), n_ - 1);
  return index(i, j);
}

ScalarField::ScalarField(Grid grid, double value) : grid_(grid), values_(grid.size(), value) {
  if (!std::isfinite(value)) throw std::invalid_argument("scalar field value must be finite");
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("scalar field sample count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("scalar field contains non-finite value");
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s / static_cast<double>(values_.size()));
}

ScalarField ScalarField::operator-(const ScalarField& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("grid mismatch");
  std::vector<double> r(values_.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = values_[k] - o.values_[k];
  return ScalarField(grid_, std::move(r));
}

ScalarField ScalarField::shifted(double c) const {
  std::vector<double> r(values_);
  for (double& v : r) v += c;
  return ScalarField(grid_, std::move(r));
}

VectorField2::VectorField2(Grid grid, std::vector<double> u1, std::vector<double> u2)
    : grid_(grid), u1_(std::move(u1)), u2_(std::move(u2)) {
  if (u1_.size() != grid_.size() || u2_.size() != grid_.size())
    throw std::invalid_argument("vector field sample count does not match grid");
  for (std::size_t k = 0; k < u1_.size(); ++k)
    if (!std::isfinite(u1_[k]) || !std::isfinite(u2_[k]))
      throw std::invalid_argument("vector field contains non-finite value");
}

W1pNorm w1p_norm(const VectorField2& v, double p, std::optional<Ball> region) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("w1p_norm requires 1 < p < inf");
  if (region && !(region->radius > 0.0 && region->radius < 0.5))
    throw std::invalid_argument("w1p_norm region radius must lie in (0, 1/2)");
  const Grid& g = v.grid();
  const int n = g.n();
  const double inv2h = 0.5 / g.h();
  auto u1 = v.u1();
  auto u2 = v.u2();
  double sum_v = 0.0, sum_g = 0.0;

  auto visit = [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    const int ip = g.wrap(i + 1), im = g.wrap(i - 1), jp = g.wrap(j + 1), jm = g.wrap(j - 1);
    const double a11 = (u1[g.index(ip, j)] - u1[g.index(im, j)]) * inv2h;
    const double a12 = (u1[g.index(i, jp)] - u1[g.index(i, jm)]) * inv2h;
    const double a21 = (u2[g.index(ip, j)] - u2[g.index(im, j)]) * inv2h;
    const double a22 = (u2[g.index(i, jp)] - u2[g.index(i, jm)]) * inv2h;
    sum_v += std::pow(std::hypot(u1[k], u2[k]), p);
    sum_g += std::pow(std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22), p);
  };

  const bool small_region = region && 2 * (static_cast<int>(std::ceil(region->radius * n)) + 1) + 1 < n;
  if (!small_region) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (!region || torus_dist(g.center(i, j), region->center) < region->radius) visit(i, j);
  } else {
    // Only the bounding box of the ball is scanned.
    const int span = static_cast<int>(std::ceil(region->radius * n)) + 1;
    const int ci = static_cast<int>(std::floor(region->center.x1() * n));
    const int cj = static_cast<int>(std::floor(region->center.x2() * n));
    for (int dj = -span; dj <= span; ++dj)
      for (int di = -span; di <= span; ++di) {
        const int i = g.wrap(ci + di), j = g.wrap(cj + dj);
        if (torus_dist(g.center(i, j), region->center) < region->radius) visit(i, j);
      }
  }
  const double w = g.h() * g.h();
  W1pNorm out;
  out.lp = std::pow(sum_v * w, 1.0 / p);
  out.grad_lp = std::pow(sum_g * w, 1.0 / p);
  out.total = std::pow((sum_v + sum_g) * w, 1.0 / p);
  return out;
}

IndicatorField ball_indicator(TorusPoint center, double r, Grid grid) {
  if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("ball radius must lie in (0, 1/2)");
  bool any = false;
  auto f = ScalarField::from_function(grid, [&](TorusPoint x) {
    const bool in = torus_dist(x, center) < r;
    any = any || in;
    return in ? 1.0 : 0.0;
  });
  return {std::move(f), !any};
}

}  // namespace mixlab
