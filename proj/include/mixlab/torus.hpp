#pragma once

/// @file torus.hpp
/// @brief Geometry of the unit 2-torus, cell-centered periodic grids, and the
/// scalar / vector fields sampled on them.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mixlab {

/// Plain 2-vector used for velocities, offsets and gradients.
struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x1 + o.x1, x2 + o.x2}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x1 - o.x1, x2 - o.x2}; }
  constexpr Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x1 += o.x1;
    x2 += o.x2;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Vec2 v) { return std::hypot(v.x1, v.x2); }

/// Reduce a real coordinate into [0, 1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  // floor can round x - floor(x) up to exactly 1 for tiny negative x
  return r >= 1.0 ? 0.0 : r;
}

/// Signed minimal-image difference in (-1/2, 1/2].
inline double wrap_delta(double d) {
  d -= std::round(d);
  return d;
}

/// A point of T^2; coordinates are kept reduced into [0,1).
class TorusPoint {
 public:
  constexpr TorusPoint() = default;
  TorusPoint(double x1, double x2) : x1_(wrap_unit(x1)), x2_(wrap_unit(x2)) {}

  double x1() const { return x1_; }
  double x2() const { return x2_; }

  TorusPoint operator+(Vec2 d) const { return {x1_ + d.x1, x2_ + d.x2}; }
  bool operator==(const TorusPoint&) const = default;

 private:
  double x1_ = 0.0;
  double x2_ = 0.0;
};

namespace detail {
// wrap_delta for |d| < 1, without the rounding call
inline double wrap_reduced_delta(double d) { return d >= 0.5 ? d - 1.0 : (d <= -0.5 ? d + 1.0 : d); }
}  // namespace detail

/// Minimal-image offset q - p, each component in (-1/2, 1/2].
inline Vec2 torus_offset(TorusPoint p, TorusPoint q) {
  return {detail::wrap_reduced_delta(q.x1() - p.x1()), detail::wrap_reduced_delta(q.x2() - p.x2())};
}

/// Euclidean distance with per-coordinate wraparound.
double torus_dist(TorusPoint p, TorusPoint q);

/// Uniform periodic grid with n cells per axis (n a power of two, n >= 8).
class Grid {
 public:
  explicit Grid(int n);

  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  /// Row-major index; i runs along x1, j along x2.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i);
  }
  int wrap(int i) const { return ((i % n_) + n_) % n_; }
  TorusPoint center(int i, int j) const {
    return {(i + 0.5) * h_, (j + 0.5) * h_};
  }
  TorusPoint center(std::size_t idx) const {
    return center(static_cast<int>(idx % n_), static_cast<int>(idx / n_));
  }
  /// Index of the cell containing p.
  std::size_t cell_of(TorusPoint p) const;

  bool operator==(const Grid& o) const { return n_ == o.n_; }

 private:
  int n_;
  double h_;
};

bool is_power_of_two(int n);

/// Samples of a bounded density at cell centers.
class ScalarField {
 public:
  explicit ScalarField(Grid grid, double value = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  template <class F>
  static ScalarField from_function(Grid grid, F&& f) {
    std::vector<double> v(grid.size());
    for (int j = 0; j < grid.n(); ++j)
      for (int i = 0; i < grid.n(); ++i) v[grid.index(i, j)] = f(grid.center(i, j));
    return ScalarField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double at(int i, int j) const { return values_[grid_.index(grid_.wrap(i), grid_.wrap(j))]; }

  double mean() const;
  double min() const;
  double max() const;
  /// Midpoint-quadrature L^2 norm of the field (mean not removed).
  double l2_norm() const;

  ScalarField operator-(const ScalarField& o) const;
  ScalarField shifted(double c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Samples of a planar vector field at cell centers.
class VectorField2 {
 public:
  VectorField2(Grid grid, std::vector<double> u1, std::vector<double> u2);

  template <class F>
  static VectorField2 from_function(Grid grid, F&& f) {
    std::vector<double> a(grid.size()), b(grid.size());
    for (int j = 0; j < grid.n(); ++j)
      for (int i = 0; i < grid.n(); ++i) {
        Vec2 v = f(grid.center(i, j));
        a[grid.index(i, j)] = v.x1;
        b[grid.index(i, j)] = v.x2;
      }
    return VectorField2(grid, std::move(a), std::move(b));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> u1() const { return u1_; }
  std::span<const double> u2() const { return u2_; }

 private:
  Grid grid_;
  std::vector<double> u1_;
  std::vector<double> u2_;
};

/// B_r(center) on the torus.
struct Ball {
  TorusPoint center;
  double radius = 0.0;
};

struct W1pNorm {
  double lp = 0.0;       ///< ||v||_{L^p}
  double grad_lp = 0.0;  ///< ||grad v||_{L^p}, Frobenius pointwise
  double total = 0.0;    ///< (lp^p + grad_lp^p)^{1/p}
};

/// W^{1,p} norm over the whole torus or over a ball, with central-difference
/// gradients and midpoint quadrature. Throws for p <= 1.
W1pNorm w1p_norm(const VectorField2& v, double p, std::optional<Ball> region = std::nullopt);

struct IndicatorField {
  ScalarField field;
  bool empty = false;  ///< no cell center fell inside the ball
};

/// Indicator of B_r(center) sampled at cell centers. Throws for r outside (0, 1/2).
IndicatorField ball_indicator(TorusPoint center, double r, Grid grid);

}  // namespace mixlab
