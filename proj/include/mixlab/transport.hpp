#pragma once

/// @file transport.hpp
/// @brief Characteristics, semi-Lagrangian transport, flow maps, and their
/// measure-preserving discretization as permutations of grid cells.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mixlab/torus.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

/// Time nodes from t0 to t1 (either order) with every switching instant of u
/// included and each segment split into equal steps no longer than h_t.
std::vector<double> step_schedule(const VelocityField& u, double t0, double t1, double h_t);

/// Sampled solution of x' = u(t, x). Positions are stored unwrapped so the
/// path can be interpolated; at() returns the reduced point.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<Vec2> points, std::vector<Vec2> v_start,
             std::vector<Vec2> v_end);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  TorusPoint point(std::size_t k) const { return {points_[k].x1, points_[k].x2}; }
  Vec2 unwrapped(std::size_t k) const { return points_[k]; }

  /// Cubic Hermite interpolation between nodes, using the one-sided velocities
  /// of each interval. Throws outside [times.front(), times.back()].
  TorusPoint at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Vec2> points_;
  std::vector<Vec2> v_start_;  ///< per interval: u at its left node (right limit)
  std::vector<Vec2> v_end_;    ///< per interval: u at its right node (left limit)
};

/// Classical RK4 with steps snapped to switching instants. Throws if t1 < t0
/// or h_t <= 0.
Trajectory integrate_trajectory(const VelocityField& u, TorusPoint x0, double t0, double t1, double h_t);

/// Moves every point along the flow from t_from to t_to (backward when
/// t_to < t_from). Steps run time-outer so each stage is one batched evaluation.
std::vector<TorusPoint> transport_points(const VelocityField& u, std::span<const TorusPoint> x,
                                         double t_from, double t_to, double h_t);

/// Images of all cell centers under a forward or inverse flow map.
struct FlowMap {
  Grid grid;
  double time = 0.0;     ///< horizon t of Phi_t (or Phi_t^{-1})
  bool inverse = false;  ///< true: positions are Phi_t^{-1}(cell centers)
  std::vector<TorusPoint> positions;
};

FlowMap identity_map(Grid grid);
/// Phi_{t0 -> t1}(x) for every cell center.
FlowMap flow_map(const VelocityField& u, double t0, double t1, Grid grid, double h_t);
inline FlowMap flow_map(const VelocityField& u, double t, Grid grid, double h_t) {
  return flow_map(u, 0.0, t, grid, h_t);
}
/// Phi_{t0 -> t1}^{-1}(x) by backward tracing from t1 to t0.
FlowMap inverse_flow_map(const VelocityField& u, double t0, double t1, Grid grid, double h_t);
inline FlowMap inverse_flow_map(const VelocityField& u, double t, Grid grid, double h_t) {
  return inverse_flow_map(u, 0.0, t, grid, h_t);
}
/// Forward maps at each of the increasing times, from one continued integration.
std::vector<FlowMap> flow_maps_at(const VelocityField& u, std::span<const double> times, Grid grid,
                                  double h_t);

/// Periodic bicubic (Keys, a = -1/2) interpolation of f at p.
double interpolate(const ScalarField& f, TorusPoint p);

/// rho0 o inverse: interpolates rho0 at the back-traced positions, then shifts
/// by a constant so the mean of rho0 is reproduced.
ScalarField compose(const ScalarField& rho0, const FlowMap& inverse);

/// Semi-Lagrangian transport of rho0 from t0 to t1.
ScalarField advect(const ScalarField& rho0, const VelocityField& u, double t0, double t1, double h_t);

/// 1 where f > level, else 0. Used as the geometric (set) copy of a transported indicator.
ScalarField threshold(const ScalarField& f, double level = 0.5);

/// A bijection of the cells of a side x side lattice; perm[i] is the image of cell i.
class CellPermutation {
 public:
  CellPermutation(int side, std::vector<std::uint32_t> perm);

  static CellPermutation identity(int side);
  /// Rigid translation by (di, dj) cells with wraparound.
  static CellPermutation translation(int side, int di, int dj);

  int side() const { return side_; }
  std::size_t size() const { return perm_.size(); }
  std::uint32_t operator[](std::size_t k) const { return perm_[k]; }
  const std::vector<std::uint32_t>& data() const { return perm_; }

  CellPermutation inverse() const;
  /// (this o other)(i) = this[other[i]].
  CellPermutation after(const CellPermutation& other) const;

  bool operator==(const CellPermutation&) const = default;

 private:
  int side_;
  std::vector<std::uint32_t> perm_;
};

/// Rank matching of image positions and cell centers along one Hilbert order.
CellPermutation to_permutation(const FlowMap& fm);

struct MeasureReport {
  std::vector<std::size_t> hit_histogram;  ///< [c] = cells hit exactly c times (last bin: >= size-1)
  double empty_fraction = 0.0;
  double multi_fraction = 0.0;
  double jacobian_min = 1.0;
  double jacobian_max = 1.0;
  double jacobian_max_dev = 0.0;  ///< max |J - 1| over audited cells
  double eps_j = 0.1;
  bool under_resolved = false;
};

/// Audits hits per cell and the shoelace Jacobian of image quadrilaterals.
/// With a region, only cells whose centers lie in it are audited.
MeasureReport measure_preservation_report(const FlowMap& fm, double eps_j = 0.1,
                                          std::optional<Ball> region = std::nullopt);

}  // namespace mixlab
