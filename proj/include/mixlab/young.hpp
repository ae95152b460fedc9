#pragma once

/// @file young.hpp
/// @brief Empirical Young measures generated by a window of inverse flow maps.
///
/// For a macrocell C of an M x M partition, nu^C is the histogram over an
/// m x m micro partition of the points Phi_{t_j}^{-1}(y), y ranging over the
/// fine cells in C and t_j over the window. Rows are stored sparsely.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixlab/torus.hpp"
#include "mixlab/transport.hpp"

namespace mixlab {

class EmpiricalYoungMeasure {
 public:
  using Row = std::vector<std::pair<std::uint32_t, double>>;  ///< (micro cell, weight), cells increasing

  EmpiricalYoungMeasure(int macro, int micro, std::vector<Row> rows, double t_lo = 0.0, double t_hi = 0.0,
                        int count = 0);

  int macro() const { return macro_; }
  int micro() const { return micro_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  int count() const { return count_; }

  const Row& row(std::size_t c) const { return rows_[c]; }
  std::size_t rows() const { return rows_.size(); }
  double weight(std::size_t c, std::uint32_t cell) const;

  /// Dense M^2 x m^2 weights. Throws when larger than `limit` entries.
  std::vector<double> dense(std::size_t limit = std::size_t{1} << 26) const;

 private:
  int macro_;
  int micro_;
  std::vector<Row> rows_;
  double t_lo_, t_hi_;
  int count_;
};

/// Needs at least 4 inverse maps on one grid with n divisible by M and m.
EmpiricalYoungMeasure empirical_young_measure(std::span<const FlowMap> inverse_maps, int macro, int micro);

/// Per-micro-cell averages of rho (resolution must be a multiple of m).
std::vector<double> micro_averages(const ScalarField& rho, int micro);

/// <nu^C, rho> on the macro grid.
std::vector<double> pushforward_expectation(const EmpiricalYoungMeasure& nu, const ScalarField& rho);

/// Averages of a fine field over the M x M macrocells.
std::vector<double> macro_average(const ScalarField& f, int macro);

/// (1/M^2) sum_C (<nu^C, rho^2> - <nu^C, rho>^2), with <nu, rho^2> from
/// per-cell averages of rho^2.
double jensen_gap(const EmpiricalYoungMeasure& nu, const ScalarField& rho);

struct MarginalCheck {
  double young_mass = 0.0;      ///< (1/M^2) sum_C nu^C(D)
  double lebesgue_mass = 0.0;   ///< mu(D)
};

/// D given as a flag per micro cell.
MarginalCheck marginal_check(const EmpiricalYoungMeasure& nu, const std::vector<bool>& micro_set);

/// Max over rows of the total-variation distance to the uniform measure on micro cells.
double max_tv_to_uniform(const EmpiricalYoungMeasure& nu);

}  // namespace mixlab
