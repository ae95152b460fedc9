#pragma once

/// @file metric.hpp
/// @brief Distances between measure-preserving maps at grid resolution:
/// the symmetric-difference metric sup_D mu(pi(D) sym-diff sigma(D)) and the
/// L^1 (DiPerna-Lions) metric, plus sequence probes.

#include <span>
#include <vector>

#include "mixlab/transport.hpp"

namespace mixlab {

struct CycleStats {
  std::size_t cycles = 0;
  std::size_t fixed_points = 0;
  std::size_t longest = 0;
};

/// Cycle structure of sigma^{-1} o pi.
CycleStats relative_cycles(const CellPermutation& pi, const CellPermutation& sigma);

/// Exact sup over cell-union sets, (sum over cycles of 2 floor(L/2)) / N.
double sym_diff_metric(const CellPermutation& pi, const CellPermutation& sigma);

/// Exhaustive maximum over all 2^N subsets; N <= 16 cells.
double brute_force_sym_diff(const CellPermutation& pi, const CellPermutation& sigma);

/// Mean torus distance between the image cell centers.
double dl_metric(const CellPermutation& pi, const CellPermutation& sigma);
/// Mean torus distance between image positions.
double dl_metric(const FlowMap& a, const FlowMap& b);

/// sum_l 2^{-l} max_Q mu(pi(Q) sym-diff sigma(Q)) / (2 mu(Q)) over the dyadic
/// squares Q of side 2^{-l}, normalized to [0, 1]. Metrizes convergence of
/// mu(pi_j(D) sym-diff pi(D)) for each fixed D, which the supremum does not.
/// Needs a power-of-two side.
double weak_dyadic_metric(const CellPermutation& pi, const CellPermutation& sigma);

struct EquivalenceReport {
  std::vector<double> d_sym;
  std::vector<double> d_dl;
  double band = 0.05;
  bool sym_to_zero = false;      ///< last value within the band
  bool dl_to_zero = false;
  bool sym_bounded_away = false; ///< whole second half above the band
  bool dl_bounded_away = false;
  bool concordant = false;       ///< both to zero or both bounded away
};

/// Distances of each element to the limit. Needs at least 8 elements.
EquivalenceReport equivalence_experiment(std::span<const CellPermutation> sequence, const CellPermutation& limit,
                                         double band = 0.05);

/// Symmetric pairwise d_sym matrix.
std::vector<std::vector<double>> pairwise_sym_diff(std::span<const CellPermutation> sequence);

struct CompactnessReport {
  std::vector<std::vector<double>> distance;
  std::vector<double> eps;
  std::vector<std::size_t> net_size;  ///< per eps
  double min_late_distance = 0.0;     ///< min pairwise distance among the second half
};

/// Greedy nets for each radius (default 0.5, 0.25, 0.1). Needs at least 8 elements.
CompactnessReport compactness_probe(std::span<const CellPermutation> sequence,
                                    std::vector<double> eps = {0.5, 0.25, 0.1});

}  // namespace mixlab
