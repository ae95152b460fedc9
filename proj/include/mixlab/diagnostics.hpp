#pragma once

/// @file diagnostics.hpp
/// @brief Scalar-side mixing functionals: mix-norms and their decay fit,
/// geometric mixing scale, strong-mixing correlations, precompactness probes
/// and level-set profiles.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixlab/torus.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

/// ||rho - mean||_{H^{-s}}. Throws for s <= 0.
double mix_norm(const ScalarField& rho, double s = 1.0);

/// int_0^{t_k} ||grad u(s)||_{L^p} ds at each of the increasing times, by
/// midpoint rule on sub-intervals split at switching instants.
std::vector<double> gradient_budget(const VelocityField& u, std::span<const double> times, double p, Grid grid,
                                    int substeps = 4);

struct DecayFit {
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t fitted_points = 0;
  double max_shortfall = 0.0;  ///< max over the series of (envelope - log value), log units
  bool violation = false;
};

/// Least squares of log(values) against the gradient budget on the first half
/// of the series; flags any value more than `tolerance` (log units) below
/// the fitted envelope c1 exp(-c2 G). Needs at least 4 points, all positive.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   std::span<const double> gradient_integral, double tolerance = 0.5);

struct GeometricScale {
  double epsilon = 0.5;
  int level = -1;        ///< dyadic level k with epsilon = h 2^k, -1 when unmixed
  bool unmixed = true;   ///< no radius up to 1/4 met the accuracy
  std::vector<double> radii;
  std::vector<double> max_abs_average;  ///< per radius
};

/// Smallest radius h 2^k (k >= 0, radius <= 1/4) at which every closed ball
/// centered at a cell center has |average of rho| <= kappa. rho must take
/// only the values -1 and +1. Ball averages by FFT convolution.
GeometricScale geometric_mixing_scale(const ScalarField& rho, double kappa = 1.0 / 3.0);

/// mu(Phi(A) cap B) for a forward flow map or a cell permutation, with A, B
/// indicator fields thresholded at 1/2.
double strong_mixing_correlation(const FlowMap& forward, const ScalarField& a, const ScalarField& b);
double strong_mixing_correlation(const CellPermutation& forward, const ScalarField& a, const ScalarField& b);

/// Greedy epsilon-net size of a family given by its distance matrix.
std::size_t greedy_net_size(const std::vector<std::vector<double>>& dist, double eps);

struct PrecompactnessReport {
  std::vector<double> times;
  std::vector<std::vector<double>> l2_distance;
  double min_separated_distance = 0.0;       ///< over pairs at least `gap` apart in time
  double tail_min_separated_distance = 0.0;  ///< same, both members in the second half
  std::size_t net_size = 0;                  ///< greedy net at radius epsilon
  double epsilon = 0.0;
  std::vector<double> l2_to_mean;
  std::vector<double> hminus1_to_mean;
  std::vector<double> l2_to_initial;
  std::string hint;  ///< "precompact-like", "mixing-like" or "inconclusive"
};

/// Pairwise L^2 distances of snapshots and derived evidence. A hint only,
/// never a verdict. Throws for fewer than 8 snapshots.
PrecompactnessReport precompactness_probe(std::span<const ScalarField> snapshots, std::span<const double> times,
                                          double epsilon, double gap);

struct LevelSetProfile {
  std::vector<double> alphas;
  std::vector<double> times;
  std::vector<double> measure;                 ///< mu(D_alpha)
  std::vector<bool> trivial;                   ///< D_alpha null or conull
  std::vector<std::vector<double>> hminus1;    ///< [alpha][time]
  std::vector<double> rho_hminus1;             ///< H^{-1} of rho(t) - mean
  double max_threshold_mismatch = 0.0;         ///< max over alpha, t of |advected set sym-diff thresholded rho| / mu(D)
};

/// The 17 uniform quantiles k/16 of the field values, deduplicated.
std::vector<double> default_alphas(const ScalarField& rho0);

/// Advects each indicator 1_{rho0 >= alpha} through the given inverse maps
/// and records H^{-1} traces. Throws for alpha outside [min rho0, max rho0].
LevelSetProfile level_set_profile(const ScalarField& rho0, std::span<const FlowMap> inverse_maps,
                                  std::span<const double> alphas);

/// Same profile read off transported snapshots, D_alpha(t) = {rho(t) > cut},
/// the cut lying midway between alpha and the next smaller value of rho0;
/// equal to advecting the indicators by the level-set identity.
LevelSetProfile level_set_profile_from_snapshots(const ScalarField& rho0, std::span<const ScalarField> snapshots,
                                                 std::span<const double> times, std::span<const double> alphas);

struct LevelSetVerdict {
  std::vector<bool> rho_decayed;    ///< per snapshot
  std::vector<bool> alpha_decayed;  ///< per snapshot: every nontrivial alpha row decayed
  std::vector<bool> agree;
  bool all_agree = true;
  double min_rank_correlation = 1.0;  ///< over alpha rows that vary together with rho
  std::size_t correlated_rows = 0;
};

/// A series counts as decayed at a snapshot when its H^{-1} value is below
/// `decay_fraction` of the initial one. Rows varying less than
/// `flat_tolerance` (relative) are excluded from the rank correlation.
LevelSetVerdict level_set_verdict(const LevelSetProfile& p, double decay_fraction = 0.5,
                                  double flat_tolerance = 0.02);

/// Spearman rank correlation with average ranks; empty if either side is constant.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

}  // namespace mixlab
