#include "mixlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mixlab/spectral.hpp"

namespace mixlab {

double mix_norm(const ScalarField& rho, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("mix-norm exponent must be positive");
  return sobolev_norm(rho, -s);
}

std::vector<double> gradient_budget(const VelocityField& u, std::span<const double> times, double p, Grid grid,
                                    int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  std::vector<double> out;
  out.reserve(times.size());
  double acc = 0.0, prev = 0.0;
  for (double t : times) {
    if (t < prev) throw std::invalid_argument("gradient budget times must be nonnegative and increasing");
    std::vector<double> cuts{prev};
    for (double s : u.switch_times(prev, t)) cuts.push_back(s);
    cuts.push_back(t);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double len = (cuts[c + 1] - cuts[c]) / substeps;
      for (int k = 0; k < substeps && len > 0.0; ++k) {
        const double tm = cuts[c] + (k + 0.5) * len;
        acc += len * w1p_norm(sample_velocity(u, tm, grid), p).grad_lp;
      }
    }
    out.push_back(acc);
    prev = t;
  }
  return out;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   std::span<const double> gradient_integral, double tolerance) {
  const std::size_t n = values.size();
  if (times.size() != n || gradient_integral.size() != n)
    throw std::invalid_argument("decay fit series lengths differ");
  if (n < 4) throw std::invalid_argument("decay fit needs at least 4 points");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("decay fit needs positive values");

  const std::size_t m = std::max<std::size_t>(2, n / 2);
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sx += gradient_integral[k];
    sy += std::log(values[k]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = gradient_integral[k] - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[k]) - my);
  }
  DecayFit fit;
  fit.fitted_points = m;
  const double scale = std::max(1.0, std::abs(mx));
  const double slope = sxx > 1e-24 * scale * scale ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  fit.c1 = std::exp(intercept);
  fit.c2 = -slope;
  for (std::size_t k = 0; k < n; ++k) {
    const double gap = intercept + slope * gradient_integral[k] - std::log(values[k]);
    fit.max_shortfall = std::max(fit.max_shortfall, gap);
  }
  fit.violation = fit.max_shortfall > tolerance;
  return fit;
}

GeometricScale geometric_mixing_scale(const ScalarField& rho, double kappa) {
  if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("geometric scale accuracy must lie in (0, 1/2)");
  for (double v : rho.values())
    if (v != 1.0 && v != -1.0) throw std::invalid_argument("geometric mixing scale needs a +-1 field");
  const Grid& g = rho.grid();
  const int n = g.n();
  GeometricScale out;
  for (int k = 0;; ++k) {
    const double r = g.h() * std::ldexp(1.0, k);
    if (r > 0.25) break;
    std::vector<double> kern(g.size(), 0.0);
    double count = 0.0;
    const int span = static_cast<int>(std::ceil(r / g.h()));
    for (int dj = -span; dj <= span; ++dj)
      for (int di = -span; di <= span; ++di)
        if (std::hypot(di, dj) * g.h() <= r) {
          kern[g.index(g.wrap(di), g.wrap(dj))] += 1.0;
          count += 1.0;
        }
    const ScalarField avg = circular_convolve(rho, ScalarField(g, std::move(kern)));
    double worst = 0.0;
    for (double v : avg.values()) worst = std::max(worst, std::abs(v) / count);
    out.radii.push_back(r);
    out.max_abs_average.push_back(worst);
    if (out.unmixed && worst <= kappa) {
      out.epsilon = r;
      out.level = k;
      out.unmixed = false;
    }
    if (span >= n / 2) break;
  }
  return out;
}

double strong_mixing_correlation(const FlowMap& forward, const ScalarField& a, const ScalarField& b) {
  if (forward.inverse) throw std::invalid_argument("strong mixing correlation needs a forward map");
  if (!(a.grid() == forward.grid) || !(b.grid() == forward.grid)) throw std::invalid_argument("grid mismatch");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < forward.positions.size(); ++k)
    if (a[k] > 0.5 && b[forward.grid.cell_of(forward.positions[k])] > 0.5) ++hits;
  return static_cast<double>(hits) / static_cast<double>(forward.grid.size());
}

double strong_mixing_correlation(const CellPermutation& forward, const ScalarField& a, const ScalarField& b) {
  if (static_cast<int>(a.grid().n()) != forward.side() || !(a.grid() == b.grid()))
    throw std::invalid_argument("grid mismatch");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < forward.size(); ++k)
    if (a[k] > 0.5 && b[forward[k]] > 0.5) ++hits;
  return static_cast<double>(hits) / static_cast<double>(forward.size());
}

std::size_t greedy_net_size(const std::vector<std::vector<double>>& dist, double eps) {
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    bool covered = false;
    for (std::size_t c : centers)
      if (dist[i][c] <= eps) {
        covered = true;
        break;
      }
    if (!covered) centers.push_back(i);
  }
  return centers.size();
}

PrecompactnessReport precompactness_probe(std::span<const ScalarField> snapshots, std::span<const double> times,
                                          double epsilon, double gap) {
  const std::size_t n = snapshots.size();
  if (n < 8) throw std::invalid_argument("precompactness probe needs at least 8 snapshots");
  if (times.size() != n) throw std::invalid_argument("one time per snapshot required");
  PrecompactnessReport rep;
  rep.times.assign(times.begin(), times.end());
  rep.epsilon = epsilon;
  rep.l2_distance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      rep.l2_distance[i][j] = rep.l2_distance[j][i] = (snapshots[i] - snapshots[j]).l2_norm();

  rep.min_separated_distance = rep.tail_min_separated_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(times[j] - times[i]) < gap) continue;
      rep.min_separated_distance = std::min(rep.min_separated_distance, rep.l2_distance[i][j]);
      if (i >= n / 2) rep.tail_min_separated_distance = std::min(rep.tail_min_separated_distance, rep.l2_distance[i][j]);
    }
  rep.net_size = greedy_net_size(rep.l2_distance, epsilon);
  for (const auto& s : snapshots) {
    rep.l2_to_mean.push_back(s.shifted(-s.mean()).l2_norm());
    rep.hminus1_to_mean.push_back(sobolev_norm(s, -1.0));
    rep.l2_to_initial.push_back((s - snapshots[0]).l2_norm());
  }
  bool far_from_start = true;
  for (std::size_t k = n / 2; k < n; ++k) far_from_start = far_from_start && rep.l2_to_initial[k] >= 0.5 * rep.l2_to_mean[0];
  const bool weak_decay = rep.hminus1_to_mean.back() <= 0.5 * rep.hminus1_to_mean.front();
  if (far_from_start && weak_decay)
    rep.hint = "mixing-like";
  else if (rep.tail_min_separated_distance <= epsilon)
    rep.hint = "precompact-like";
  else
    rep.hint = "inconclusive";
  return rep;
}

std::vector<double> default_alphas(const ScalarField& rho0) {
  std::vector<double> v(rho0.values().begin(), rho0.values().end());
  std::sort(v.begin(), v.end());
  std::vector<double> a;
  for (int k = 0; k <= 16; ++k) {
    const auto idx = static_cast<std::size_t>(std::llround(k / 16.0 * static_cast<double>(v.size() - 1)));
    if (a.empty() || v[idx] != a.back()) a.push_back(v[idx]);
  }
  return a;
}

namespace {

// Cut strictly between alpha and the next smaller value of rho0, so that
// {f > cut} reproduces {rho0 >= alpha} at t = 0 and tolerates interpolation noise.
std::vector<double> level_cuts(const ScalarField& rho0, std::span<const double> alphas) {
  std::vector<double> v(rho0.values().begin(), rho0.values().end());
  std::sort(v.begin(), v.end());
  std::vector<double> cuts;
  for (double a : alphas) {
    const auto it = std::lower_bound(v.begin(), v.end(), a);
    cuts.push_back(it == v.begin() ? -std::numeric_limits<double>::infinity() : 0.5 * (a + *std::prev(it)));
  }
  return cuts;
}

}  // namespace

LevelSetProfile level_set_profile(const ScalarField& rho0, std::span<const FlowMap> inverse_maps,
                                  std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("level-set profile needs thresholds");
  const double lo = rho0.min(), hi = rho0.max();
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (alphas[k] < lo || alphas[k] > hi) throw std::invalid_argument("threshold outside the range of the data");
    if (k > 0 && !(alphas[k] > alphas[k - 1])) throw std::invalid_argument("thresholds must increase strictly");
  }
  for (const auto& m : inverse_maps)
    if (!m.inverse) throw std::invalid_argument("level-set profile needs inverse flow maps");
  const Grid& g = rho0.grid();
  const double cell = g.h() * g.h();
  // values this close to a threshold are ties, decided by roundoff
  const double tie = 1e-9 * std::max(hi - lo, 1.0);
  const auto cuts = level_cuts(rho0, alphas);

  LevelSetProfile p;
  p.alphas.assign(alphas.begin(), alphas.end());
  std::vector<ScalarField> indicators;
  for (double a : alphas) {
    std::vector<double> v(g.size());
    double count = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      v[k] = rho0[k] >= a ? 1.0 : 0.0;
      count += v[k];
    }
    p.measure.push_back(count * cell);
    p.trivial.push_back(count == 0.0 || count == static_cast<double>(g.size()));
    indicators.emplace_back(g, std::move(v));
  }
  p.hminus1.assign(alphas.size(), {});
  for (const auto& m : inverse_maps) {
    p.times.push_back(m.time);
    const ScalarField rho = compose(rho0, m);
    p.rho_hminus1.push_back(sobolev_norm(rho, -1.0));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const ScalarField moved = compose(indicators[a], m);
      p.hminus1[a].push_back(sobolev_norm(moved, -1.0));
      if (p.trivial[a]) continue;
      std::size_t mismatch = 0;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (std::abs(rho[k] - cuts[a]) > tie) mismatch += (moved[k] > 0.5) != (rho[k] > cuts[a]);
      p.max_threshold_mismatch = std::max(p.max_threshold_mismatch, mismatch * cell / p.measure[a]);
    }
  }
  return p;
}

LevelSetProfile level_set_profile_from_snapshots(const ScalarField& rho0, std::span<const ScalarField> snapshots,
                                                 std::span<const double> times, std::span<const double> alphas) {
  if (snapshots.size() != times.size()) throw std::invalid_argument("one time per snapshot required");
  const double lo = rho0.min(), hi = rho0.max();
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (alphas[k] < lo || alphas[k] > hi) throw std::invalid_argument("threshold outside the range of the data");
    if (k > 0 && !(alphas[k] > alphas[k - 1])) throw std::invalid_argument("thresholds must increase strictly");
  }
  const Grid& g = rho0.grid();
  const auto cuts = level_cuts(rho0, alphas);
  LevelSetProfile p;
  p.alphas.assign(alphas.begin(), alphas.end());
  p.times.assign(times.begin(), times.end());
  for (double a : alphas) {
    double count = 0.0;
    for (double v : rho0.values()) count += v >= a ? 1.0 : 0.0;
    p.measure.push_back(count / static_cast<double>(g.size()));
    p.trivial.push_back(count == 0.0 || count == static_cast<double>(g.size()));
  }
  p.hminus1.assign(alphas.size(), {});
  for (const auto& rho : snapshots) {
    if (!(rho.grid() == g)) throw std::invalid_argument("snapshot grid mismatch");
    p.rho_hminus1.push_back(sobolev_norm(rho, -1.0));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::vector<double> v(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) v[k] = rho[k] > cuts[a] ? 1.0 : 0.0;
      p.hminus1[a].push_back(sobolev_norm(ScalarField(g, std::move(v)), -1.0));
    }
  }
  return p;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

bool varies(std::span<const double> x, double tol) {
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  return *mx > 0.0 && (*mx - *mn) > tol * *mx;
}

}  // namespace

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("rank correlation needs equal series");
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    sab += (ra[k] - ma) * (rb[k] - mb);
    saa += (ra[k] - ma) * (ra[k] - ma);
    sbb += (rb[k] - mb) * (rb[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

LevelSetVerdict level_set_verdict(const LevelSetProfile& p, double decay_fraction, double flat_tolerance) {
  LevelSetVerdict v;
  const std::size_t nt = p.times.size();
  auto decayed = [&](const std::vector<double>& row, std::size_t k) {
    return row[k] < decay_fraction * row.front();
  };
  bool any_nontrivial = false;
  for (std::size_t a = 0; a < p.alphas.size(); ++a) any_nontrivial = any_nontrivial || !p.trivial[a];
  for (std::size_t k = 0; k < nt; ++k) {
    const bool r = decayed(p.rho_hminus1, k);
    bool all = any_nontrivial;
    for (std::size_t a = 0; a < p.alphas.size(); ++a)
      if (!p.trivial[a]) all = all && decayed(p.hminus1[a], k);
    v.rho_decayed.push_back(r);
    v.alpha_decayed.push_back(all);
    v.agree.push_back(r == all);
    v.all_agree = v.all_agree && r == all;
  }
  if (nt >= 2 && varies(p.rho_hminus1, flat_tolerance)) {
    for (std::size_t a = 0; a < p.alphas.size(); ++a) {
      if (p.trivial[a] || !varies(p.hminus1[a], flat_tolerance)) continue;
      if (auto c = spearman(p.rho_hminus1, p.hminus1[a])) {
        v.min_rank_correlation = std::min(v.min_rank_correlation, *c);
        ++v.correlated_rows;
      }
    }
  }
  return v;
}

}  // namespace mixlab
