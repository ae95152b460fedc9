#include "mixlab/metric.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "mixlab/diagnostics.hpp"

namespace mixlab {

namespace {

void check_same(const CellPermutation& a, const CellPermutation& b) {
  if (a.side() != b.side()) throw std::invalid_argument("permutations live on different grids");
}

template <class F>
void for_each_cycle(const CellPermutation& pi, const CellPermutation& sigma, F&& f) {
  check_same(pi, sigma);
  const CellPermutation rel = sigma.inverse().after(pi);
  std::vector<char> seen(rel.size(), 0);
  for (std::size_t s = 0; s < rel.size(); ++s) {
    if (seen[s]) continue;
    std::size_t len = 0;
    for (std::size_t k = s; !seen[k]; k = rel[k]) {
      seen[k] = 1;
      ++len;
    }
    f(len);
  }
}

}  // namespace

CycleStats relative_cycles(const CellPermutation& pi, const CellPermutation& sigma) {
  CycleStats st;
  for_each_cycle(pi, sigma, [&](std::size_t len) {
    ++st.cycles;
    if (len == 1) ++st.fixed_points;
    st.longest = std::max(st.longest, len);
  });
  return st;
}

double sym_diff_metric(const CellPermutation& pi, const CellPermutation& sigma) {
  std::size_t total = 0;
  for_each_cycle(pi, sigma, [&](std::size_t len) { total += 2 * (len / 2); });
  return static_cast<double>(total) / static_cast<double>(pi.size());
}

double brute_force_sym_diff(const CellPermutation& pi, const CellPermutation& sigma) {
  check_same(pi, sigma);
  const std::size_t n = pi.size();
  if (n > 16) throw std::invalid_argument("exhaustive search is limited to 16 cells");
  // Gray-code walk: toggling cell i toggles bit pi(i) of pi(D) and bit sigma(i) of sigma(D).
  std::uint32_t a = 0, b = 0;
  int best = 0;
  const std::uint32_t subsets = std::uint32_t{1} << n;
  for (std::uint32_t k = 1; k < subsets; ++k) {
    const int i = std::countr_zero(k);
    a ^= std::uint32_t{1} << pi[i];
    b ^= std::uint32_t{1} << sigma[i];
    best = std::max(best, std::popcount(a ^ b));
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

double dl_metric(const CellPermutation& pi, const CellPermutation& sigma) {
  check_same(pi, sigma);
  const auto side = static_cast<std::size_t>(pi.side());
  const double h = 1.0 / static_cast<double>(side);
  auto center = [&](std::size_t c) { return TorusPoint((c % side + 0.5) * h, (c / side + 0.5) * h); };
  double s = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) s += torus_dist(center(pi[k]), center(sigma[k]));
  return s / static_cast<double>(pi.size());
}

double dl_metric(const FlowMap& a, const FlowMap& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("flow maps live on different grids");
  double s = 0.0;
  for (std::size_t k = 0; k < a.positions.size(); ++k) s += torus_dist(a.positions[k], b.positions[k]);
  return s / static_cast<double>(a.positions.size());
}

double weak_dyadic_metric(const CellPermutation& pi, const CellPermutation& sigma) {
  check_same(pi, sigma);
  const int side = pi.side();
  if (side < 2 || (side & (side - 1)) != 0) throw std::invalid_argument("dyadic metric needs a power-of-two side");
  const int levels = std::countr_zero(static_cast<unsigned>(side));
  std::vector<std::uint32_t> a(pi.size()), b(pi.size());
  double total = 0.0, weights = 0.0;
  for (int l = 1; l <= levels; ++l) {
    const int block = side >> l;
    const auto per_axis = static_cast<std::size_t>(1) << l;
    auto square = [&](std::size_t c) {
      return static_cast<std::uint32_t>((c / side / block) * per_axis + (c % side) / block);
    };
    for (std::size_t c = 0; c < pi.size(); ++c) {
      a[pi[c]] = square(c);
      b[sigma[c]] = square(c);
    }
    std::vector<std::size_t> diff(per_axis * per_axis, 0);
    for (std::size_t y = 0; y < pi.size(); ++y)
      if (a[y] != b[y]) {
        ++diff[a[y]];
        ++diff[b[y]];
      }
    const double cells = static_cast<double>(block) * block;
    const double worst = static_cast<double>(*std::max_element(diff.begin(), diff.end()));
    const double w = std::ldexp(1.0, -l);
    total += w * worst / (2.0 * cells);
    weights += w;
  }
  return total / weights;
}

EquivalenceReport equivalence_experiment(std::span<const CellPermutation> sequence, const CellPermutation& limit,
                                         double band) {
  if (sequence.size() < 8) throw std::invalid_argument("equivalence experiment needs at least 8 elements");
  EquivalenceReport r;
  r.band = band;
  for (const auto& p : sequence) {
    r.d_sym.push_back(sym_diff_metric(p, limit));
    r.d_dl.push_back(dl_metric(p, limit));
  }
  auto away = [&](const std::vector<double>& v) {
    return std::all_of(v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end(),
                       [&](double x) { return x > band; });
  };
  r.sym_to_zero = r.d_sym.back() <= band;
  r.dl_to_zero = r.d_dl.back() <= band;
  r.sym_bounded_away = away(r.d_sym);
  r.dl_bounded_away = away(r.d_dl);
  r.concordant = (r.sym_to_zero && r.dl_to_zero) || (r.sym_bounded_away && r.dl_bounded_away);
  return r;
}

std::vector<std::vector<double>> pairwise_sym_diff(std::span<const CellPermutation> sequence) {
  const auto n = static_cast<std::ptrdiff_t>(sequence.size());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = i + 1; j < n; ++j) d[i][j] = sym_diff_metric(sequence[i], sequence[j]);
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = 0; j < i; ++j) d[i][j] = d[j][i];
  return d;
}

CompactnessReport compactness_probe(std::span<const CellPermutation> sequence, std::vector<double> eps) {
  if (sequence.size() < 8) throw std::invalid_argument("compactness probe needs at least 8 elements");
  CompactnessReport r;
  r.distance = pairwise_sym_diff(sequence);
  r.eps = std::move(eps);
  for (double e : r.eps) r.net_size.push_back(greedy_net_size(r.distance, e));
  r.min_late_distance = std::numeric_limits<double>::infinity();
  const std::size_t n = sequence.size();
  for (std::size_t i = n / 2; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) r.min_late_distance = std::min(r.min_late_distance, r.distance[i][j]);
  return r;
}

}  // namespace mixlab
