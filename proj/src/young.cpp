#include "mixlab/young.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixlab {

EmpiricalYoungMeasure::EmpiricalYoungMeasure(int macro, int micro, std::vector<Row> rows, double t_lo, double t_hi,
                                             int count)
    : macro_(macro), micro_(micro), rows_(std::move(rows)), t_lo_(t_lo), t_hi_(t_hi), count_(count) {
  if (macro < 1 || micro < 1) throw std::invalid_argument("Young measure grids must be positive");
  if (rows_.size() != static_cast<std::size_t>(macro) * macro)
    throw std::invalid_argument("one Young-measure row per macrocell required");
  const auto cells = static_cast<std::uint64_t>(micro) * micro;
  for (auto& r : rows_) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].first >= cells || !(r[k].second >= 0.0)) throw std::invalid_argument("bad Young-measure entry");
      if (k > 0 && r[k].first <= r[k - 1].first) throw std::invalid_argument("Young-measure row not sorted");
      s += r[k].second;
    }
    if (!(s > 0.0)) throw std::invalid_argument("Young-measure row has no mass");
    for (auto& e : r) e.second /= s;
  }
}

double EmpiricalYoungMeasure::weight(std::size_t c, std::uint32_t cell) const {
  const Row& r = rows_.at(c);
  auto it = std::lower_bound(r.begin(), r.end(), cell, [](const auto& e, std::uint32_t v) { return e.first < v; });
  return it != r.end() && it->first == cell ? it->second : 0.0;
}

std::vector<double> EmpiricalYoungMeasure::dense(std::size_t limit) const {
  const std::size_t cells = static_cast<std::size_t>(micro_) * micro_;
  if (rows_.size() * cells > limit) throw std::length_error("Young measure too large for dense export");
  std::vector<double> out(rows_.size() * cells, 0.0);
  for (std::size_t c = 0; c < rows_.size(); ++c)
    for (const auto& [cell, w] : rows_[c]) out[c * cells + cell] = w;
  return out;
}

EmpiricalYoungMeasure empirical_young_measure(std::span<const FlowMap> inverse_maps, int macro, int micro) {
  if (inverse_maps.size() < 4) throw std::invalid_argument("Young measure needs at least 4 maps");
  const Grid g = inverse_maps.front().grid;
  const int n = g.n();
  if (macro < 1 || micro < 1 || n % macro != 0 || n % micro != 0)
    throw std::invalid_argument("macro and micro resolutions must divide the grid size");
  double t_lo = inverse_maps.front().time, t_hi = t_lo;
  for (const auto& m : inverse_maps) {
    if (!(m.grid == g)) throw std::invalid_argument("Young-measure maps must share one grid");
    if (!m.inverse) throw std::invalid_argument("Young measure is generated by inverse flow maps");
    t_lo = std::min(t_lo, m.time);
    t_hi = std::max(t_hi, m.time);
  }
  const int block = n / macro;
  const auto rows_n = static_cast<std::ptrdiff_t>(macro) * macro;
  std::vector<EmpiricalYoungMeasure::Row> rows(rows_n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t c = 0; c < rows_n; ++c) {
    const int ci = static_cast<int>(c % macro), cj = static_cast<int>(c / macro);
    std::vector<std::uint32_t> bins;
    bins.reserve(static_cast<std::size_t>(block) * block * inverse_maps.size());
    for (const auto& m : inverse_maps)
      for (int j = cj * block; j < (cj + 1) * block; ++j)
        for (int i = ci * block; i < (ci + 1) * block; ++i) {
          const TorusPoint p = m.positions[g.index(i, j)];
          const int bi = std::min(micro - 1, static_cast<int>(p.x1() * micro));
          const int bj = std::min(micro - 1, static_cast<int>(p.x2() * micro));
          bins.push_back(static_cast<std::uint32_t>(bj) * micro + bi);
        }
    std::sort(bins.begin(), bins.end());
    auto& row = rows[c];
    for (std::size_t k = 0; k < bins.size();) {
      std::size_t e = k;
      while (e < bins.size() && bins[e] == bins[k]) ++e;
      row.emplace_back(bins[k], static_cast<double>(e - k));
      k = e;
    }
  }
  return EmpiricalYoungMeasure(macro, micro, std::move(rows), t_lo, t_hi, static_cast<int>(inverse_maps.size()));
}

namespace {

std::vector<double> block_average(const ScalarField& f, int parts, bool square) {
  const int n = f.grid().n();
  if (parts < 1 || n % parts != 0) throw std::invalid_argument("partition must divide the field resolution");
  const int b = n / parts;
  std::vector<double> out(static_cast<std::size_t>(parts) * parts, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = f.at(i, j);
      out[static_cast<std::size_t>(j / b) * parts + i / b] += square ? v * v : v;
    }
  const double inv = 1.0 / (static_cast<double>(b) * b);
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace

std::vector<double> micro_averages(const ScalarField& rho, int micro) { return block_average(rho, micro, false); }

std::vector<double> macro_average(const ScalarField& f, int macro) { return block_average(f, macro, false); }

std::vector<double> pushforward_expectation(const EmpiricalYoungMeasure& nu, const ScalarField& rho) {
  const auto a = micro_averages(rho, nu.micro());
  std::vector<double> out(nu.rows(), 0.0);
  for (std::size_t c = 0; c < nu.rows(); ++c)
    for (const auto& [cell, w] : nu.row(c)) out[c] += w * a[cell];
  return out;
}

double jensen_gap(const EmpiricalYoungMeasure& nu, const ScalarField& rho) {
  const auto a = block_average(rho, nu.micro(), false);
  const auto a2 = block_average(rho, nu.micro(), true);
  double gap = 0.0;
  for (std::size_t c = 0; c < nu.rows(); ++c) {
    double mean = 0.0;
    for (const auto& [cell, w] : nu.row(c)) mean += w * a[cell];
    // within-cell variance plus spread of cell averages around the row mean
    double g = 0.0;
    for (const auto& [cell, w] : nu.row(c)) {
      const double d = a[cell] - mean;
      g += w * (std::max(0.0, a2[cell] - a[cell] * a[cell]) + d * d);
    }
    gap += g;
  }
  return gap / static_cast<double>(nu.rows());
}

MarginalCheck marginal_check(const EmpiricalYoungMeasure& nu, const std::vector<bool>& micro_set) {
  const std::size_t cells = static_cast<std::size_t>(nu.micro()) * nu.micro();
  if (micro_set.size() != cells) throw std::invalid_argument("set must flag every micro cell");
  MarginalCheck out;
  for (std::size_t c = 0; c < nu.rows(); ++c)
    for (const auto& [cell, w] : nu.row(c))
      if (micro_set[cell]) out.young_mass += w;
  out.young_mass /= static_cast<double>(nu.rows());
  out.lebesgue_mass = static_cast<double>(std::count(micro_set.begin(), micro_set.end(), true)) / cells;
  return out;
}

double max_tv_to_uniform(const EmpiricalYoungMeasure& nu) {
  const double cells = static_cast<double>(nu.micro()) * nu.micro();
  const double u = 1.0 / cells;
  double worst = 0.0;
  for (std::size_t c = 0; c < nu.rows(); ++c) {
    double s = 0.0;
    for (const auto& [cell, w] : nu.row(c)) s += std::abs(w - u);
    s += (cells - static_cast<double>(nu.row(c).size())) * u;
    worst = std::max(worst, 0.5 * s);
  }
  return worst;
}

}  // namespace mixlab
