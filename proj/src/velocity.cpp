#include "mixlab/velocity.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mixlab {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

FieldKind parse_field_kind(std::string_view s) {
  if (s == "steady-shear") return FieldKind::steady_shear;
  if (s == "alternating-shear") return FieldKind::alternating_shear;
  if (s == "cellular") return FieldKind::cellular;
  if (s == "uniform") return FieldKind::uniform;
  if (s == "composite-with-perturbation" || s == "composite") return FieldKind::composite;
  throw std::invalid_argument("unknown velocity field kind '" + std::string(s) + "'");
}

std::string_view to_string(FieldKind k) {
  switch (k) {
    case FieldKind::steady_shear: return "steady-shear";
    case FieldKind::alternating_shear: return "alternating-shear";
    case FieldKind::cellular: return "cellular";
    case FieldKind::uniform: return "uniform";
    case FieldKind::composite: return "composite-with-perturbation";
  }
  return "unknown";
}

void VelocityField::velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out,
                               Limit lim) const {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = velocity(t, x[k], lim);
}

std::vector<double> VelocityField::switch_times(double, double) const { return {}; }

std::optional<double> VelocityField::local_stream(double, TorusPoint, Vec2, Limit) const {
  return std::nullopt;
}

AnalyticField::AnalyticField(FieldParams p) : p_(p) {
  if (p_.kind == FieldKind::composite)
    throw std::invalid_argument("composite fields are assembled from a base field and a perturbation");
  if (!std::isfinite(p_.amplitude)) throw std::invalid_argument("field amplitude must be finite");
  if (p_.wavenumber < 1) throw std::invalid_argument("field wavenumber must be >= 1");
  if (p_.kind == FieldKind::alternating_shear && !(p_.switch_period > 0.0))
    throw std::invalid_argument("switch period must be positive");
}

int AnalyticField::alternating_phase(double t, Limit lim) const {
  const double q = t / p_.switch_period;
  auto k = static_cast<long long>(std::floor(q));
  if (lim == Limit::left && static_cast<double>(k) == q && k > 0) --k;
  return static_cast<int>(k & 1);
}

Vec2 AnalyticField::velocity(double t, TorusPoint x, Limit lim) const {
  const double A = p_.amplitude;
  const double w = two_pi * p_.wavenumber;
  switch (p_.kind) {
    case FieldKind::steady_shear:
      return {A * std::sin(w * x.x2()), 0.0};
    case FieldKind::alternating_shear:
      if (alternating_phase(t, lim) == 0) return {A * std::sin(w * x.x2()), 0.0};
      return {0.0, A * std::sin(w * x.x1())};
    case FieldKind::cellular:
      // psi = A/(2 pi m) sin(2 pi m x1) sin(2 pi m x2)
      return {-A * std::sin(w * x.x1()) * std::cos(w * x.x2()),
              A * std::cos(w * x.x1()) * std::sin(w * x.x2())};
    case FieldKind::uniform:
      return p_.uniform_velocity;
    case FieldKind::composite:
      break;
  }
  throw std::logic_error("unreachable field kind");
}

void AnalyticField::velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out, Limit lim) const {
  if (x.size() != out.size()) throw std::invalid_argument("velocity batch size mismatch");
  const double A = p_.amplitude;
  const double w = two_pi * p_.wavenumber;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  switch (p_.kind) {
    case FieldKind::steady_shear:
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = {A * std::sin(w * x[k].x2()), 0.0};
      return;
    case FieldKind::alternating_shear:
      if (alternating_phase(t, lim) == 0) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = {A * std::sin(w * x[k].x2()), 0.0};
      } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = {0.0, A * std::sin(w * x[k].x1())};
      }
      return;
    default:
      VelocityField::velocities(t, x, out, lim);
  }
}

std::vector<double> AnalyticField::switch_times(double t0, double t1) const {
  std::vector<double> out;
  if (p_.kind != FieldKind::alternating_shear) return out;
  const double T = p_.switch_period;
  for (auto k = static_cast<long long>(std::floor(t0 / T)) + 1;; ++k) {
    const double s = static_cast<double>(k) * T;
    if (s >= t1) break;
    if (s > t0) out.push_back(s);
  }
  return out;
}

std::optional<double> AnalyticField::local_stream(double t, TorusPoint o, Vec2 y, Limit lim) const {
  const double A = p_.amplitude;
  const double w = two_pi * p_.wavenumber;
  const double a1 = o.x1(), a2 = o.x2();
  const double b1 = a1 + y.x1, b2 = a2 + y.x2;
  switch (p_.kind) {
    case FieldKind::steady_shear:
      return A / w * (std::cos(w * b2) - std::cos(w * a2));
    case FieldKind::alternating_shear:
      if (alternating_phase(t, lim) == 0) return A / w * (std::cos(w * b2) - std::cos(w * a2));
      return -A / w * (std::cos(w * b1) - std::cos(w * a1));
    case FieldKind::cellular:
      return A / w * (std::sin(w * b1) * std::sin(w * b2) - std::sin(w * a1) * std::sin(w * a2));
    case FieldKind::uniform:
      return -p_.uniform_velocity.x1 * y.x2 + p_.uniform_velocity.x2 * y.x1;
    case FieldKind::composite:
      break;
  }
  return std::nullopt;
}

double AnalyticField::speed_bound() const {
  if (p_.kind == FieldKind::uniform) return norm(p_.uniform_velocity);
  return std::abs(p_.amplitude);
}

std::string AnalyticField::describe() const {
  std::ostringstream os;
  os << to_string(p_.kind) << "(A=" << p_.amplitude << ", m=" << p_.wavenumber;
  if (p_.kind == FieldKind::alternating_shear) os << ", T_sw=" << p_.switch_period;
  if (p_.kind == FieldKind::uniform) os << ", U=(" << p_.uniform_velocity.x1 << "," << p_.uniform_velocity.x2 << ")";
  os << ")";
  return os.str();
}

FunctionField::FunctionField(Fn fn, double speed_bound, std::string name)
    : fn_(std::move(fn)), bound_(speed_bound), name_(std::move(name)) {}

Vec2 FunctionField::velocity(double t, TorusPoint x, Limit) const { return fn_(t, x); }

FieldPtr make_field(const FieldParams& p) { return std::make_shared<AnalyticField>(p); }

VectorField2 sample_velocity(const VelocityField& u, double t, Grid grid, Limit lim) {
  std::vector<TorusPoint> pts(grid.size());
  for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = grid.center(k);
  std::vector<Vec2> v(grid.size());
  u.velocities(t, pts, v, lim);
  std::vector<double> a(grid.size()), b(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    a[k] = v[k].x1;
    b[k] = v[k].x2;
  }
  return VectorField2(grid, std::move(a), std::move(b));
}

double divergence_residual(const VelocityField& u, double t, Grid grid) {
  const VectorField2 v = sample_velocity(u, t, grid);
  const int n = grid.n();
  const double inv2h = 0.5 / grid.h();
  double worst = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double d = (v.u1()[grid.index(grid.wrap(i + 1), j)] - v.u1()[grid.index(grid.wrap(i - 1), j)] +
                        v.u2()[grid.index(i, grid.wrap(j + 1))] - v.u2()[grid.index(i, grid.wrap(j - 1))]) *
                       inv2h;
      worst = std::max(worst, std::abs(d));
    }
  return worst;
}

std::vector<IntegrabilityRow> uniform_integrability_profile(
    const VelocityField& u, double p, std::span<const double> radii, std::span<const double> times,
    const std::function<TorusPoint(double)>& center, Grid grid) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1, inf)");
  if (times.empty()) throw std::invalid_argument("uniform_integrability_profile needs at least one time");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] < radii[k - 1])) throw std::invalid_argument("radii must be strictly decreasing");
  std::vector<IntegrabilityRow> rows;
  for (double d : radii) rows.push_back({d, 0.0});
  for (double t : times) {
    const VectorField2 v = sample_velocity(u, t, grid);
    const TorusPoint c = center(t);
    for (auto& row : rows)
      row.sup_grad_lp = std::max(row.sup_grad_lp, w1p_norm(v, p, Ball{c, 2.0 * row.delta}).grad_lp);
  }
  return rows;
}

}  // namespace mixlab
