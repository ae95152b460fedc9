#include "mixlab/perturbation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mixlab/spectral.hpp"

namespace mixlab {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("perturbation delta must lie in (0, 1/4)");
}

// S(tau) = 6 tau^5 - 15 tau^4 + 10 tau^3 and its derivative.
inline double smoothstep(double tau) { return tau * tau * tau * (tau * (6.0 * tau - 15.0) + 10.0); }
inline double smoothstep_slope(double tau) { return 30.0 * tau * tau * (tau - 1.0) * (tau - 1.0); }

}  // namespace

double cutoff(double delta, Vec2 y) {
  check_delta(delta);
  const double r = norm(y);
  if (r <= delta) return 1.0;
  if (r >= 2.0 * delta) return 0.0;
  return 1.0 - smoothstep((r - delta) / delta);
}

Vec2 cutoff_gradient(double delta, Vec2 y) {
  check_delta(delta);
  const double r = norm(y);
  if (r <= delta || r >= 2.0 * delta) return {};
  const double g = -smoothstep_slope((r - delta) / delta) / delta;
  return y * (g / r);
}

AnnulusSource annulus_source(const VelocityField& u, double t, TorusPoint center, double delta, Limit lim,
                             double tolerance) {
  check_delta(delta);
  const Vec2 uc = u.velocity(t, center, lim);
  AnnulusSource src(delta, [&u, t, center, delta, lim, uc](Vec2 y) {
    return dot(u.velocity(t, center + y, lim) - uc, cutoff_gradient(delta, y));
  });
  if (src.compatibility_residual() > tolerance) {
    std::ostringstream os;
    os << "annulus source has nonzero integral (relative residual " << src.compatibility_residual()
       << "); the base field is not divergence-free";
    throw std::runtime_error(os.str());
  }
  return src;
}

Backend parse_backend(std::string_view s) {
  if (s == "stream") return Backend::stream;
  if (s == "bogovskii") return Backend::bogovskii;
  throw std::invalid_argument("unknown perturbation backend '" + std::string(s) + "'");
}

std::string_view to_string(Backend b) { return b == Backend::stream ? "stream" : "bogovskii"; }

TorusPoint default_anchor(Grid grid) { return {0.5 + 0.5 * grid.h(), 0.5 + 0.5 * grid.h()}; }

Perturbation::Perturbation(FieldPtr base, PerturbationSpec spec, TorusPoint anchor)
    : base_(std::move(base)),
      spec_(spec),
      anchor_(anchor),
      backend_(spec.backend),
      traj_(integrate_trajectory(*base_, anchor, 0.0, spec.horizon, spec.h_t)) {
  check_delta(spec_.delta);
  if (!base_) throw std::invalid_argument("perturbation needs a base field");
  if (backend_ == Backend::stream && !base_->local_stream(0.0, anchor_, Vec2{}, Limit::right))
    backend_ = Backend::bogovskii;
}

Perturbation::Frame Perturbation::frame(double t, Limit lim) const {
  const TorusPoint c = traj_.at(t);
  return {c, base_->velocity(t, c, lim)};
}

Vec2 Perturbation::stream_velocity(const Frame& f, double t, TorusPoint x, Limit lim) const {
  const Vec2 y = torus_offset(f.center, x);
  const double r = norm(y);
  const double delta = spec_.delta;
  if (r >= 2.0 * delta) return {};
  const Vec2 u = base_->velocity(t, x, lim);
  if (r <= delta) return f.center_velocity - u;
  const double psi_c = -f.center_velocity.x1 * y.x2 + f.center_velocity.x2 * y.x1;
  const double stream = psi_c - *base_->local_stream(t, f.center, y, lim);
  const Vec2 g = cutoff_gradient(delta, y);
  return (f.center_velocity - u) * cutoff(delta, y) + Vec2{-g.x2, g.x1} * stream;
}

std::shared_ptr<const Perturbation::SolvedCorrector> Perturbation::corrector_at(double t, Limit lim) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (cache_ && cache_->t == t && cache_->lim == lim) return cache_;
  }
  const Frame f = frame(t, lim);
  auto src = std::make_shared<const AnnulusSource>(annulus_source(*base_, t, f.center, spec_.delta, lim));
  auto w = std::make_shared<const BogovskiiCorrector>(bogovskii_solve(*src));
  auto solved = std::make_shared<const SolvedCorrector>(SolvedCorrector{t, lim, src, w});
  std::lock_guard lock(cache_mutex_);
  cache_ = solved;
  return solved;
}

Vec2 Perturbation::bogovskii_velocity(const Frame& f, double t, TorusPoint x, Limit lim) const {
  const Vec2 y = torus_offset(f.center, x);
  const double r = norm(y);
  if (r >= 2.0 * spec_.delta) return {};
  const Vec2 u = base_->velocity(t, x, lim);
  Vec2 v = (f.center_velocity - u) * cutoff(spec_.delta, y);
  if (r > spec_.delta) v += (*corrector_at(t, lim)->w)(y);
  return v;
}

Vec2 Perturbation::velocity(double t, TorusPoint x, Limit lim) const {
  const Frame f = frame(t, lim);
  return backend_ == Backend::stream ? stream_velocity(f, t, x, lim) : bogovskii_velocity(f, t, x, lim);
}

void Perturbation::velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out, Limit lim) const {
  std::fill(out.begin(), out.end(), Vec2{});
  add_velocities(t, x, out, lim);
}

void Perturbation::add_velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out, Limit lim) const {
  if (x.size() != out.size()) throw std::invalid_argument("velocity batch size mismatch");
  const Frame f = frame(t, lim);
  if (backend_ == Backend::bogovskii) corrector_at(t, lim);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (backend_ == Backend::stream) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] += stream_velocity(f, t, x[k], lim);
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] += bogovskii_velocity(f, t, x[k], lim);
  }
}

std::optional<double> Perturbation::local_stream(double t, TorusPoint origin, Vec2 y, Limit lim) const {
  if (backend_ != Backend::stream) return std::nullopt;
  const Frame f = frame(t, lim);
  auto stream_at = [&](TorusPoint x) {
    const Vec2 z = torus_offset(f.center, x);
    if (norm(z) >= 2.0 * spec_.delta) return 0.0;
    const double psi_c = -f.center_velocity.x1 * z.x2 + f.center_velocity.x2 * z.x1;
    return cutoff(spec_.delta, z) * (psi_c - *base_->local_stream(t, f.center, z, lim));
  };
  return stream_at(origin + y) - stream_at(origin);
}

PerturbedField::PerturbedField(FieldPtr base, PerturbationPtr pert) : base_(std::move(base)), pert_(std::move(pert)) {
  if (!base_ || !pert_) throw std::invalid_argument("perturbed field needs a base and a perturbation");
}

Vec2 PerturbedField::velocity(double t, TorusPoint x, Limit lim) const {
  return base_->velocity(t, x, lim) + pert_->velocity(t, x, lim);
}

void PerturbedField::velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out, Limit lim) const {
  base_->velocities(t, x, out, lim);
  pert_->add_velocities(t, x, out, lim);
}

std::vector<double> PerturbedField::switch_times(double t0, double t1) const { return base_->switch_times(t0, t1); }

std::optional<double> PerturbedField::local_stream(double t, TorusPoint origin, Vec2 y, Limit lim) const {
  auto a = base_->local_stream(t, origin, y, lim);
  auto b = pert_->local_stream(t, origin, y, lim);
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

double PerturbedField::speed_bound() const { return 4.0 * base_->speed_bound(); }

std::string PerturbedField::describe() const {
  std::ostringstream os;
  os << "composite-with-perturbation(" << base_->describe() << ", delta=" << pert_->delta()
     << ", backend=" << to_string(pert_->backend()) << ")";
  return os.str();
}

SmallnessCertificate smallness_certificate(const Perturbation& pert, double p, std::span<const double> times,
                                           Grid grid) {
  if (!(p > 1.0)) throw std::invalid_argument("smallness certificate needs p > 1");
  SmallnessCertificate c;
  c.p = p;
  std::vector<TorusPoint> pts(grid.size());
  for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = grid.center(k);
  std::vector<Vec2> vals(pts.size());
  for (double t : times) {
    pert.velocities(t, pts, vals, Limit::right);
    std::vector<double> a(pts.size()), b(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) a[k] = vals[k].x1, b[k] = vals[k].x2;
    const double vn = w1p_norm(VectorField2(grid, std::move(a), std::move(b)), p).total;
    const VectorField2 u = sample_velocity(pert.base(), t, grid);
    const double gn = w1p_norm(u, p, Ball{pert.frame(t).center, 2.0 * pert.delta()}).grad_lp;
    c.times.push_back(t);
    c.v_w1p.push_back(vn);
    c.local_grad.push_back(gn);
    c.sup_v_w1p = std::max(c.sup_v_w1p, vn);
    c.sup_local_grad = std::max(c.sup_local_grad, gn);
    if (gn > 0.0) c.max_pointwise_ratio = std::max(c.max_pointwise_ratio, vn / gn);
  }
  c.ratio = c.sup_local_grad > 0.0 ? c.sup_v_w1p / c.sup_local_grad : 0.0;
  return c;
}

FrozenBallReport verify_frozen_ball(const PerturbedField& field, std::span<const double> times, Grid grid,
                                    double h_t, bool keep_snapshots, double base_h_t) {
  const Perturbation& pert = field.perturbation();
  const double delta = pert.delta();
  if (base_h_t <= 0.0) base_h_t = h_t;
  const IndicatorField ind = ball_indicator(pert.anchor(), delta, grid);
  const ScalarField& rho0 = ind.field;
  const double ball_area = std::numbers::pi * delta * delta;
  const double cell = grid.h() * grid.h();

  FrozenBallReport rep;
  const double t_end = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  const Trajectory moving = integrate_trajectory(field, pert.anchor(), 0.0, t_end, h_t);
  for (double t : times) {
    const FlowMap inv = inverse_flow_map(field, 0.0, t, grid, h_t);
    const ScalarField perturbed = compose(rho0, inv);
    const ScalarField base = compose(rho0, inverse_flow_map(pert.base(), 0.0, t, grid, base_h_t));
    const TorusPoint c = pert.frame(t).center;

    const ScalarField set = threshold(perturbed);
    const ScalarField target = ball_indicator(c, delta, grid).field;
    std::size_t mismatch = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) mismatch += set[k] != target[k];
    const double r = static_cast<double>(mismatch) * cell / ball_area;

    const MeasureReport audit = measure_preservation_report(inv, 0.1, Ball{c, delta});
    rep.resolution_warning = rep.resolution_warning || audit.under_resolved;
    rep.times.push_back(t);
    rep.defect.push_back(r);
    rep.max_defect = std::max(rep.max_defect, r);
    rep.hminus1_perturbed.push_back(sobolev_norm(perturbed, -1.0));
    rep.hminus1_base.push_back(sobolev_norm(base, -1.0));
    rep.center_gap.push_back(torus_dist(moving.at(t), c));
    if (keep_snapshots) {
      rep.perturbed_snapshots.push_back(perturbed);
      rep.base_snapshots.push_back(base);
    }
  }
  return rep;
}

}  // namespace mixlab
