#pragma once

/// @file perturbation.hpp
/// @brief Localized divergence-free perturbation that freezes a small ball
/// around the trajectory of an anchor point, and its audits.
///
/// Around the moving center c(t) = Phi_t(anchor) of the unperturbed flow,
/// the perturbation cancels the deformation of u on B_delta(c(t)) so that
/// u + v equals the constant u(t, c(t)) there, and vanishes outside
/// B_{2 delta}(c(t)). Two realizations are provided:
///   - stream: v = grad-perp( phi_delta(x - c) * (psi_c - psi_u) ), exact
///     divergence-free for fields with a closed-form stream function;
///   - bogovskii: v = phi_delta (u(c) - u) + w_t, with w_t a Bogovskii
///     corrector on the annulus (see bogovskii.hpp).

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "mixlab/bogovskii.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

/// Radial quintic-smoothstep cutoff: 1 on |y| <= delta, 0 on |y| >= 2 delta.
/// Throws for delta outside (0, 1/4).
double cutoff(double delta, Vec2 y);
Vec2 cutoff_gradient(double delta, Vec2 y);
/// sup |grad phi_delta| * delta for the quintic profile.
inline constexpr double cutoff_gradient_constant = 15.0 / 8.0;

/// f_t(y) = (u(t, c + y) - u(t, c)) . grad phi_delta(y) on the annulus.
/// Throws std::runtime_error when the zero-integral check fails, which
/// signals a base field that is not divergence-free.
AnnulusSource annulus_source(const VelocityField& u, double t, TorusPoint center, double delta,
                             Limit lim = Limit::right, double tolerance = 1e-8);

enum class Backend { stream, bogovskii };
Backend parse_backend(std::string_view s);
std::string_view to_string(Backend b);

struct PerturbationSpec {
  double delta = 0.1;
  std::optional<TorusPoint> anchor;  ///< default: (1/2, 1/2) shifted by half a cell
  Backend backend = Backend::stream;
  double horizon = 8.0;  ///< trajectory cache covers [0, horizon]
  double h_t = 0.01;     ///< cache resolution, equal to the transport step
};

/// Default anchor for a grid: (1/2 + h/2, 1/2 + h/2).
TorusPoint default_anchor(Grid grid);

class Perturbation {
 public:
  /// Integrates the anchor trajectory under the unperturbed base field.
  Perturbation(FieldPtr base, PerturbationSpec spec, TorusPoint anchor);

  double delta() const { return spec_.delta; }
  TorusPoint anchor() const { return anchor_; }
  Backend backend() const { return backend_; }
  bool fell_back() const { return backend_ != spec_.backend; }
  const Trajectory& center_trajectory() const { return traj_; }
  const VelocityField& base() const { return *base_; }
  const PerturbationSpec& spec() const { return spec_; }

  /// c(t) and u(t, c(t)).
  struct Frame {
    TorusPoint center;
    Vec2 center_velocity;
  };
  Frame frame(double t, Limit lim = Limit::right) const;

  /// v(t, x).
  Vec2 velocity(double t, TorusPoint x, Limit lim = Limit::right) const;
  void velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out, Limit lim) const;
  /// out[k] += v(t, x[k]).
  void add_velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out, Limit lim) const;

  /// phi_delta(x - c) (psi_c - psi_u), the stream function of v (stream backend only).
  std::optional<double> local_stream(double t, TorusPoint origin, Vec2 y, Limit lim) const;

 private:
  Vec2 stream_velocity(const Frame& f, double t, TorusPoint x, Limit lim) const;
  Vec2 bogovskii_velocity(const Frame& f, double t, TorusPoint x, Limit lim) const;

  struct SolvedCorrector {
    double t;
    Limit lim;
    std::shared_ptr<const AnnulusSource> src;
    std::shared_ptr<const BogovskiiCorrector> w;
  };
  std::shared_ptr<const SolvedCorrector> corrector_at(double t, Limit lim) const;

  FieldPtr base_;
  PerturbationSpec spec_;
  TorusPoint anchor_;
  Backend backend_;
  Trajectory traj_;
  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const SolvedCorrector> cache_;
};

using PerturbationPtr = std::shared_ptr<const Perturbation>;

/// u + v.
class PerturbedField final : public VelocityField {
 public:
  PerturbedField(FieldPtr base, PerturbationPtr pert);

  Vec2 velocity(double t, TorusPoint x, Limit lim = Limit::right) const override;
  void velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out,
                  Limit lim = Limit::right) const override;
  std::vector<double> switch_times(double t0, double t1) const override;
  std::optional<double> local_stream(double t, TorusPoint origin, Vec2 y,
                                     Limit lim = Limit::right) const override;
  double speed_bound() const override;
  std::string describe() const override;

  const Perturbation& perturbation() const { return *pert_; }

 private:
  FieldPtr base_;
  PerturbationPtr pert_;
};

/// Only the perturbation v, as a field (for norms and audits).
class PerturbationOnly final : public VelocityField {
 public:
  explicit PerturbationOnly(PerturbationPtr pert) : pert_(std::move(pert)) {}
  Vec2 velocity(double t, TorusPoint x, Limit lim = Limit::right) const override {
    return pert_->velocity(t, x, lim);
  }
  void velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out,
                  Limit lim = Limit::right) const override {
    pert_->velocities(t, x, out, lim);
  }
  double speed_bound() const override { return 3.0 * pert_->base().speed_bound(); }
  std::string describe() const override { return "perturbation"; }

 private:
  PerturbationPtr pert_;
};

struct SmallnessCertificate {
  double p = 2.0;
  double sup_v_w1p = 0.0;         ///< sup_t ||v(t)||_{W^{1,p}(T^2)}
  double sup_local_grad = 0.0;    ///< sup_t ||grad u(t)||_{L^p(B_{2 delta}(c(t)))}
  double ratio = 0.0;             ///< sup_v_w1p / sup_local_grad (0 if the latter vanishes)
  double max_pointwise_ratio = 0.0;  ///< max_t of the per-time ratio
  std::vector<double> times;
  std::vector<double> v_w1p;
  std::vector<double> local_grad;
};

SmallnessCertificate smallness_certificate(const Perturbation& pert, double p, std::span<const double> times,
                                           Grid grid);

struct FrozenBallReport {
  std::vector<double> times;
  std::vector<double> defect;           ///< r(t) = |S(t) sym-diff B_delta(c(t))| / |B_delta|
  std::vector<double> hminus1_perturbed;
  std::vector<double> hminus1_base;
  std::vector<double> center_gap;       ///< |perturbed trajectory of anchor - c(t)|
  double max_defect = 0.0;
  bool resolution_warning = false;      ///< local Jacobian audit inside the ball failed
  std::vector<ScalarField> perturbed_snapshots;  ///< advected indicator (unthresholded)
  std::vector<ScalarField> base_snapshots;
};

/// Transports the indicator of B_delta(anchor) under u + v and under u alone.
/// base_h_t <= 0 reuses h_t for the unperturbed run.
FrozenBallReport verify_frozen_ball(const PerturbedField& field, std::span<const double> times, Grid grid,
                                    double h_t, bool keep_snapshots = false, double base_h_t = 0.0);

}  // namespace mixlab
