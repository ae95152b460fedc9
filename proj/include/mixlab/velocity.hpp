#pragma once

/// @file velocity.hpp
/// @brief Closed-form divergence-free velocity fields on T^2.
///
/// Every built-in field comes from a stream function psi with
/// u = grad-perp psi = (-d psi/dx2, d psi/dx1), so it is divergence-free
/// analytically. Time-dependent fields may jump at switching instants; at such
/// an instant the default evaluation takes the later branch (right limit) and
/// integrators ask for the left limit explicitly when a step ends there.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixlab/torus.hpp"

namespace mixlab {

/// One-sided evaluation at a switching instant.
enum class Limit { right, left };

enum class FieldKind { steady_shear, alternating_shear, cellular, uniform, composite };

FieldKind parse_field_kind(std::string_view s);
std::string_view to_string(FieldKind k);

struct FieldParams {
  FieldKind kind = FieldKind::steady_shear;
  double amplitude = 1.0;
  int wavenumber = 1;
  double switch_period = 1.0;
  Vec2 uniform_velocity{};  ///< only for FieldKind::uniform
};

/// Interface shared by analytic, composite and test fields.
class VelocityField {
 public:
  virtual ~VelocityField() = default;

  virtual Vec2 velocity(double t, TorusPoint x, Limit lim = Limit::right) const = 0;

  /// Evaluate at many points sharing one time. Default loops over velocity().
  virtual void velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out,
                          Limit lim = Limit::right) const;

  /// Instants in the open interval (t0, t1) where the field jumps in time.
  virtual std::vector<double> switch_times(double t0, double t1) const;

  /// psi(origin + y) - psi(origin) for a local stream function of the field,
  /// with y the unwrapped offset. Empty when no closed form exists.
  virtual std::optional<double> local_stream(double t, TorusPoint origin, Vec2 y,
                                             Limit lim = Limit::right) const;

  /// Uniform bound on |u(t,x)|.
  virtual double speed_bound() const = 0;

  virtual std::string describe() const = 0;
};

using FieldPtr = std::shared_ptr<const VelocityField>;

/// Shears, alternating shears, cellular flow and uniform translation.
class AnalyticField final : public VelocityField {
 public:
  explicit AnalyticField(FieldParams p);

  Vec2 velocity(double t, TorusPoint x, Limit lim = Limit::right) const override;
  void velocities(double t, std::span<const TorusPoint> x, std::span<Vec2> out,
                  Limit lim = Limit::right) const override;
  std::vector<double> switch_times(double t0, double t1) const override;
  std::optional<double> local_stream(double t, TorusPoint origin, Vec2 y,
                                     Limit lim = Limit::right) const override;
  double speed_bound() const override;
  std::string describe() const override;

  const FieldParams& params() const { return p_; }

 private:
  /// 0 for the x2-dependent shear, 1 for the x1-dependent one.
  int alternating_phase(double t, Limit lim) const;

  FieldParams p_;
};

/// Wraps an arbitrary callable. Used for manufactured and deliberately
/// defective fields in tests and experiments.
class FunctionField final : public VelocityField {
 public:
  using Fn = std::function<Vec2(double, TorusPoint)>;
  FunctionField(Fn fn, double speed_bound, std::string name = "function");

  Vec2 velocity(double t, TorusPoint x, Limit lim = Limit::right) const override;
  double speed_bound() const override { return bound_; }
  std::string describe() const override { return name_; }

 private:
  Fn fn_;
  double bound_;
  std::string name_;
};

FieldPtr make_field(const FieldParams& p);

inline Vec2 eval_velocity(const VelocityField& u, double t, TorusPoint x) {
  return u.velocity(t, x);
}

/// u(t, .) sampled at the cell centers of grid.
VectorField2 sample_velocity(const VelocityField& u, double t, Grid grid, Limit lim = Limit::right);

/// Max |central-difference divergence| of u(t, .) on grid.
double divergence_residual(const VelocityField& u, double t, Grid grid);

struct IntegrabilityRow {
  double delta = 0.0;
  double sup_grad_lp = 0.0;  ///< sup over sampled t of ||grad u(t)||_{L^p(B_{2 delta}(c(t)))}
};

/// For each delta (strictly decreasing), the supremum over sampled times of the
/// localized gradient norm around the moving center c(t).
std::vector<IntegrabilityRow> uniform_integrability_profile(
    const VelocityField& u, double p, std::span<const double> radii, std::span<const double> times,
    const std::function<TorusPoint(double)>& center, Grid grid);

}  // namespace mixlab
