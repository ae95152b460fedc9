#pragma once

/// @file bogovskii.hpp
/// @brief Right inverse of the divergence on the annulus
/// A_delta = { delta < |y| < 2 delta } with zero boundary values.
///
/// The annulus is not star-shaped, so it is covered by overlapping sectors,
/// each star-shaped with respect to a small ball. The source is split with an
/// angular partition of unity, mass is passed along the chain of overlaps so
/// every piece has zero mean, and each piece is inverted with the Bogovskii
/// kernel
///   w(x) = int f(y) (x-y)/|x-y|^2 int_{|x-y|}^inf omega(y + r e) r dr dy,
/// evaluated in polar coordinates around x so the integrand is regular.

#include <functional>
#include <vector>

#include "mixlab/torus.hpp"

namespace mixlab {

/// Scalar source on the annulus of inner radius delta, sampled on a polar
/// Gauss-Legendre x trapezoid grid for mass checks.
class AnnulusSource {
 public:
  using Fn = std::function<double(Vec2)>;

  AnnulusSource(double delta, Fn f, int radial_nodes = 32, int angular_nodes = 256);

  double delta() const { return delta_; }
  double operator()(Vec2 y) const { return f_(y); }

  double integral() const { return integral_; }
  double l1_norm() const { return l1_; }
  double lp_norm(double p) const;
  /// |integral| / ||f||_{L^1}, 0 for the zero source.
  double compatibility_residual() const { return l1_ > 0.0 ? std::abs(integral_) / l1_ : 0.0; }

  /// Polar quadrature of g * f over the annulus.
  double integrate(const std::function<double(Vec2, double)>& g) const;

  struct Node {
    Vec2 y;
    double weight;
    double value;
  };
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  double delta_;
  Fn f_;
  std::vector<Node> nodes_;
  double integral_ = 0.0;
  double l1_ = 0.0;
};

struct BogovskiiOptions {
  int sectors = 8;
  double half_angle = 35.0 * 3.14159265358979323846 / 180.0;
  double ball_radius = 1.6;   ///< ball center radius / delta
  double ball_size = 0.25;    ///< ball radius / delta
  int angular_nodes = 64;
  int ray_nodes = 16;   ///< per panel
  int ray_panels = 3;
  int kernel_nodes = 32;
};

/// Corrector w with div w = f on the annulus and w = 0 on its boundary,
/// evaluated lazily by quadrature.
class BogovskiiCorrector {
 public:
  BogovskiiCorrector(const AnnulusSource& src, BogovskiiOptions opt = {});

  Vec2 operator()(Vec2 y) const;

  double delta() const { return delta_; }
  /// Mass of each sector piece after the chain correction (all ~ 0).
  const std::vector<double>& piece_masses() const { return piece_mass_; }

  /// Value of the i-th zero-mean sector piece of the source at y.
  double piece(int i, Vec2 y) const;

  int sectors() const { return opt_.sectors; }
  Vec2 ball_center(int i) const;
  double ball_radius() const { return opt_.ball_size * delta_; }

 private:
  double chi(int i, double theta) const;
  double chain_bump(int i, Vec2 y) const;  ///< unit-mass bump in the overlap of pieces i and i+1
  double omega(int i, Vec2 y) const;
  Vec2 piece_corrector(int i, Vec2 x) const;

  const AnnulusSource* src_;
  BogovskiiOptions opt_;
  double delta_;
  double omega_norm_ = 1.0;
  double chain_norm_ = 1.0;
  std::vector<double> cumulative_;  ///< a_i = sum_{j <= i} int chi_j f
  std::vector<double> piece_mass_;
  std::vector<double> gl_x_, gl_w_;  ///< ray rule on [0,1]
  std::vector<double> gk_x_, gk_w_;  ///< kernel rule on [0,1]
  std::vector<double> ga_x_, ga_w_;  ///< angular rule on [0,1]
};

/// Solves div w = f with w|_{boundary} = 0. Throws if the source violates the
/// compatibility condition beyond tolerance.
BogovskiiCorrector bogovskii_solve(const AnnulusSource& src, BogovskiiOptions opt = {},
                                   double tolerance = 1e-8);

struct BogovskiiAudit {
  double residual_rel_l2 = 0.0;   ///< ||div w - f||_{L^2} / ||f||_{L^2} on sample points
  double boundary_max = 0.0;      ///< max |w| on both boundary circles
  double w_lp = 0.0;
  double grad_w_lp = 0.0;
  double w_w1p = 0.0;
  double f_lp = 0.0;
  double stability = 0.0;         ///< w_w1p / f_lp
};

/// Central-difference audit of a corrector on a square sample lattice of
/// `samples` points per axis covering [-2 delta, 2 delta]^2.
BogovskiiAudit audit_bogovskii(const BogovskiiCorrector& w, const AnnulusSource& src, double p,
                               int samples = 48, int boundary_points = 64);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace mixlab
