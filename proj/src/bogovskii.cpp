#include "mixlab/bogovskii.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mixlab {

namespace {

constexpr double pi = std::numbers::pi;

// Standard C-infinity bump on (-1, 1).
inline double bump(double q) {
  const double a = 1.0 - q * q;
  return a > 0.0 ? std::exp(-1.0 / a) : 0.0;
}

inline double wrap_angle(double a) {
  a = std::fmod(a + pi, 2.0 * pi);
  if (a < 0) a += 2.0 * pi;
  return a - pi;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    // map [-1, 1] -> [0, 1]
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[n - 1 - i] = 0.5 * wt;
  }
  if (n == 1) {
    x[0] = 0.5;
    w[0] = 1.0;
  }
}

AnnulusSource::AnnulusSource(double delta, Fn f, int radial_nodes, int angular_nodes)
    : delta_(delta), f_(std::move(f)) {
  if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("annulus delta must lie in (0, 1/4)");
  std::vector<double> gx, gw;
  gauss_legendre(radial_nodes, gx, gw);
  const double dth = 2.0 * pi / angular_nodes;
  for (int a = 0; a < radial_nodes; ++a) {
    const double r = delta * (1.0 + gx[a]);
    for (int b = 0; b < angular_nodes; ++b) {
      const double th = b * dth;
      const Vec2 y{r * std::cos(th), r * std::sin(th)};
      const double wt = gw[a] * delta * r * dth;
      const double v = f_(y);
      nodes_.push_back({y, wt, v});
      integral_ += wt * v;
      l1_ += wt * std::abs(v);
    }
  }
}

double AnnulusSource::lp_norm(double p) const {
  double s = 0.0;
  for (const auto& nd : nodes_) s += nd.weight * std::pow(std::abs(nd.value), p);
  return std::pow(s, 1.0 / p);
}

double AnnulusSource::integrate(const std::function<double(Vec2, double)>& g) const {
  double s = 0.0;
  for (const auto& nd : nodes_) s += nd.weight * g(nd.y, nd.value);
  return s;
}

BogovskiiCorrector::BogovskiiCorrector(const AnnulusSource& src, BogovskiiOptions opt)
    : src_(&src), opt_(opt), delta_(src.delta()) {
  const int S = opt_.sectors;
  if (S < 3) throw std::invalid_argument("need at least three sectors");
  if (opt_.ray_panels < 1) throw std::invalid_argument("need at least one ray panel");
  const double spacing = 2.0 * pi / S;
  if (!(opt_.half_angle > 0.5 * spacing && opt_.half_angle < 0.5 * pi))
    throw std::invalid_argument("sector half-angle must exceed half the spacing and stay below pi/2");
  // star-shapedness of each sector with respect to its ball
  if (!(opt_.ball_radius * std::cos(opt_.half_angle) - opt_.ball_size > 1.0))
    throw std::invalid_argument("sector is not star-shaped with respect to its ball");

  gauss_legendre(opt_.ray_nodes, gl_x_, gl_w_);
  gauss_legendre(opt_.kernel_nodes, gk_x_, gk_w_);
  gauss_legendre(opt_.angular_nodes, ga_x_, ga_w_);

  // int_{unit disk} bump(|q|) dq and the chain-bump mass, by fine radial rules
  std::vector<double> fx, fw;
  gauss_legendre(200, fx, fw);
  double disk = 0.0;
  for (int k = 0; k < 200; ++k) disk += fw[k] * bump(fx[k]) * fx[k];
  omega_norm_ = 2.0 * pi * disk * ball_radius() * ball_radius();

  const double overlap_half = opt_.half_angle - 0.5 * spacing;
  const double ang_w = 0.8 * overlap_half;
  double radial = 0.0, angular = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double q = 2.0 * fx[k] - 1.0;
    const double r = delta_ * (1.5 + 0.4 * q);
    radial += 2.0 * fw[k] * bump(q) * r * 0.4 * delta_;
    angular += 2.0 * fw[k] * bump(q) * ang_w;
  }
  chain_norm_ = radial * angular;

  cumulative_.assign(S, 0.0);
  double acc = 0.0;
  for (int i = 0; i < S; ++i) {
    acc += src.integrate([&](Vec2 y, double v) { return chi(i, std::atan2(y.x2, y.x1)) * v; });
    cumulative_[i] = acc;
  }
  piece_mass_.assign(S, 0.0);
  for (int i = 0; i < S; ++i)
    piece_mass_[i] = src.integrate([&](Vec2 y, double) { return piece(i, y); });
}

double BogovskiiCorrector::chi(int i, double theta) const {
  const double spacing = 2.0 * pi / opt_.sectors;
  const double own = bump(wrap_angle(theta - i * spacing) / opt_.half_angle);
  if (own == 0.0) return 0.0;
  double total = 0.0;
  for (int j = 0; j < opt_.sectors; ++j) total += bump(wrap_angle(theta - j * spacing) / opt_.half_angle);
  return own / total;
}

double BogovskiiCorrector::chain_bump(int i, Vec2 y) const {
  const double spacing = 2.0 * pi / opt_.sectors;
  const double ang_w = 0.8 * (opt_.half_angle - 0.5 * spacing);
  const double r = norm(y);
  const double qr = (r - 1.5 * delta_) / (0.4 * delta_);
  const double qa = wrap_angle(std::atan2(y.x2, y.x1) - (i + 0.5) * spacing) / ang_w;
  return bump(qr) * bump(qa) / chain_norm_;
}

double BogovskiiCorrector::piece(int i, Vec2 y) const {
  const double r = norm(y);
  if (!(r > delta_ && r < 2.0 * delta_)) return 0.0;
  const int S = opt_.sectors;
  double v = chi(i, std::atan2(y.x2, y.x1)) * (*src_)(y);
  if (i < S - 1) v -= cumulative_[i] * chain_bump(i, y);
  if (i > 0) v += cumulative_[i - 1] * chain_bump(i - 1, y);
  return v;
}

Vec2 BogovskiiCorrector::ball_center(int i) const {
  const double th = i * 2.0 * pi / opt_.sectors;
  return {opt_.ball_radius * delta_ * std::cos(th), opt_.ball_radius * delta_ * std::sin(th)};
}

double BogovskiiCorrector::omega(int i, Vec2 y) const {
  return bump(norm(y - ball_center(i)) / ball_radius()) / omega_norm_;
}

Vec2 BogovskiiCorrector::piece_corrector(int i, Vec2 x) const {
  const Vec2 b = ball_center(i);
  const Vec2 d = b - x;
  const double D = norm(d);
  const double rb = ball_radius();

  // Directions e from x whose forward ray meets the ball.
  double th0, th1;
  bool full = D <= rb;
  if (full) {
    th0 = -pi;
    th1 = pi;
  } else {
    const double c = std::atan2(d.x2, d.x1), a = std::asin(rb / D);
    th0 = c - a;
    th1 = c + a;
  }

  const double axis = i * 2.0 * pi / opt_.sectors;
  const Vec2 wedge_normals[2] = {
      {std::cos(axis + opt_.half_angle - 0.5 * pi), std::sin(axis + opt_.half_angle - 0.5 * pi)},
      {std::cos(axis - opt_.half_angle + 0.5 * pi), std::sin(axis - opt_.half_angle + 0.5 * pi)}};

  auto ray_integrals = [&](Vec2 e, double& F0, double& F1) {
    F0 = F1 = 0.0;
    // y = x - s e inside the annulus: [s_a, s_b] minus [s_c, s_d]
    const double g = -dot(x, e);
    const double xx = dot(x, x);
    auto chord = [&](double R, double& lo, double& hi) {
      const double disc = g * g - xx + R * R;
      if (disc <= 0.0) return false;
      const double sq = std::sqrt(disc);
      lo = -g - sq;
      hi = -g + sq;
      return true;
    };
    double sa, sb;
    if (!chord(2.0 * delta_, sa, sb)) return;
    sa = std::max(sa, 0.0);
    if (sb <= sa) return;
    double pieces[2][2];
    int np = 0;
    double sc, sd;
    if (chord(delta_, sc, sd) && sd > sa && sc < sb) {
      if (sc > sa) pieces[np][0] = sa, pieces[np][1] = sc, ++np;
      if (sd < sb) pieces[np][0] = std::max(sd, sa), pieces[np][1] = sb, ++np;
    } else {
      pieces[np][0] = sa, pieces[np][1] = sb, ++np;
    }
    // clip to the sector wedge, the support of the piece
    double w_lo = 0.0, w_hi = sb;
    for (const Vec2& nrm : wedge_normals) {
      const double ne = dot(nrm, e), nx = dot(nrm, x);
      if (std::abs(ne) < 1e-300) {
        if (nx < 0.0) return;
      } else if (ne > 0.0) {
        w_hi = std::min(w_hi, nx / ne);
      } else {
        w_lo = std::max(w_lo, nx / ne);
      }
    }
    const int panels = opt_.ray_panels;
    for (int k = 0; k < np; ++k) {
      const double a = std::max(pieces[k][0], w_lo), b = std::min(pieces[k][1], w_hi);
      if (b <= a) continue;
      const double len = (b - a) / panels;
      for (int pnl = 0; pnl < panels; ++pnl) {
        const double lo = a + pnl * len;
        for (std::size_t q = 0; q < gl_x_.size(); ++q) {
          const double s = lo + len * gl_x_[q];
          const double fv = piece(i, x - e * s) * gl_w_[q] * len;
          F0 += fv;
          F1 += fv * s;
        }
      }
    }
  };

  Vec2 acc{};
  auto direction = [&](double th, double wt) {
    const Vec2 e{std::cos(th), std::sin(th)};
    const double ed = dot(e, d);
    const double disc = ed * ed - D * D + rb * rb;
    if (disc <= 0.0) return;
    const double sq = std::sqrt(disc);
    const double t_lo = std::max(0.0, ed - sq), t_hi = ed + sq;
    if (t_hi <= t_lo) return;
    double O0 = 0.0, O1 = 0.0;
    const double len = t_hi - t_lo;
    for (std::size_t q = 0; q < gk_x_.size(); ++q) {
      const double tau = t_lo + len * gk_x_[q];
      const double ov = omega(i, x + e * tau) * gk_w_[q] * len;
      O0 += ov;
      O1 += ov * tau;
    }
    if (O0 == 0.0) return;
    double F0, F1;
    ray_integrals(e, F0, F1);
    acc += e * (wt * (F0 * O1 + F1 * O0));
  };

  if (full) {
    const int m = 2 * opt_.angular_nodes;
    for (int k = 0; k < m; ++k) direction(-pi + 2.0 * pi * k / m, 2.0 * pi / m);
  } else {
    for (std::size_t k = 0; k < ga_x_.size(); ++k)
      direction(th0 + (th1 - th0) * ga_x_[k], (th1 - th0) * ga_w_[k]);
  }
  return acc;
}

Vec2 BogovskiiCorrector::operator()(Vec2 y) const {
  const double r = norm(y);
  if (!(r > delta_ && r < 2.0 * delta_)) return {};
  const double spacing = 2.0 * pi / opt_.sectors;
  const double th = std::atan2(y.x2, y.x1);
  Vec2 w{};
  for (int i = 0; i < opt_.sectors; ++i) {
    if (std::abs(wrap_angle(th - i * spacing)) >= opt_.half_angle) continue;
    w += piece_corrector(i, y);
  }
  return w;
}

BogovskiiCorrector bogovskii_solve(const AnnulusSource& src, BogovskiiOptions opt, double tolerance) {
  if (src.compatibility_residual() > tolerance)
    throw std::runtime_error("Bogovskii source violates the zero-mean compatibility condition");
  return BogovskiiCorrector(src, opt);
}

BogovskiiAudit audit_bogovskii(const BogovskiiCorrector& w, const AnnulusSource& src, double p, int samples,
                               int boundary_points) {
  const double delta = w.delta();
  const double step = 4.0 * delta / samples;
  const double eta = 1e-3 * delta;
  struct Sample {
    Vec2 x;
    double div = 0.0, f = 0.0, wn = 0.0, gn = 0.0;
  };
  std::vector<Sample> pts;
  for (int b = 0; b < samples; ++b)
    for (int a = 0; a < samples; ++a) {
      const Vec2 x{-2.0 * delta + (a + 0.5) * step, -2.0 * delta + (b + 0.5) * step};
      const double r = norm(x);
      if (r > delta && r < 2.0 * delta) pts.push_back({x});
    }
  const auto n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    Sample& s = pts[k];
    const Vec2 c = w(s.x);
    const Vec2 xp = w(s.x + Vec2{eta, 0}), xm = w(s.x - Vec2{eta, 0});
    const Vec2 yp = w(s.x + Vec2{0, eta}), ym = w(s.x - Vec2{0, eta});
    const double a11 = (xp.x1 - xm.x1) / (2 * eta), a21 = (xp.x2 - xm.x2) / (2 * eta);
    const double a12 = (yp.x1 - ym.x1) / (2 * eta), a22 = (yp.x2 - ym.x2) / (2 * eta);
    s.div = a11 + a22;
    s.f = src(s.x);
    s.wn = norm(c);
    s.gn = std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
  }
  double e2 = 0.0, f2 = 0.0, wp = 0.0, gp = 0.0, fp = 0.0;
  for (const auto& s : pts) {
    e2 += (s.div - s.f) * (s.div - s.f);
    f2 += s.f * s.f;
    wp += std::pow(s.wn, p);
    gp += std::pow(s.gn, p);
    fp += std::pow(std::abs(s.f), p);
  }
  const double area = step * step;
  BogovskiiAudit out;
  out.residual_rel_l2 = f2 > 0.0 ? std::sqrt(e2 / f2) : std::sqrt(e2 * area);
  for (int k = 0; k < boundary_points; ++k) {
    const double th = 2.0 * pi * (k + 0.5) / boundary_points;
    const Vec2 e{std::cos(th), std::sin(th)};
    // evaluate just inside each boundary circle
    out.boundary_max = std::max(out.boundary_max, norm(w(e * (delta * (1.0 + 1e-9)))));
    out.boundary_max = std::max(out.boundary_max, norm(w(e * (2.0 * delta * (1.0 - 1e-9)))));
  }
  out.w_lp = std::pow(wp * area, 1.0 / p);
  out.grad_w_lp = std::pow(gp * area, 1.0 / p);
  out.w_w1p = std::pow((wp + gp) * area, 1.0 / p);
  out.f_lp = std::pow(fp * area, 1.0 / p);
  out.stability = out.f_lp > 0.0 ? out.w_w1p / out.f_lp : 0.0;
  return out;
}

}  // namespace mixlab
