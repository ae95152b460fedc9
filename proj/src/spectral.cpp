#include "mixlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mixlab {

namespace {

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer make_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) throw std::bad_alloc();
  return Buffer(p);
}

class Plan {
 public:
  Plan(int n, fftw_complex* in, fftw_complex* out, int sign) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(n, n, in, out, sign, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("fftw planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

// Raw unnormalized DFT of real samples, storage [j][i].
std::vector<std::complex<double>> raw_dft(const ScalarField& f, int sign) {
  const std::size_t N = f.grid().size();
  auto in = make_buffer(N);
  auto out = make_buffer(N);
  for (std::size_t k = 0; k < N; ++k) {
    in[k][0] = f[k];
    in[k][1] = 0.0;
  }
  Plan plan(f.grid().n(), in.get(), out.get(), sign);
  plan.execute();
  std::vector<std::complex<double>> r(N);
  for (std::size_t k = 0; k < N; ++k) r[k] = {out[k][0], out[k][1]};
  return r;
}

}  // namespace

SpectralField::SpectralField(Grid grid, std::vector<std::complex<double>> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw std::invalid_argument("spectral coefficient count does not match grid");
}

std::complex<double> SpectralField::coefficient(int k1, int k2) const {
  const int n = grid_.n();
  if (k1 < -n / 2 || k1 >= n / 2 || k2 < -n / 2 || k2 >= n / 2)
    throw std::out_of_range("wavevector outside the resolved band");
  const int q1 = (k1 + n) % n, q2 = (k2 + n) % n;
  return coeffs_[grid_.index(q1, q2)];
}

SpectralField spectral_transform(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  auto c = raw_dft(f, FFTW_FORWARD);
  const double inv_n = 1.0 / static_cast<double>(g.size());
  // Cell-centered samples sit at (q + 1/2) h; fold that half-cell phase into c_k.
  std::vector<std::complex<double>> phase(n);
  for (int q = 0; q < n; ++q) {
    const int k = q < n / 2 ? q : q - n;
    phase[q] = std::polar(1.0, -std::numbers::pi * k * g.h());
  }
  for (int q2 = 0; q2 < n; ++q2)
    for (int q1 = 0; q1 < n; ++q1) c[g.index(q1, q2)] *= phase[q1] * phase[q2] * inv_n;
  return SpectralField(g, std::move(c));
}

ScalarField inverse_transform(const SpectralField& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  const std::size_t N = g.size();
  auto in = make_buffer(N);
  auto out = make_buffer(N);
  std::vector<std::complex<double>> phase(n);
  for (int q = 0; q < n; ++q) phase[q] = std::polar(1.0, std::numbers::pi * s.wavenumber(q) * g.h());
  for (int q2 = 0; q2 < n; ++q2)
    for (int q1 = 0; q1 < n; ++q1) {
      const std::size_t k = g.index(q1, q2);
      const auto v = s.raw()[k] * phase[q1] * phase[q2];
      in[k][0] = v.real();
      in[k][1] = v.imag();
    }
  Plan plan(n, in.get(), out.get(), FFTW_BACKWARD);
  plan.execute();
  std::vector<double> r(N);
  for (std::size_t k = 0; k < N; ++k) r[k] = out[k][0];
  return ScalarField(g, std::move(r));
}

double sobolev_norm(const ScalarField& f, double s) {
  if (!(s >= -2.0 && s <= 2.0)) throw std::invalid_argument("sobolev exponent must lie in [-2, 2]");
  const SpectralField c = spectral_transform(f);
  const Grid& g = f.grid();
  const int n = g.n();
  const double two_pi = 2.0 * std::numbers::pi;
  double sum = 0.0;
  for (int q2 = 0; q2 < n; ++q2)
    for (int q1 = 0; q1 < n; ++q1) {
      if (q1 == 0 && q2 == 0) continue;
      const double k1 = c.wavenumber(q1), k2 = c.wavenumber(q2);
      const double kk = two_pi * two_pi * (k1 * k1 + k2 * k2);
      sum += std::norm(c.raw()[g.index(q1, q2)]) * std::pow(kk, s);
    }
  return std::sqrt(sum);
}

ScalarField circular_convolve(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
  const Grid& g = a.grid();
  const std::size_t N = g.size();
  auto fa = raw_dft(a, FFTW_FORWARD);
  auto fb = raw_dft(b, FFTW_FORWARD);
  auto in = make_buffer(N);
  auto out = make_buffer(N);
  for (std::size_t k = 0; k < N; ++k) {
    const auto v = fa[k] * fb[k];
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  Plan plan(g.n(), in.get(), out.get(), FFTW_BACKWARD);
  plan.execute();
  std::vector<double> r(N);
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t k = 0; k < N; ++k) r[k] = out[k][0] * inv;
  return ScalarField(g, std::move(r));
}

}  // namespace mixlab
