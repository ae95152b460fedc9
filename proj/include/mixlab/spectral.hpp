#pragma once

/// @file spectral.hpp
/// @brief Discrete Fourier transforms of grid fields and Sobolev norms.

#include <complex>
#include <vector>

#include "mixlab/torus.hpp"

namespace mixlab {

/// Fourier coefficients of the trigonometric interpolant of a ScalarField,
/// f(x) = sum_k c_k exp(2 pi i k.x), k in {-n/2, ..., n/2-1}^2.
/// The zero mode equals the field mean.
class SpectralField {
 public:
  SpectralField(Grid grid, std::vector<std::complex<double>> coeffs);

  const Grid& grid() const { return grid_; }
  /// Coefficient for wavevector (k1, k2), each in [-n/2, n/2).
  std::complex<double> coefficient(int k1, int k2) const;
  /// Wavenumber of storage slot q in [0, n).
  int wavenumber(int q) const { return q < grid_.n() / 2 ? q : q - grid_.n(); }
  /// Storage is [slot2][slot1], row-major.
  const std::vector<std::complex<double>>& raw() const { return coeffs_; }

 private:
  Grid grid_;
  std::vector<std::complex<double>> coeffs_;
};

SpectralField spectral_transform(const ScalarField& f);
ScalarField inverse_transform(const SpectralField& s);

/// ||f - mean(f)||_{H^s} = (sum_{k != 0} |c_k|^2 (2 pi |k|)^{2s})^{1/2}.
/// Throws for s outside [-2, 2].
double sobolev_norm(const ScalarField& f, double s);

/// Circular convolution sum_m a[m] b[k - m] on the grid lattice (no 1/N factor).
ScalarField circular_convolve(const ScalarField& a, const ScalarField& b);

}  // namespace mixlab
