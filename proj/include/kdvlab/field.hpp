#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kdvlab/fft.hpp"
#include "kdvlab/grid.hpp"

namespace kdvlab {

using cplx = std::complex<double>;

/** Real periodic field stored by its Fourier coefficients.
 *
 * Convention: u_hat(k) = (1/2pi) int_T u(x) e^{-ikx} dx, so
 * u(x) = sum_k u_hat(k) e^{ikx} and ||u||_{L2}^2 = 2pi sum_k |u_hat(k)|^2.
 * coeff is in DFT bin order (see GridSpec).  Valid fields are conjugate
 * symmetric, mean-zero where stated by the caller, and keep the unpaired
 * bin k = -n_modes/2 at exactly zero.
 */
struct SpectralField {
  GridSpec grid;
  std::vector<cplx> coeff;

  SpectralField() = default;
  explicit SpectralField(GridSpec g) : grid(g), coeff(g.n_modes, cplx(0.0, 0.0)) {
    validate_grid(g);
  }

  cplx at(int k) const { return coeff[static_cast<size_t>(bin_of(k, grid.n_modes))]; }
  void set(int k, cplx v) { coeff[static_cast<size_t>(bin_of(k, grid.n_modes))] = v; }
  int n() const { return grid.n_modes; }
};

inline void require_same_grid(const SpectralField& f, const SpectralField& g,
                              const char* who) {
  if (!(f.grid == g.grid)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

// Samples of u at x_j = 2pi j / n_modes.
inline std::vector<double> to_physical(const SpectralField& f) {
  int n = f.n();
  std::vector<cplx> work(static_cast<size_t>(n));
  detail::dft(n, +1, f.coeff.data(), work.data());
  std::vector<double> samples(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) samples[static_cast<size_t>(j)] = work[static_cast<size_t>(j)].real();
  return samples;
}

/** Coefficients of sampled data under the 1/(2pi) convention.  The zero mode
 * is retained as computed (mean-zero enforcement is the caller's decision);
 * the unpaired bin -n/2 is zeroed so the result is a valid field.
 */
inline SpectralField to_spectral(const GridSpec& grid, const std::vector<double>& samples) {
  validate_grid(grid);
  int n = grid.n_modes;
  if (samples.size() != static_cast<size_t>(n))
    throw std::invalid_argument("to_spectral: sample count does not match grid");
  std::vector<cplx> work(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) work[static_cast<size_t>(j)] = cplx(samples[static_cast<size_t>(j)], 0.0);
  SpectralField f(grid);
  detail::dft(n, -1, work.data(), f.coeff.data());
  double inv = 1.0 / static_cast<double>(n);
  for (auto& c : f.coeff) c *= inv;
  f.coeff[static_cast<size_t>(n / 2)] = cplx(0.0, 0.0);
  return f;
}

inline double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeff) s += std::norm(c);
  return std::sqrt(2.0 * std::numbers::pi * s);
}

// H^s norm (2pi sum <k>^{2s} |u_hat(k)|^2)^{1/2} with <k> = (1 + k^2)^{1/2}.
inline double sobolev_norm(const SpectralField& f, double s) {
  if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
  int n = f.n();
  double acc = 0.0;
  for (int bin = 0; bin < n; ++bin) {
    double k = static_cast<double>(wavenumber(bin, n));
    double w = (s == 0.0) ? 1.0 : std::pow(1.0 + k * k, s);
    acc += w * std::norm(f.coeff[static_cast<size_t>(bin)]);
  }
  return std::sqrt(2.0 * std::numbers::pi * acc);
}

inline double l2_distance(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "l2_distance");
  double s = 0.0;
  for (size_t i = 0; i < f.coeff.size(); ++i) s += std::norm(f.coeff[i] - g.coeff[i]);
  return std::sqrt(2.0 * std::numbers::pi * s);
}

inline SpectralField add(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "add");
  SpectralField out = f;
  for (size_t i = 0; i < out.coeff.size(); ++i) out.coeff[i] += g.coeff[i];
  return out;
}

inline SpectralField axpy(double a, const SpectralField& x, const SpectralField& y) {
  require_same_grid(x, y, "axpy");
  SpectralField out = y;
  for (size_t i = 0; i < out.coeff.size(); ++i) out.coeff[i] += a * x.coeff[i];
  return out;
}

inline SpectralField scale(double a, const SpectralField& f) {
  SpectralField out = f;
  for (auto& c : out.coeff) c *= a;
  return out;
}

// Max deviation from realness: |u_hat(-k) - conj(u_hat(k))| over pairs,
// plus the imaginary part of the zero mode and the unpaired Nyquist bin.
inline double conjugate_symmetry_defect(const SpectralField& f) {
  int n = f.n();
  double worst = std::abs(f.coeff[0].imag());
  worst = std::max(worst, std::abs(f.coeff[static_cast<size_t>(n / 2)]));
  for (int k = 1; k < n / 2; ++k) {
    cplx d = f.at(-k) - std::conj(f.at(k));
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

inline bool all_finite(const SpectralField& f) {
  for (const auto& c : f.coeff)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace kdvlab
