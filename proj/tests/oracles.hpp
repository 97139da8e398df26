#pragma once
// Slow independent oracles for the test suite.  Everything here is written
// the naive O(N^2) way, straight from definitions, so a disagreement
// implicates the fast paths under test and not the oracle.
#include <cmath>
#include <complex>
#include <vector>

#include "kdvlab/field.hpp"

namespace oracle {

using kdvlab::cplx;
using kdvlab::GridSpec;
using kdvlab::SpectralField;

// Direct evaluation u(x_i) = sum_k u(k) e^{i k x_i} on an arbitrary grid size.
inline std::vector<double> slow_synthesis(const SpectralField& f, int n_points) {
  std::vector<double> out(static_cast<size_t>(n_points), 0.0);
  int n = f.grid.n_modes;
  for (int i = 0; i < n_points; ++i) {
    double x = 2.0 * M_PI * i / n_points;
    cplx acc(0.0, 0.0);
    for (long long k = -n / 2 + 1; k <= n / 2 - 1; ++k)
      acc += f.at(k) * std::polar(1.0, static_cast<double>(k) * x);
    out[static_cast<size_t>(i)] = acc.real();
  }
  return out;
}

// Direct forward transform u(k) = (1/N) sum_i u(x_i) e^{-i k x_i}.
inline SpectralField slow_analysis(const GridSpec& grid, const std::vector<double>& samples) {
  SpectralField f(grid);
  int n = grid.n_modes;
  for (long long k = -n / 2 + 1; k <= n / 2 - 1; ++k) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      double x = 2.0 * M_PI * i / n;
      acc += samples[static_cast<size_t>(i)] * std::polar(1.0, -static_cast<double>(k) * x);
    }
    f.set(k, acc / static_cast<double>(n));
  }
  return f;
}

// Coefficient-space convolution (uv)(k) = sum_{k1+k2=k} u(k1) v(k2), with both
// factors read over the full retained band and the result truncated to it.
inline SpectralField brute_convolution(const SpectralField& u, const SpectralField& v) {
  SpectralField out(u.grid);
  int h = u.grid.n_modes / 2 - 1;
  for (long long k = -h; k <= h; ++k) {
    cplx acc(0.0, 0.0);
    for (long long k1 = -h; k1 <= h; ++k1) {
      long long k2 = k - k1;
      if (k2 < -h || k2 > h) continue;
      acc += u.at(k1) * v.at(k2);
    }
    out.set(k, acc);
  }
  return out;
}

// L2 norm by trapezoid quadrature of |u|^2 on a 4x-refined grid (exact for
// band-limited integrands up to rounding).
inline double trapezoid_l2(const SpectralField& f) {
  int np = 4 * f.grid.n_modes;
  std::vector<double> phys = slow_synthesis(f, np);
  double acc = 0.0;
  for (double v : phys) acc += v * v;
  return std::sqrt(acc * 2.0 * M_PI / np);
}

// H^s norm straight from the definition, no shared helper.
inline double direct_sobolev(const SpectralField& f, double s) {
  int n = f.grid.n_modes;
  double acc = 0.0;
  for (long long k = -n / 2 + 1; k <= n / 2 - 1; ++k)
    acc += std::pow(1.0 + static_cast<double>(k) * static_cast<double>(k), s) * std::norm(f.at(k));
  return std::sqrt(2.0 * M_PI * acc);
}

// Composite Simpson on [a, b] with n (even) panels.
template <typename F>
double simpson(F fn, double a, double b, int n) {
  double h = (b - a) / n;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < n; ++i) acc += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Free-flow phase of e^{-t dx^3} at mode k: the symbol of dx^3 is -i k^3, so
// the semigroup multiplies mode k by e^{+i t k^3}.
inline cplx free_flow_phase(double t, long long k) {
  return std::polar(1.0, t * static_cast<double>(k) * static_cast<double>(k) *
                             static_cast<double>(k));
}

// Space-time transform by the direct double sum, no FFT.
inline cplx slow_st_fourier(const std::vector<SpectralField>& samples, double tau, int j,
                            long long k) {
  int M = static_cast<int>(samples.size());
  double sigma = -M_PI / tau + 2.0 * M_PI * j / (M * tau);
  cplx acc(0.0, 0.0);
  for (int m = 0; m < M; ++m)
    acc += samples[static_cast<size_t>(m)].at(k) * std::polar(1.0, m * tau * sigma);
  return tau * acc;
}

}  // namespace oracle
