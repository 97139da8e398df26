#pragma once
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "kdvlab/field.hpp"
#include "kdvlab/grid.hpp"

namespace kdvlab {

/** Diagonal Fourier operator: (M u)_hat(k) = symbol(k) * u_hat(k).
 * symbol is stored per bin for a fixed grid.
 */
struct Multiplier {
  std::string name;
  GridSpec grid;
  std::vector<cplx> symbol;
};

inline SpectralField apply_multiplier(const Multiplier& m, const SpectralField& f) {
  if (!(m.grid == f.grid)) throw std::invalid_argument("apply_multiplier: grid mismatch");
  SpectralField out = f;
  for (size_t i = 0; i < out.coeff.size(); ++i) out.coeff[i] *= m.symbol[i];
  return out;
}

namespace detail {
template <typename Fn>
Multiplier make_multiplier(std::string name, const GridSpec& grid, Fn&& symbol_of_k) {
  validate_grid(grid);
  Multiplier m{std::move(name), grid, std::vector<cplx>(static_cast<size_t>(grid.n_modes))};
  for (int bin = 0; bin < grid.n_modes; ++bin)
    m.symbol[static_cast<size_t>(bin)] = symbol_of_k(wavenumber(bin, grid.n_modes));
  return m;
}
}  // namespace detail

inline Multiplier make_identity(const GridSpec& grid) {
  return detail::make_multiplier("identity", grid, [](int) { return cplx(1.0, 0.0); });
}

// d/dx: symbol ik.  The unpaired Nyquist bin gets 0 (standard for odd symbols).
inline Multiplier make_derivative(const GridSpec& grid) {
  int nyq = -grid.n_modes / 2;
  return detail::make_multiplier("dx", grid, [nyq](int k) {
    return k == nyq ? cplx(0.0, 0.0) : cplx(0.0, static_cast<double>(k));
  });
}

/** e^{t dx^3}: dx^3 has symbol (ik)^3 = -ik^3, so the per-mode factor is
 * e^{-i t k^3}.  The free KdV flow over a step tau is e^{-tau dx^3}, i.e.
 * exp_dx3 with t = -tau, giving the factor e^{+i tau k^3}.
 */
inline Multiplier make_exp_dx3(double t, const GridSpec& grid) {
  return detail::make_multiplier("exp(t*dx^3)", grid, [t](int k) {
    double kd = static_cast<double>(k);
    double phase = -t * kd * kd * kd;
    return cplx(std::cos(phase), std::sin(phase));
  });
}

inline Multiplier make_free_flow(double tau, const GridSpec& grid) {
  Multiplier m = make_exp_dx3(-tau, grid);
  m.name = "exp(-tau*dx^3)";
  return m;
}

// phi1(delta) = (e^delta - 1)/delta, Taylor 6 terms below |delta| = 1e-4
// to dodge the cancellation in e^delta - 1.
inline cplx phi1(cplx delta) {
  if (std::abs(delta) < 1e-4) {
    cplx acc(1.0, 0.0);
    double fact[] = {2.0, 6.0, 24.0, 120.0, 720.0};
    cplx p(1.0, 0.0);
    for (double f : fact) {
      p *= delta;
      acc += p / f;
    }
    return acc;
  }
  return (std::exp(delta) - cplx(1.0, 0.0)) / delta;
}

// phi1(tau dx^3): per-mode argument delta = -i tau k^3 (same sign convention
// as make_exp_dx3; the quadrature-oracle agreement test pins this down).
inline Multiplier make_phi1(double tau, const GridSpec& grid) {
  return detail::make_multiplier("phi1(tau*dx^3)", grid, [tau](int k) {
    double kd = static_cast<double>(k);
    return phi1(cplx(0.0, -tau * kd * kd * kd));
  });
}

// Sharp band filter keeping |k| <= cutoff.
inline Multiplier make_band_filter(int cutoff, const GridSpec& grid) {
  if (cutoff < 0) throw std::invalid_argument("make_band_filter: cutoff must be >= 0");
  return detail::make_multiplier("band_filter", grid, [cutoff](int k) {
    return std::abs(k) <= cutoff ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  });
}

// Step-size filter: indicator of |k| tau^{1/3} <= 1, boundary inclusive.
inline Multiplier make_pi_tau(double tau, const GridSpec& grid) {
  Multiplier m = make_band_filter(filter_cutoff(tau), grid);
  m.name = "pi_tau";
  return m;
}

/** Antiderivative on mean-zero fields: u_hat(k)/(ik) for k != 0, zero mode
 * mapped to zero.  A zero mode above 1e-12 signals a mean-zero violation
 * upstream and is an error, never silently projected away.
 */
inline SpectralField dx_inv(const SpectralField& f) {
  if (std::abs(f.coeff[0]) > 1e-12)
    throw std::invalid_argument("dx_inv: input zero mode exceeds 1e-12 (mean-zero violation)");
  SpectralField out = f;
  out.coeff[0] = cplx(0.0, 0.0);
  int n = f.n();
  for (int bin = 1; bin < n; ++bin) {
    int k = wavenumber(bin, n);
    if (k == -n / 2) {
      out.coeff[static_cast<size_t>(bin)] = cplx(0.0, 0.0);
      continue;
    }
    // 1/(ik) = -i/k
    out.coeff[static_cast<size_t>(bin)] *= cplx(0.0, -1.0 / static_cast<double>(k));
  }
  return out;
}

}  // namespace kdvlab
