#pragma once
#include <vector>

#include "kdvlab/fft.hpp"
#include "kdvlab/field.hpp"

namespace kdvlab {

/** Pointwise product f*g, dealiased by zero padding to 2*n_modes (more than
 * the 3/2 rule requires).  The returned coefficients on |k| < n_modes/2 are
 * exact: two fields of bandwidth n/2 - 1 produce content up to n - 2, and
 * the padded transform resolves up to n - 1 without wrap-around.
 */
inline SpectralField product_dealiased(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "product_dealiased");
  int n = f.n();
  int np = 2 * n;
  std::vector<cplx> fp(static_cast<size_t>(np), cplx(0.0, 0.0));
  std::vector<cplx> gp(static_cast<size_t>(np), cplx(0.0, 0.0));
  for (int bin = 0; bin < n; ++bin) {
    int k = wavenumber(bin, n);
    fp[static_cast<size_t>(bin_of(k, np))] = f.coeff[static_cast<size_t>(bin)];
    gp[static_cast<size_t>(bin_of(k, np))] = g.coeff[static_cast<size_t>(bin)];
  }
  std::vector<cplx> fphys(static_cast<size_t>(np)), gphys(static_cast<size_t>(np));
  detail::dft(np, +1, fp.data(), fphys.data());
  detail::dft(np, +1, gp.data(), gphys.data());
  for (int j = 0; j < np; ++j) fphys[static_cast<size_t>(j)] *= gphys[static_cast<size_t>(j)];
  detail::dft(np, -1, fphys.data(), fp.data());
  SpectralField out(f.grid);
  double inv = 1.0 / static_cast<double>(np);
  for (int k = -(n / 2 - 1); k <= n / 2 - 1; ++k)
    out.set(k, fp[static_cast<size_t>(bin_of(k, np))] * inv);
  return out;
}

}  // namespace kdvlab
