#pragma once
#include <cmath>
#include <stdexcept>

namespace kdvlab {

/** Uniform periodic grid on [0, 2*pi).
 *
 * n_modes is both the number of physical sample points and the number of
 * retained Fourier modes, indexed k in {-n_modes/2, ..., n_modes/2 - 1}.
 * Coefficient storage follows DFT bin order: bin i holds wavenumber i for
 * i < n_modes/2 and i - n_modes otherwise.  The unpaired bin k = -n_modes/2
 * has no conjugate partner, so valid fields keep it pinned to zero; this
 * makes the representable set closed under odd-symbol multipliers (ik).
 */
struct GridSpec {
  int n_modes = 0;

  bool operator==(const GridSpec&) const = default;
};

inline void validate_grid(const GridSpec& g) {
  if (g.n_modes < 8 || g.n_modes % 2 != 0)
    throw std::invalid_argument("GridSpec: n_modes must be even and >= 8");
}

// Bin index -> signed wavenumber.
inline int wavenumber(int bin, int n_modes) {
  return bin < n_modes / 2 ? bin : bin - n_modes;
}

// Signed wavenumber -> bin index.
inline int bin_of(int k, int n_modes) {
  return k >= 0 ? k : k + n_modes;
}

// Largest wavenumber a valid field may populate.
inline int max_mode(const GridSpec& g) { return g.n_modes / 2 - 1; }

/** Cutoff K of the step-size filter: the largest integer with
 * |k| * tau^{1/3} <= 1 (boundary inclusive).  Evaluated as k^3 * tau <= 1:
 * k^3 is exact in double over any usable range, so the comparison carries a
 * single rounding, where cbrt(tau) would misclassify boundary modes
 * (e.g. tau = 1e-3 must keep exactly |k| <= 10).
 */
inline int filter_cutoff(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("filter_cutoff: tau must be > 0");
  auto keeps = [tau](int k) {
    double kd = static_cast<double>(k);
    return kd * kd * kd * tau <= 1.0;
  };
  int k = static_cast<int>(std::cbrt(1.0 / tau));
  while (keeps(k + 1)) ++k;
  while (k > 0 && !keeps(k)) --k;
  return k;
}

}  // namespace kdvlab
