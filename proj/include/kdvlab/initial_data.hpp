#pragma once
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kdvlab/field.hpp"
#include "kdvlab/grid.hpp"
#include "kdvlab/rng.hpp"

namespace kdvlab {

/** Recipe for mean-zero random data of prescribed Sobolev regularity:
 * u_hat(k) = |k|^{-(s0 + 1/2 + margin)} e^{i theta_k} for k >= 1 with
 * i.i.d. uniform phases, conjugate-extended, rescaled to normalize_to in L2.
 * The exponent puts the sample in H^{s0} but outside H^{s0 + 2*margin}.
 */
struct RoughDataSpec {
  double s0 = 1.0;
  double margin = 0.01;
  uint64_t seed = 0;
  GridSpec grid;
  double normalize_to = 1.0;
};

inline SpectralField rough_sample(const RoughDataSpec& spec) {
  validate_grid(spec.grid);
  if (spec.s0 < 0.0) throw std::invalid_argument("rough_sample: s0 must be >= 0");
  if (!(spec.margin > 0.0)) throw std::invalid_argument("rough_sample: margin must be > 0");
  if (!(spec.normalize_to > 0.0))
    throw std::invalid_argument("rough_sample: normalize_to must be > 0");
  SpectralField f(spec.grid);
  Xoshiro256StarStar rng(spec.seed);
  double expo = -(spec.s0 + 0.5 + spec.margin);
  // One draw per mode in increasing k, so the stream layout is part of the
  // reproducibility contract.
  for (int k = 1; k <= max_mode(spec.grid); ++k) {
    double theta = 2.0 * std::numbers::pi * rng.uniform01();
    double r = std::pow(static_cast<double>(k), expo);
    cplx c(r * std::cos(theta), r * std::sin(theta));
    f.set(k, c);
    f.set(-k, std::conj(c));
  }
  double norm = l2_norm(f);
  double factor = spec.normalize_to / norm;
  for (auto& c : f.coeff) c *= factor;
  return f;
}

enum class ProfileName { Cosine, TwoMode };

// cos x, or cos x + (1/2) sin 2x; both mean-zero, built directly in
// coefficients (no sampling round trip).
inline SpectralField smooth_profile(ProfileName name, const GridSpec& grid) {
  validate_grid(grid);
  SpectralField f(grid);
  f.set(1, cplx(0.5, 0.0));
  f.set(-1, cplx(0.5, 0.0));
  if (name == ProfileName::TwoMode) {
    f.set(2, cplx(0.0, -0.25));
    f.set(-2, cplx(0.0, 0.25));
  }
  return f;
}

/** H^s norms over a grid of s values.  On a truncated grid every norm is
 * finite, so non-membership above s0 shows up as growth under grid
 * refinement, not divergence; callers reporting these values should carry
 * that caveat (the CLI sidecar does).
 */
inline std::vector<std::pair<double, double>> empirical_regularity(
    const SpectralField& f, const std::vector<double>& s_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.emplace_back(s, sobolev_norm(f, s));
  return out;
}

}  // namespace kdvlab
