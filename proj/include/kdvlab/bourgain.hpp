#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/fft.hpp"
#include "kdvlab/field.hpp"
#include "kdvlab/initial_data.hpp"
#include "kdvlab/multiplier.hpp"
#include "kdvlab/pool.hpp"
#include "kdvlab/product.hpp"

namespace kdvlab {

// d_tau(sigma) = (e^{i tau sigma} - 1)/tau, the 2pi/tau-periodic discrete
// frequency symbol.  The phase is reduced mod 2pi before exponentiating so
// sigma + k^3 arguments with huge k^3 stay accurate.
inline cplx d_tau(double tau, double sigma) {
  double theta = std::fmod(tau * sigma, 2.0 * M_PI);
  return cplx((std::cos(theta) - 1.0) / tau, std::sin(theta) / tau);
}

struct SpaceTimeField {
  double tau = 0.0;
  GridSpec grid;
  std::vector<SpectralField> samples;

  int m_count() const { return static_cast<int>(samples.size()); }
};

inline void validate_space_time(const SpaceTimeField& u) {
  if (!(u.tau > 0.0)) throw std::invalid_argument("space-time field: tau must be > 0");
  if (u.samples.size() < 8) throw std::invalid_argument("space-time field: need M >= 8 samples");
  for (const SpectralField& f : u.samples)
    if (!(f.grid == u.grid)) throw std::invalid_argument("space-time field: grid mismatch");
}

// Raised-cosine window on [0,1]: ramps over the outer quarters, identically 1
// on the middle half.  Samples are taken at (m + 1/2)/M.
inline double window_weight(double theta) {
  if (theta <= 0.0 || theta >= 1.0) return 0.0;
  if (theta < 0.25) return 0.5 * (1.0 - std::cos(4.0 * M_PI * theta));
  if (theta > 0.75) return 0.5 * (1.0 - std::cos(4.0 * M_PI * (1.0 - theta)));
  return 1.0;
}

inline SpaceTimeField apply_window(const SpaceTimeField& u) {
  validate_space_time(u);
  SpaceTimeField out = u;
  int M = u.m_count();
  for (int m = 0; m < M; ++m) {
    double w = window_weight((m + 0.5) / M);
    out.samples[static_cast<size_t>(m)] = scale(w, u.samples[static_cast<size_t>(m)]);
  }
  return out;
}

// Fourier transform in both variables: rows indexed by the sigma grid
// sigma_j = -pi/tau + 2pi j/(M tau), columns by wavenumber bin.
struct StFourier {
  double tau = 0.0;
  GridSpec grid;
  int M = 0;
  std::vector<cplx> coeff;  // index j * n_modes + bin

  cplx at(int j, int k) const {
    return coeff[static_cast<size_t>(j) * static_cast<size_t>(grid.n_modes) +
                 static_cast<size_t>(bin_of(k, grid.n_modes))];
  }
  double tau_sigma(int j) const { return -M_PI + 2.0 * M_PI * j / M; }
  double sigma(int j) const { return tau_sigma(j) / tau; }
  double dsigma() const { return 2.0 * M_PI / (M * tau); }
};

/** u~(sigma_j, k) = tau sum_m u^m(k) e^{i m tau sigma_j}.  On the canonical
 * sigma grid the phase factors are (-1)^m times an M-point DFT kernel, so
 * each wavenumber column is one sign-flipped backward DFT in the time index.
 */
inline StFourier st_fourier(const SpaceTimeField& u) {
  validate_space_time(u);
  int M = u.m_count();
  int n = u.grid.n_modes;
  StFourier out;
  out.tau = u.tau;
  out.grid = u.grid;
  out.M = M;
  out.coeff.resize(static_cast<size_t>(M) * static_cast<size_t>(n));
  std::vector<cplx> tmp(static_cast<size_t>(M)), col(static_cast<size_t>(M));
  for (int b = 0; b < n; ++b) {
    for (int m = 0; m < M; ++m) {
      cplx c = u.samples[static_cast<size_t>(m)].coeff[static_cast<size_t>(b)];
      tmp[static_cast<size_t>(m)] = (m & 1) ? -c : c;
    }
    detail::dft(M, +1, tmp.data(), col.data());
    for (int j = 0; j < M; ++j)
      out.coeff[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(b)] =
          u.tau * col[static_cast<size_t>(j)];
  }
  return out;
}

namespace detail {

// <d_tau(sigma_j + k^3)>^2 = 1 + |d|^2 with the phase reduced mod 2pi.
// tau*sigma_j is formed directly from the grid index to avoid roundtrip error.
inline double d_bracket_sq(double tau, double tau_sigma, long long k) {
  double phase = std::fmod(tau_sigma + tau * static_cast<double>(k) * static_cast<double>(k) *
                                            static_cast<double>(k),
                           2.0 * M_PI);
  double s = 2.0 * std::sin(0.5 * phase) / tau;
  return 1.0 + s * s;
}

}  // namespace detail

/** Discrete Bourgain norm: the sigma-grid quadrature of
 * <k>^{2s} <d_tau(sigma + k^3)>^{2b} |u~|^2 with weight dsigma = 2pi/(M tau).
 * This normalization makes xsb_norm(u, 0, 0) equal ||u^n||_{l2_tau L2}
 * exactly (Parseval), with L2 carrying the same 2pi as l2_norm.
 */
inline double xsb_norm(const StFourier& F, double s, double b) {
  int n = F.grid.n_modes;
  double acc = 0.0;
  for (int j = 0; j < F.M; ++j) {
    double ts = F.tau_sigma(j);
    for (int bin = 0; bin < n; ++bin) {
      cplx c = F.coeff[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(bin)];
      double mag2 = std::norm(c);
      if (mag2 == 0.0) continue;
      long long k = wavenumber(bin, n);
      double w = std::pow(1.0 + static_cast<double>(k) * static_cast<double>(k), s);
      if (b != 0.0) w *= std::pow(detail::d_bracket_sq(F.tau, ts, k), b);
      acc += w * mag2;
    }
  }
  return std::sqrt(acc * F.dsigma());
}

inline double xsb_norm(const SpaceTimeField& u, double s, double b) {
  return xsb_norm(st_fourier(u), s, b);
}

inline void require_mean_zero(const SpaceTimeField& u) {
  for (const SpectralField& f : u.samples)
    if (std::abs(f.coeff[0]) > 1e-12)
      throw std::invalid_argument("space-time norm requires mean-zero samples");
}

namespace detail {

// l2(k) of the L1(sigma) column sums, with an optional <d>^{-1} inner weight.
inline double l2k_l1sigma(const StFourier& F, double s, bool d_inverse_weight) {
  int n = F.grid.n_modes;
  double acc = 0.0;
  for (int bin = 0; bin < n; ++bin) {
    long long k = wavenumber(bin, n);
    double col = 0.0;
    for (int j = 0; j < F.M; ++j) {
      double mag =
          std::abs(F.coeff[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(bin)]);
      if (mag == 0.0) continue;
      if (d_inverse_weight) mag /= std::sqrt(d_bracket_sq(F.tau, F.tau_sigma(j), k));
      col += mag;
    }
    col *= F.dsigma();
    acc += std::pow(1.0 + static_cast<double>(k) * static_cast<double>(k), s) * col * col;
  }
  return std::sqrt(acc);
}

}  // namespace detail

inline double xs_norm(const SpaceTimeField& u, double s) {
  require_mean_zero(u);
  StFourier F = st_fourier(u);
  return xsb_norm(F, s, 0.5) + detail::l2k_l1sigma(F, s, false);
}

inline double ys_norm(const SpaceTimeField& u, double s) {
  require_mean_zero(u);
  StFourier F = st_fourier(u);
  return xsb_norm(F, s, -0.5) + detail::l2k_l1sigma(F, s, true);
}

namespace detail {

// Physical samples on a refined grid (zero-padded spectrum), for quadrature
// of powers of band-limited fields.
inline std::vector<double> physical_refined(const SpectralField& f, int factor) {
  int n = f.grid.n_modes;
  int np = factor * n;
  std::vector<cplx> padded(static_cast<size_t>(np), cplx(0.0, 0.0));
  for (long long k = -(n / 2 - 1); k <= n / 2 - 1; ++k)
    padded[static_cast<size_t>(bin_of(k, np))] = f.at(k);
  std::vector<cplx> phys(static_cast<size_t>(np));
  dft(np, +1, padded.data(), phys.data());
  std::vector<double> out(static_cast<size_t>(np));
  for (int i = 0; i < np; ++i) out[static_cast<size_t>(i)] = phys[static_cast<size_t>(i)].real();
  return out;
}

}  // namespace detail

/** ||Pi_tau u^n||_{l4_tau L4} / ||u||_{X^{0,1/3}}.  The L4 integral is a
 * trapezoid sum on a 2x-refined spatial grid (exact for quartics of fields
 * band-limited to half the refined Nyquist range).
 */
inline double strichartz_ratio(const SpaceTimeField& u) {
  validate_space_time(u);
  double denom = xsb_norm(u, 0.0, 1.0 / 3.0);
  if (denom == 0.0) throw std::runtime_error("strichartz_ratio: zero denominator");
  Multiplier pi = make_pi_tau(u.tau, u.grid);
  int np = 2 * u.grid.n_modes;
  double dx = 2.0 * M_PI / np;
  double acc = 0.0;
  for (const SpectralField& f : u.samples) {
    std::vector<double> phys = detail::physical_refined(apply_multiplier(pi, f), 2);
    double q = 0.0;
    for (double x : phys) q += x * x * x * x;
    acc += q * dx;
  }
  return std::pow(u.tau * acc, 0.25) / denom;
}

/** ||dx Pi_tau(Pi_tau u^n Pi_tau v^n)||_{Y^s} over the symmetrized product of
 * X^{s,1/2} and X^{s,1/3} norms, the shape of the discrete bilinear estimate.
 */
inline double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v, double s) {
  validate_space_time(u);
  validate_space_time(v);
  if (u.m_count() != v.m_count() || !(u.grid == v.grid) || u.tau != v.tau)
    throw std::invalid_argument("bilinear_ratio: fields must share tau, grid and sample count");
  require_mean_zero(u);
  require_mean_zero(v);
  double denom = xsb_norm(u, s, 0.5) * xsb_norm(v, s, 1.0 / 3.0) +
                 xsb_norm(v, s, 0.5) * xsb_norm(u, s, 1.0 / 3.0);
  if (denom == 0.0) throw std::runtime_error("bilinear_ratio: zero denominator");

  Multiplier pi = make_pi_tau(u.tau, u.grid);
  Multiplier deriv = make_derivative(u.grid);
  SpaceTimeField w;
  w.tau = u.tau;
  w.grid = u.grid;
  w.samples.reserve(u.samples.size());
  for (size_t m = 0; m < u.samples.size(); ++m) {
    SpectralField prod = product_dealiased(apply_multiplier(pi, u.samples[m]),
                                           apply_multiplier(pi, v.samples[m]));
    w.samples.push_back(apply_multiplier(pi, apply_multiplier(deriv, prod)));
  }
  return ys_norm(w, s) / denom;
}

// ---- probe ensembles -------------------------------------------------------

struct ProbeConfig {
  std::vector<double> taus;  // strictly decreasing ladder
  GridSpec grid{128};
  int n_fields = 100;
  int n_pairs = 50;
  double s0 = 0.5;
  double margin = 0.25;
  double window_T = 1.0;  // window length; M = window_T / tau samples
  double bilinear_s = 0.0;
  uint64_t seed0 = 1;
  bool window_doubling = true;
  int jobs = 1;
};

struct ProbeRow {
  std::string probe;
  double tau;
  double s;
  double b;
  double value;
  uint64_t seed;
};

struct ProbeSummary {
  std::string probe;
  double tau;
  double max_value;
};

inline void validate_probe_config(const ProbeConfig& cfg) {
  validate_grid(cfg.grid);
  if (cfg.taus.empty()) throw std::invalid_argument("probe config: taus is empty");
  for (size_t i = 0; i < cfg.taus.size(); ++i) {
    if (!(cfg.taus[i] > 0.0)) throw std::invalid_argument("probe config: tau must be > 0");
    if (i > 0 && !(cfg.taus[i] < cfg.taus[i - 1]))
      throw std::invalid_argument("probe config: taus must be strictly decreasing");
  }
  if (cfg.n_fields < 1 || cfg.n_pairs < 1)
    throw std::invalid_argument("probe config: ensemble sizes must be >= 1");
  if (!(cfg.window_T > 0.0)) throw std::invalid_argument("probe config: window_T must be > 0");
  for (double tau : cfg.taus)
    if (std::llround(cfg.window_T / tau) < 8)
      throw std::invalid_argument("probe config: window too short, need M >= 8 samples");
  if (cfg.jobs < 1) throw std::invalid_argument("probe config: jobs must be >= 1");
}

/** Windowed free-flow trajectory of a band-limited rough sample: the
 * canonical ensemble member for the uniformity probes.  The datum is filtered
 * by Pi_tau so the probed field lives where the schemes operate.
 */
inline SpaceTimeField probe_field(const ProbeConfig& cfg, double tau, int M, uint64_t seed) {
  RoughDataSpec spec;
  spec.s0 = cfg.s0;
  spec.margin = cfg.margin;
  spec.seed = seed;
  spec.grid = cfg.grid;
  SpectralField f = apply_multiplier(make_pi_tau(tau, cfg.grid), rough_sample(spec));
  Multiplier flow = make_free_flow(tau, cfg.grid);
  SpaceTimeField u;
  u.tau = tau;
  u.grid = cfg.grid;
  u.samples.reserve(static_cast<size_t>(M));
  u.samples.push_back(f);
  for (int m = 1; m < M; ++m) u.samples.push_back(apply_multiplier(flow, u.samples.back()));
  return apply_window(u);
}

struct ProbeReport {
  ProbeConfig cfg;
  std::vector<ProbeRow> rows;
  std::vector<ProbeSummary> summary;
};

inline ProbeReport probe_study(const ProbeConfig& cfg) {
  validate_probe_config(cfg);
  ProbeReport report;
  report.cfg = cfg;
  struct Batch {
    const char* name;
    double win_factor;
  };
  std::vector<Batch> batches{{"", 1.0}};
  if (cfg.window_doubling) batches.push_back({"_dblwin", 2.0});

  for (double tau : cfg.taus) {
    for (const Batch& batch : batches) {
      int M = static_cast<int>(std::llround(batch.win_factor * cfg.window_T / tau));

      std::vector<double> svals(static_cast<size_t>(cfg.n_fields));
      run_parallel(cfg.n_fields, cfg.jobs, [&](int i) {
        SpaceTimeField u = probe_field(cfg, tau, M, cfg.seed0 + static_cast<uint64_t>(i));
        svals[static_cast<size_t>(i)] = strichartz_ratio(u);
      });
      double smax = 0.0;
      for (int i = 0; i < cfg.n_fields; ++i) {
        uint64_t seed = cfg.seed0 + static_cast<uint64_t>(i);
        report.rows.push_back({std::string("strichartz") + batch.name, tau, 0.0, 1.0 / 3.0,
                               svals[static_cast<size_t>(i)], seed});
        smax = std::max(smax, svals[static_cast<size_t>(i)]);
      }
      report.summary.push_back({std::string("strichartz") + batch.name, tau, smax});

      std::vector<double> bvals(static_cast<size_t>(cfg.n_pairs));
      run_parallel(cfg.n_pairs, cfg.jobs, [&](int p) {
        uint64_t sa = cfg.seed0 + 10000 + 2 * static_cast<uint64_t>(p);
        SpaceTimeField u = probe_field(cfg, tau, M, sa);
        SpaceTimeField v = probe_field(cfg, tau, M, sa + 1);
        bvals[static_cast<size_t>(p)] = bilinear_ratio(u, v, cfg.bilinear_s);
      });
      double bmax = 0.0;
      for (int p = 0; p < cfg.n_pairs; ++p) {
        uint64_t sa = cfg.seed0 + 10000 + 2 * static_cast<uint64_t>(p);
        report.rows.push_back({std::string("bilinear") + batch.name, tau, cfg.bilinear_s, 0.5,
                               bvals[static_cast<size_t>(p)], sa});
        bmax = std::max(bmax, bvals[static_cast<size_t>(p)]);
      }
      report.summary.push_back({std::string("bilinear") + batch.name, tau, bmax});
    }
  }
  return report;
}

}  // namespace kdvlab
