#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "kdvlab/bourgain.hpp"
#include "kdvlab/io.hpp"
#include "oracles.hpp"

using namespace kdvlab;

namespace {

SpectralField rough(const GridSpec& grid, uint64_t seed) {
  RoughDataSpec spec;
  spec.s0 = 0.6;
  spec.margin = 0.25;
  spec.seed = seed;
  spec.grid = grid;
  return rough_sample(spec);
}

// Windowed free-flow trajectory from a Pi_tau-filtered rough datum.
SpaceTimeField windowed_flow(const GridSpec& grid, double tau, int M, uint64_t seed) {
  ProbeConfig cfg;
  cfg.grid = grid;
  cfg.taus = {tau};
  return probe_field(cfg, tau, M, seed);
}

double wrap_pi(double x) {
  double y = std::fmod(x, 2.0 * M_PI);
  if (y > M_PI) y -= 2.0 * M_PI;
  if (y < -M_PI) y += 2.0 * M_PI;
  return y;
}

}  // namespace

TEST_CASE("discrete frequency symbol d_tau") {
  double tau = 0.25;
  CHECK(std::abs(d_tau(tau, 0.0)) == 0.0);

  cplx at_edge = d_tau(tau, M_PI / tau);
  CHECK(at_edge.real() == Catch::Approx(-2.0 / tau).margin(1e-12));
  CHECK(std::abs(at_edge.imag()) < 1e-12);

  for (int i = 0; i < 200; ++i) {
    double sigma = -500.0 + 5.01 * i;
    CHECK(std::abs(d_tau(tau, sigma)) <= 2.0 / tau + 1e-12);
    cplx shifted = d_tau(tau, sigma + 2.0 * M_PI / tau);
    CHECK(std::abs(shifted - d_tau(tau, sigma)) < 1e-9);
  }

  // comparable to sigma itself on the fundamental cell
  for (int i = 1; i <= 40; ++i) {
    double sigma = (M_PI / tau) * i / 40.0;
    double ratio = std::abs(d_tau(tau, sigma)) / sigma;
    CHECK(ratio >= 2.0 / M_PI - 1e-12);
    CHECK(ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("window weight: flat middle, cosine ramps") {
  CHECK(window_weight(0.0) == 0.0);
  CHECK(window_weight(1.0) == 0.0);
  CHECK(window_weight(-0.5) == 0.0);
  CHECK(window_weight(0.5) == 1.0);
  CHECK(window_weight(0.25) == Catch::Approx(1.0).margin(1e-15));
  CHECK(window_weight(0.75) == Catch::Approx(1.0).margin(1e-15));
  CHECK(window_weight(0.125) == Catch::Approx(0.5).margin(1e-15));
  for (int i = 1; i < 32; ++i) {
    double theta = i / 32.0;
    CHECK(window_weight(theta) == Catch::Approx(window_weight(1.0 - theta)).margin(1e-15));
  }
}

TEST_CASE("st_fourier matches the direct double sum") {
  GridSpec grid{16};
  double tau = 0.2;
  int M = 16;
  SpaceTimeField u;
  u.tau = tau;
  u.grid = grid;
  for (int m = 0; m < M; ++m) u.samples.push_back(rough(grid, 100 + static_cast<uint64_t>(m)));

  StFourier F = st_fourier(u);
  for (int j = 0; j < M; ++j)
    for (long long k = -7; k <= 7; ++k) {
      cplx slow = oracle::slow_st_fourier(u.samples, tau, j, k);
      CHECK(std::abs(F.at(j, static_cast<int>(k)) - slow) < 1e-10);
    }
}

TEST_CASE("constant trajectory concentrates at sigma = 0") {
  GridSpec grid{32};
  double tau = 0.1;
  int M = 32;
  SpectralField f = rough(grid, 3);
  SpaceTimeField u;
  u.tau = tau;
  u.grid = grid;
  for (int m = 0; m < M; ++m) u.samples.push_back(f);

  StFourier F = st_fourier(u);
  CHECK(F.sigma(M / 2) == 0.0);
  CHECK(std::abs(F.at(M / 2, 1) - tau * static_cast<double>(M) * f.at(1)) < 1e-12);
  for (int j = 0; j < M; ++j) {
    if (j == M / 2) continue;
    CHECK(std::abs(F.at(j, 1)) < 1e-12);
  }
}

TEST_CASE("free flow concentrates on the dispersive line") {
  GridSpec grid{32};
  double tau = 0.1;
  int M = 64;
  int k0 = 2;
  SpectralField f;
  f.grid = grid;
  f.coeff.assign(32, cplx(0.0, 0.0));
  f.coeff[static_cast<size_t>(bin_of(k0, 32))] = cplx(0.5, 0.0);
  f.coeff[static_cast<size_t>(bin_of(-k0, 32))] = cplx(0.5, 0.0);

  Multiplier flow = make_free_flow(tau, grid);
  SpaceTimeField u;
  u.tau = tau;
  u.grid = grid;
  u.samples.push_back(f);
  for (int m = 1; m < M; ++m) u.samples.push_back(apply_multiplier(flow, u.samples.back()));

  StFourier F = st_fourier(u);
  int arg_max = 0;
  double best = -1.0;
  int nearest = 0;
  double near_best = 1e300;
  for (int j = 0; j < M; ++j) {
    double mag = std::abs(F.at(j, k0));
    if (mag > best) {
      best = mag;
      arg_max = j;
    }
    double dist = std::abs(wrap_pi(F.tau_sigma(j) + tau * k0 * k0 * k0));
    if (dist < near_best) {
      near_best = dist;
      nearest = j;
    }
  }
  CHECK(arg_max == nearest);
}

TEST_CASE("space-time Parseval: b = 0 recovers the trajectory l2 norm") {
  GridSpec grid{64};
  double tau = 0.05;
  for (int M : {16, 64}) {
    SpaceTimeField u = windowed_flow(grid, tau, M, 11);
    double lhs = xsb_norm(u, 0.0, 0.0);
    double acc = 0.0;
    for (const SpectralField& f : u.samples) acc += l2_norm(f) * l2_norm(f);
    double rhs = std::sqrt(tau * acc);
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("xsb norms are monotone in both indices") {
  GridSpec grid{64};
  SpaceTimeField u = windowed_flow(grid, 0.125, 16, 4);
  StFourier F = st_fourier(u);
  CHECK(xsb_norm(F, 0.0, 0.5) >= xsb_norm(F, 0.0, 1.0 / 3.0));
  CHECK(xsb_norm(F, 0.0, 1.0 / 3.0) >= xsb_norm(F, 0.0, 0.0));
  CHECK(xsb_norm(F, 1.0, 0.25) >= xsb_norm(F, 0.5, 0.25));
  CHECK(xsb_norm(F, 0.5, 0.25) >= xsb_norm(F, 0.0, 0.25));
}

TEST_CASE("the b-weight is pinned between 1 and sqrt(5)/tau") {
  GridSpec grid{64};
  double tau = 0.125;
  SpaceTimeField u = windowed_flow(grid, tau, 16, 9);
  StFourier F = st_fourier(u);
  double b0 = xsb_norm(F, 0.0, 0.0);
  double b_half = xsb_norm(F, 0.0, 0.5);
  CHECK(b_half >= b0);
  CHECK(b_half <= std::pow(5.0, 0.25) / std::sqrt(tau) * b0 * (1.0 + 1e-12));
}

TEST_CASE("xs dominates its quadratic part; mean-zero is enforced") {
  GridSpec grid{64};
  SpaceTimeField u = windowed_flow(grid, 0.125, 16, 21);
  CHECK(xs_norm(u, 0.5) >= xsb_norm(u, 0.5, 0.5));
  CHECK(ys_norm(u, 0.5) > 0.0);

  SpaceTimeField bad = u;
  for (SpectralField& f : bad.samples) f.coeff[0] = cplx(0.5, 0.0);
  CHECK_THROWS_AS(xs_norm(bad, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ys_norm(bad, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bilinear_ratio(bad, u, 0.0), std::invalid_argument);
}

TEST_CASE("xs controls the worst Sobolev norm along the trajectory") {
  GridSpec grid{128};
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    SpaceTimeField u = windowed_flow(grid, 0.0625, 16, seed);
    double xs = xs_norm(u, 0.5);
    double sup = 0.0;
    for (const SpectralField& f : u.samples) sup = std::max(sup, sobolev_norm(f, 0.5));
    CHECK(sup <= xs);
  }
}

TEST_CASE("free-flow xsb stays level as tau refines") {
  GridSpec grid{64};
  std::vector<double> vals;
  for (int e = 3; e <= 5; ++e) {
    double tau = std::ldexp(1.0, -e);
    int M = static_cast<int>(std::llround(1.0 / tau));
    vals.push_back(xsb_norm(windowed_flow(grid, tau, M, 17), 0.0, 0.5));
  }
  double lo = *std::min_element(vals.begin(), vals.end());
  double hi = *std::max_element(vals.begin(), vals.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 2.5);
}

TEST_CASE("strichartz ratio: quadrature agrees with a refined slow sum") {
  GridSpec grid{32};
  double tau = 0.125;
  SpaceTimeField u = windowed_flow(grid, tau, 16, 8);
  double fast = strichartz_ratio(u);

  Multiplier pi = make_pi_tau(tau, grid);
  int np = 4 * grid.n_modes;  // extra refinement; quartic is already resolved at 2x
  double dx = 2.0 * M_PI / np;
  double acc = 0.0;
  for (const SpectralField& f : u.samples) {
    std::vector<double> phys = oracle::slow_synthesis(apply_multiplier(pi, f), np);
    double q = 0.0;
    for (double x : phys) q += x * x * x * x;
    acc += q * dx;
  }
  double slow = std::pow(tau * acc, 0.25) / xsb_norm(u, 0.0, 1.0 / 3.0);
  CHECK(fast == Catch::Approx(slow).epsilon(1e-11));
}

TEST_CASE("strichartz ratio: degenerate input throws, single mode is stable") {
  GridSpec grid{32};
  SpaceTimeField zero = windowed_flow(grid, 0.125, 16, 5);
  for (SpectralField& f : zero.samples) f = scale(0.0, f);
  CHECK_THROWS_AS(strichartz_ratio(zero), std::runtime_error);

  std::vector<double> ratios;
  for (int e = 3; e <= 5; ++e) {
    double tau = std::ldexp(1.0, -e);
    int M = static_cast<int>(std::llround(1.0 / tau));
    SpectralField f;
    f.grid = grid;
    f.coeff.assign(32, cplx(0.0, 0.0));
    f.coeff[static_cast<size_t>(bin_of(1, 32))] = cplx(0.5, 0.0);
    f.coeff[static_cast<size_t>(bin_of(-1, 32))] = cplx(0.5, 0.0);
    Multiplier flow = make_free_flow(tau, grid);
    SpaceTimeField u;
    u.tau = tau;
    u.grid = grid;
    u.samples.push_back(f);
    for (int m = 1; m < M; ++m) u.samples.push_back(apply_multiplier(flow, u.samples.back()));
    ratios.push_back(strichartz_ratio(apply_window(u)));
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 2.0);
}

TEST_CASE("bilinear ratio: symmetric, finite, zero partner rejected") {
  GridSpec grid{32};
  double tau = 0.125;
  SpaceTimeField u = windowed_flow(grid, tau, 16, 31);
  SpaceTimeField v = windowed_flow(grid, tau, 16, 32);

  double r_uv = bilinear_ratio(u, v, 0.0);
  double r_vu = bilinear_ratio(v, u, 0.0);
  CHECK(r_uv > 0.0);
  CHECK(std::isfinite(r_uv));
  CHECK(r_uv == Catch::Approx(r_vu).epsilon(1e-13));

  SpaceTimeField zero = u;
  for (SpectralField& f : zero.samples) f = scale(0.0, f);
  CHECK_THROWS_AS(bilinear_ratio(u, zero, 0.0), std::runtime_error);

  SpaceTimeField short_v = v;
  short_v.samples.resize(8);
  CHECK_THROWS_AS(bilinear_ratio(u, short_v, 0.0), std::invalid_argument);
}

TEST_CASE("probe study: shapes, determinism, window doubling") {
  ProbeConfig cfg;
  cfg.taus = {std::ldexp(1.0, -4), std::ldexp(1.0, -5)};
  cfg.grid = GridSpec{32};
  cfg.n_fields = 3;
  cfg.n_pairs = 2;
  cfg.window_T = 1.0;
  cfg.seed0 = 5;
  cfg.jobs = 4;

  ProbeReport r = probe_study(cfg);
  // 2 taus x 2 batches x (3 strichartz + 2 bilinear)
  REQUIRE(r.rows.size() == 20);
  REQUIRE(r.summary.size() == 8);
  int dblwin_rows = 0;
  for (const ProbeRow& row : r.rows) {
    CHECK(row.value > 0.0);
    CHECK(std::isfinite(row.value));
    if (row.probe.find("_dblwin") != std::string::npos) ++dblwin_rows;
    if (row.probe.rfind("strichartz", 0) == 0) {
      CHECK(row.s == 0.0);
      CHECK(row.b == Catch::Approx(1.0 / 3.0));
    } else {
      CHECK(row.b == 0.5);
    }
  }
  CHECK(dblwin_rows == 10);
  for (const ProbeSummary& s : r.summary) CHECK(s.max_value > 0.0);

  ProbeConfig serial = cfg;
  serial.jobs = 1;
  ProbeReport r1 = probe_study(serial);
  CHECK(probe_csv(r) == probe_csv(r1));

  ProbeConfig too_short = cfg;
  too_short.taus = {0.5};
  CHECK_THROWS_AS(probe_study(too_short), std::invalid_argument);
}
