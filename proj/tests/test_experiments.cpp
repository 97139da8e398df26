#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kdvlab/config.hpp"
#include "kdvlab/experiments.hpp"
#include "kdvlab/io.hpp"
#include "oracles.hpp"

using namespace kdvlab;

namespace {

std::vector<double> dyadic(int hi, int lo) {  // 2^hi .. 2^lo, hi > lo
  std::vector<double> out;
  for (int e = hi; e >= lo; --e) out.push_back(std::ldexp(1.0, e));
  return out;
}

ExperimentConfig smooth_micro() {
  ExperimentConfig cfg;
  cfg.schemes = {SchemeKind::ExpIntegrator, SchemeKind::LieSplitting, SchemeKind::Resonance};
  cfg.tau_ladder = dyadic(-6, -10);
  cfg.horizon = 0.25;
  cfg.data = DataKind::Cosine;
  cfg.seeds = {1};
  cfg.grid = GridSpec{64};
  cfg.reference.tau_ref = std::ldexp(1.0, -14);
  cfg.jobs = 4;
  return cfg;
}

}  // namespace

TEST_CASE("steps_for demands integer step counts") {
  CHECK(steps_for(1.0, std::ldexp(1.0, -10)) == 1024);
  CHECK(steps_for(0.5, 0.125) == 4);
  CHECK_THROWS_AS(steps_for(1.0, 0.3), std::invalid_argument);
}

TEST_CASE("median of samples") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("rate_fit recovers exact power laws") {
  std::vector<std::pair<double, double>> pts;
  for (int e = -4; e >= -9; --e) {
    double tau = std::ldexp(1.0, e);
    pts.emplace_back(tau, 0.37 * std::pow(tau, 1.5));
  }
  RateFit fit = rate_fit(pts);
  CHECK(fit.slope == Catch::Approx(1.5).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.n_points == 6);
  CHECK_THROWS_AS(rate_fit({{0.1, 1.0}, {0.05, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit({{0.1, 1.0}, {0.05, 0.5}, {0.025, -1.0}}), std::invalid_argument);
}

TEST_CASE("config validation rejects bad ladders and grids") {
  ExperimentConfig cfg = smooth_micro();
  CHECK_NOTHROW(validate_experiment_config(cfg, true));

  ExperimentConfig bad = cfg;
  bad.tau_ladder = {0.25, 0.25};
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);

  bad = cfg;
  bad.tau_ladder = {0.3};  // horizon 0.25 not an integer multiple
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);

  bad = cfg;
  bad.grid = GridSpec{32};  // cutoff at tau_min is 10; need n/2 > 20
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);

  bad = cfg;
  bad.reference.tau_ref = std::ldexp(1.0, -12);  // not 16x below tau_min
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);

  bad = cfg;
  bad.fit_first = 3;
  bad.fit_last = 9;
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);

  bad = cfg;
  bad.seeds.clear();
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);

  bad = cfg;
  bad.reference.max_estimate_fraction = 0.0;
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);
  bad.reference.max_estimate_fraction = 1.5;
  CHECK_THROWS_AS(validate_experiment_config(bad, true), std::invalid_argument);
}

TEST_CASE("reference gate fraction is configurable") {
  ExperimentConfig def = experiment_config_from(parse_config(
      "[grid]\nn_modes = 64\n[time]\ntau_log2 = [-5, -6]\ntau_ref_log2 = -10\n"));
  CHECK(def.reference.max_estimate_fraction == 0.01);
  ExperimentConfig loose = experiment_config_from(parse_config(
      "[grid]\nn_modes = 64\n[time]\ntau_log2 = [-5, -6]\ntau_ref_log2 = -10\n"
      "ref_estimate_fraction = 0.1\n"));
  CHECK(loose.reference.max_estimate_fraction == 0.1);
}

TEST_CASE("fit window default drops the two coarsest rungs") {
  ExperimentConfig cfg = smooth_micro();
  auto [w0, w1] = fit_window(cfg);
  CHECK(w0 == 2);
  CHECK(w1 == 4);
  cfg.fit_first = 1;
  cfg.fit_last = 3;
  auto [e0, e1] = fit_window(cfg);
  CHECK(e0 == 1);
  CHECK(e1 == 3);
}

TEST_CASE("smooth data ignores the seed") {
  ExperimentConfig cfg = smooth_micro();
  SpectralField a = make_initial_datum(cfg, 1);
  SpectralField b = make_initial_datum(cfg, 999);
  for (size_t i = 0; i < a.coeff.size(); ++i) CHECK(a.coeff[i] == b.coeff[i]);
}

TEST_CASE("reference validity gate") {
  CHECK_NOTHROW(enforce_reference_validity({1}, {9e-5}, 1e-2));
  CHECK_THROWS_AS(enforce_reference_validity({1}, {2e-4}, 1e-2), ReferenceValidationError);
  // nothing measured: nothing to reject against
  CHECK_NOTHROW(enforce_reference_validity({1}, {1.0},
                                           std::numeric_limits<double>::infinity()));
  // the fraction is a policy knob: 2e-4 passes a 10% gate, fails a 0.1% gate
  CHECK_NOTHROW(enforce_reference_validity({1}, {2e-4}, 1e-2, 0.1));
  CHECK_THROWS_AS(enforce_reference_validity({1}, {9e-5}, 1e-2, 1e-3), ReferenceValidationError);
}

TEST_CASE("reference_solve trivial and linear regimes") {
  GridSpec grid{64};
  SpectralField u0 = smooth_profile(ProfileName::Cosine, grid);
  ReferencePolicy pol{std::ldexp(1.0, -10), true};

  ReferenceResult at_zero = reference_solve(u0, 0.0, pol);
  CHECK(l2_distance(at_zero.u, u0) == 0.0);

  // free flow only: every member is exact, so extrapolation is exact too
  ReferenceResult lin = reference_solve(u0, 0.5, pol, 1, false);
  double worst = 0.0;
  for (int k = -31; k <= 31; ++k)
    worst = std::max(worst, std::abs(lin.u.at(k) - oracle::free_flow_phase(0.5, k) * u0.at(k)));
  CHECK(worst < 1e-12);
  CHECK(lin.pair_disagreement < 1e-12);
  CHECK(lin.error_estimate < 1e-12);
}

TEST_CASE("reference validation quantities at the documented scale") {
  GridSpec grid{64};
  SpectralField u0 = smooth_profile(ProfileName::Cosine, grid);
  ReferencePolicy pol{std::ldexp(1.0, -16), true};
  ReferenceResult ref = reference_solve(u0, 1.0, pol, 3);
  // raw members differ at first order, (C/2) tau_ref with C = O(1)
  CHECK(ref.pair_disagreement > 1e-7);
  CHECK(ref.pair_disagreement < 1e-4);
  // the extrapolation self-consistency is second order and collapses far
  // below it (measured 1.1e-10 here)
  CHECK(ref.error_estimate <= 1e-8);
  CHECK(ref.error_estimate < 1e-2 * ref.pair_disagreement);
}

TEST_CASE("smooth micro convergence study: first order, deterministic") {
  ExperimentConfig cfg = smooth_micro();
  ConvergenceReport r1 = convergence_study(cfg);

  REQUIRE(r1.points.size() == 3 * 5);
  for (const ErrorPoint& p : r1.points) {
    CHECK(!p.blew_up);
    CHECK(p.error_l2 > 0.0);
  }
  REQUIRE(r1.fits.size() == 3);
  for (const SchemeSeedFit& f : r1.fits) {
    REQUIRE(f.has_fit);
    CHECK(f.fit.slope > 0.8);
    CHECK(f.fit.slope < 1.2);
  }
  REQUIRE(r1.median_slopes.size() == 3);

  // same config, different parallelism degree: identical bytes
  ExperimentConfig serial = cfg;
  serial.jobs = 1;
  ConvergenceReport r2 = convergence_study(serial);
  CHECK(convergence_csv(r1) == convergence_csv(r2));
  for (size_t i = 0; i < r1.points.size(); ++i) {
    CHECK(r1.points[i].error_l2 == r2.points[i].error_l2);
    CHECK(r1.points[i].tau == r2.points[i].tau);
  }
}

TEST_CASE("errors shrink monotonically through the micro ladder") {
  ExperimentConfig cfg = smooth_micro();
  cfg.schemes = {SchemeKind::Resonance};
  ConvergenceReport r = convergence_study(cfg);
  for (size_t i = 1; i < r.points.size(); ++i)
    CHECK(r.points[i].error_l2 < r.points[i - 1].error_l2);
}

TEST_CASE("local error study: second-order defects, exact free flow") {
  ExperimentConfig cfg;
  cfg.schemes = {SchemeKind::ExpIntegrator, SchemeKind::LieSplitting, SchemeKind::Resonance};
  cfg.tau_ladder = dyadic(-5, -9);
  cfg.data = DataKind::TwoMode;
  cfg.seeds = {1};
  cfg.grid = GridSpec{64};
  cfg.local_refine = 64;
  cfg.jobs = 4;
  LocalErrorReport r = local_error_study(cfg);
  REQUIRE(r.points.size() == 3 * 5);
  REQUIRE(r.fits.size() == 3);
  for (const SchemeSeedFit& f : r.fits) {
    REQUIRE(f.has_fit);
    CHECK(f.fit.slope > 1.7);
    CHECK(f.fit.slope < 2.3);
  }
  cfg.nonlinearity = false;
  LocalErrorReport lin = local_error_study(cfg);
  for (const LocalErrorPoint& p : lin.points) CHECK(p.defect <= 1e-13);
}

TEST_CASE("projection gap study: positive, shrinking gaps") {
  ExperimentConfig cfg;
  cfg.schemes = {SchemeKind::Resonance};
  cfg.tau_ladder = dyadic(-4, -7);
  cfg.horizon = 0.25;
  cfg.data = DataKind::Rough;
  cfg.s0 = 1.0;
  cfg.margin = 0.01;
  cfg.seeds = {7};
  cfg.grid = GridSpec{128};
  cfg.reference.tau_ref = std::ldexp(1.0, -11);
  cfg.jobs = 4;
  GapReport r = projection_gap_study(cfg);
  REQUIRE(r.points.size() == 4);
  for (size_t i = 0; i < r.points.size(); ++i) {
    CHECK(!r.points[i].blew_up);
    CHECK(r.points[i].gap > 0.0);
    if (i > 0) CHECK(r.points[i].gap < r.points[i - 1].gap);
  }
}
