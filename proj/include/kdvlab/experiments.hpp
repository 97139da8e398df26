#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/field.hpp"
#include "kdvlab/initial_data.hpp"
#include "kdvlab/pool.hpp"
#include "kdvlab/rate_fit.hpp"
#include "kdvlab/schemes.hpp"

namespace kdvlab {

enum class DataKind { Cosine, TwoMode, Rough };

inline std::string data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::Cosine: return "cosine";
    case DataKind::TwoMode: return "two_mode";
    case DataKind::Rough: return "rough";
  }
  return "unknown";
}

struct ReferencePolicy {
  double tau_ref = 0.0;
  bool validate = true;
  // Reject the study when the reference error estimate exceeds this fraction
  // of the smallest measured error.  1% is right for smooth data where the
  // Richardson pair converges fast; rough-data studies must loosen it, since
  // the pair itself only converges at the reduced rate (the estimate scales
  // like tau_ref^{s0/3}) and tightening via tau_ref alone is hopeless.
  double max_estimate_fraction = 0.01;
};

struct ExperimentConfig {
  std::vector<SchemeKind> schemes;
  std::vector<double> tau_ladder;  // strictly decreasing
  double horizon = 1.0;
  DataKind data = DataKind::Rough;
  double s0 = 1.0;
  double margin = 0.01;
  double normalize_to = 1.0;
  std::vector<uint64_t> seeds = {1};
  GridSpec grid;
  ReferencePolicy reference;
  // Fit window as an inclusive index range into tau_ladder; -1/-1 applies the
  // default policy: drop the two coarsest entries (pre-asymptotic pollution).
  int fit_first = -1;
  int fit_last = -1;
  int jobs = 1;
  int local_refine = 256;   // local-error study: reference runs at tau/refine
  bool nonlinearity = true;  // false: free flow only (exactness checks)
};

inline int steps_for(double T, double tau) {
  double ratio = T / tau;
  long long n = std::llround(ratio);
  if (n < 0 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("horizon must be an integer multiple of every step size");
  if (n > std::numeric_limits<int>::max())
    throw std::invalid_argument("step count overflows int");
  return static_cast<int>(n);
}

inline void validate_experiment_config(const ExperimentConfig& cfg, bool needs_reference) {
  validate_grid(cfg.grid);
  if (cfg.tau_ladder.empty()) throw std::invalid_argument("config: tau_ladder is empty");
  for (size_t i = 0; i < cfg.tau_ladder.size(); ++i) {
    if (!(cfg.tau_ladder[i] > 0.0)) throw std::invalid_argument("config: tau must be > 0");
    if (i > 0 && !(cfg.tau_ladder[i] < cfg.tau_ladder[i - 1]))
      throw std::invalid_argument("config: tau_ladder must be strictly decreasing");
  }
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
  for (double tau : cfg.tau_ladder) steps_for(cfg.horizon, tau);
  double tau_min = cfg.tau_ladder.back();
  if (cfg.grid.n_modes / 2 <= 2 * filter_cutoff(tau_min))
    throw std::invalid_argument(
        "config: n_modes/2 must exceed twice the finest filter cutoff (alias safety)");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds is empty");
  if (cfg.s0 < 0.0) throw std::invalid_argument("config: s0 must be >= 0");
  if (!(cfg.margin > 0.0)) throw std::invalid_argument("config: margin must be > 0");
  if (cfg.jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  if (needs_reference) {
    if (!(cfg.reference.tau_ref > 0.0)) throw std::invalid_argument("config: tau_ref must be > 0");
    if (cfg.reference.tau_ref > tau_min / 16.0 + 1e-18)
      throw std::invalid_argument("config: tau_ref must be at least 16x below the finest tau");
    steps_for(cfg.horizon, cfg.reference.tau_ref);
    steps_for(cfg.horizon, 2.0 * cfg.reference.tau_ref);
    if (!(cfg.reference.max_estimate_fraction > 0.0) || cfg.reference.max_estimate_fraction > 1.0)
      throw std::invalid_argument("config: ref_estimate_fraction must be in (0, 1]");
  }
  if (cfg.fit_first >= 0 || cfg.fit_last >= 0) {
    if (cfg.fit_first < 0 || cfg.fit_last < cfg.fit_first ||
        cfg.fit_last >= static_cast<int>(cfg.tau_ladder.size()))
      throw std::invalid_argument("config: fit window out of range");
  }
}

inline SpectralField make_initial_datum(const ExperimentConfig& cfg, uint64_t seed) {
  switch (cfg.data) {
    case DataKind::Cosine: return smooth_profile(ProfileName::Cosine, cfg.grid);
    case DataKind::TwoMode: return smooth_profile(ProfileName::TwoMode, cfg.grid);
    case DataKind::Rough: {
      RoughDataSpec spec;
      spec.s0 = cfg.s0;
      spec.margin = cfg.margin;
      spec.seed = seed;
      spec.grid = cfg.grid;
      spec.normalize_to = cfg.normalize_to;
      return rough_sample(spec);
    }
  }
  throw std::logic_error("make_initial_datum: unhandled data kind");
}

// Fit window as concrete indices [first, last] into the ladder.
inline std::pair<int, int> fit_window(const ExperimentConfig& cfg) {
  int n = static_cast<int>(cfg.tau_ladder.size());
  if (cfg.fit_first >= 0) return {cfg.fit_first, cfg.fit_last};
  return {std::min(2, n), n - 1};
}

struct ReferenceResult {
  SpectralField u;                 // Richardson extrapolation of the two finest members
  double pair_disagreement = 0.0;  // ||u(tau_ref) - u(tau_ref/2)||_L2
  double error_estimate = 0.0;     // second-difference estimate of u's own error
};

struct ReferenceValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Reference endpoint for the unfiltered truncated flow: resonance stepping
 * with the filter frozen open (full band), run at 2*tau_ref, tau_ref and
 * tau_ref/2.  Returns the first-order Richardson extrapolation of the two
 * finest runs, u = 2 u_{tau/2} - u_{tau}, whose error is O(tau_ref^2).
 *
 * The member runs double as the validation pair: the second difference
 * (u_c - u_b) - (u_b - u_a)/2 = (3/4) C2 tau_ref^2 + O(tau_ref^3)
 * cancels the first-order term and directly estimates the extrapolation
 * error scale; callers reject the study when that estimate exceeds 1% of
 * the smallest error they measure.  The raw pair disagreement (first-order
 * sized) is reported alongside for inspection.
 */
inline ReferenceResult reference_solve(const SpectralField& u0, double T,
                                       const ReferencePolicy& policy, int jobs = 1,
                                       bool nonlinearity_enabled = true) {
  if (T < 0.0) throw std::invalid_argument("reference_solve: T must be >= 0");
  if (T == 0.0) return {u0, 0.0, 0.0};
  if (!(policy.tau_ref > 0.0)) throw std::invalid_argument("reference_solve: tau_ref must be > 0");

  StepOptions opts;
  opts.cutoff_override = max_mode(u0.grid);
  opts.nonlinearity_enabled = nonlinearity_enabled;
  SchemeSpec spec{SchemeKind::Resonance, PsiChoice::Resonance, 64};

  if (!policy.validate) {
    StepContext ctx = make_step_context(u0.grid, policy.tau_ref, opts);
    return {evolve(ctx, spec, u0, steps_for(T, policy.tau_ref)), 0.0, 0.0};
  }

  const double taus[3] = {2.0 * policy.tau_ref, policy.tau_ref, 0.5 * policy.tau_ref};
  std::vector<SpectralField> runs(3);
  run_parallel(3, std::min(jobs, 3), [&](int i) {
    StepContext ctx = make_step_context(u0.grid, taus[i], opts);
    runs[static_cast<size_t>(i)] = evolve(ctx, spec, u0, steps_for(T, taus[i]));
  });

  ReferenceResult out;
  out.pair_disagreement = l2_distance(runs[1], runs[2]);
  // (u_c - u_b) - (u_b - u_a)/2, assembled as u_c - (3/2) u_b + (1/2) u_a.
  SpectralField second_diff = axpy(-1.5, runs[1], axpy(0.5, runs[0], runs[2]));
  out.error_estimate = (2.0 / 3.0) * l2_norm(second_diff);
  out.u = axpy(-1.0, runs[1], scale(2.0, runs[2]));
  return out;
}

struct ErrorPoint {
  SchemeKind scheme;
  uint64_t seed;
  double tau;
  double error_l2;  // NaN when the run blew up
  bool blew_up = false;
  int blow_step = -1;
};

struct SchemeSeedFit {
  SchemeKind scheme;
  uint64_t seed;
  bool has_fit = false;
  RateFit fit;
};

struct ConvergenceReport {
  ExperimentConfig cfg;
  std::vector<ErrorPoint> points;  // scheme-major, then seed, then ladder order
  std::vector<SchemeSeedFit> fits;
  std::vector<std::pair<SchemeKind, double>> median_slopes;
  std::vector<double> reference_pair_disagreement;  // per seed
  std::vector<double> reference_error_estimate;     // per seed
  double min_valid_error = std::numeric_limits<double>::quiet_NaN();
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace detail {

inline void fit_and_summarize(const ExperimentConfig& cfg, ConvergenceReport& report) {
  auto [w0, w1] = fit_window(cfg);
  int L = static_cast<int>(cfg.tau_ladder.size());
  for (SchemeKind scheme : cfg.schemes) {
    std::vector<double> slopes;
    for (uint64_t seed : cfg.seeds) {
      std::vector<std::pair<double, double>> pts;
      for (const ErrorPoint& p : report.points) {
        if (p.scheme != scheme || p.seed != seed || p.blew_up) continue;
        if (!(p.error_l2 > 0.0)) continue;
        int idx = -1;
        for (int i = 0; i < L; ++i)
          if (cfg.tau_ladder[static_cast<size_t>(i)] == p.tau) idx = i;
        if (idx < w0 || idx > w1) continue;
        pts.emplace_back(p.tau, p.error_l2);
      }
      SchemeSeedFit f;
      f.scheme = scheme;
      f.seed = seed;
      if (pts.size() >= 3) {
        f.fit = rate_fit(pts);
        f.has_fit = true;
        slopes.push_back(f.fit.slope);
      }
      report.fits.push_back(f);
    }
    report.median_slopes.emplace_back(scheme, median(slopes));
  }
  double min_err = std::numeric_limits<double>::infinity();
  for (const ErrorPoint& p : report.points)
    if (!p.blew_up && p.error_l2 > 0.0) min_err = std::min(min_err, p.error_l2);
  report.min_valid_error = min_err;
}

}  // namespace detail

/** Reject the study when any seed's reference carries an estimated error
 * above the policy fraction of the smallest measured error: such a reference
 * could move the reported errors materially and the whole ladder is suspect.
 */
inline void enforce_reference_validity(const std::vector<uint64_t>& seeds,
                                       const std::vector<double>& error_estimates,
                                       double min_valid_error, double max_fraction = 0.01) {
  if (!std::isfinite(min_valid_error)) return;
  for (size_t i = 0; i < seeds.size(); ++i) {
    double est = error_estimates[i];
    if (est > max_fraction * min_valid_error)
      throw ReferenceValidationError(
          "reference rejected for seed " + std::to_string(seeds[i]) +
          ": estimated reference error " + std::to_string(est) + " exceeds " +
          std::to_string(100.0 * max_fraction) + "% of the smallest measured error " +
          std::to_string(min_valid_error) + "; decrease tau_ref or loosen ref_estimate_fraction");
  }
}

/** Error ladder against the unfiltered reference: for each (scheme, seed,
 * tau) evolve to the horizon and record the endpoint L2 distance to the
 * reference of the same seed.  Blow-ups become missing points, not failures.
 * After assembly the reference error estimates are checked against the policy
 * fraction of the smallest measured error; a reference too coarse for the
 * study is rejected.
 */
inline ConvergenceReport convergence_study(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg, true);
  ConvergenceReport report;
  report.cfg = cfg;

  int n_seeds = static_cast<int>(cfg.seeds.size());
  std::vector<SpectralField> u0(static_cast<size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i)
    u0[static_cast<size_t>(i)] = make_initial_datum(cfg, cfg.seeds[static_cast<size_t>(i)]);

  std::vector<ReferenceResult> refs(static_cast<size_t>(n_seeds));
  run_parallel(n_seeds, cfg.jobs, [&](int i) {
    refs[static_cast<size_t>(i)] =
        reference_solve(u0[static_cast<size_t>(i)], cfg.horizon, cfg.reference,
                        std::max(1, cfg.jobs / n_seeds), cfg.nonlinearity);
  });
  for (const auto& r : refs) {
    report.reference_pair_disagreement.push_back(r.pair_disagreement);
    report.reference_error_estimate.push_back(r.error_estimate);
  }

  struct Job {
    int scheme_idx, seed_idx, tau_idx;
  };
  std::vector<Job> jobs;
  for (int si = 0; si < static_cast<int>(cfg.schemes.size()); ++si)
    for (int di = 0; di < n_seeds; ++di)
      for (int ti = 0; ti < static_cast<int>(cfg.tau_ladder.size()); ++ti)
        jobs.push_back({si, di, ti});

  std::vector<ErrorPoint> results(jobs.size());
  run_parallel(static_cast<int>(jobs.size()), cfg.jobs, [&](int j) {
    const Job& job = jobs[static_cast<size_t>(j)];
    double tau = cfg.tau_ladder[static_cast<size_t>(job.tau_idx)];
    ErrorPoint p;
    p.scheme = cfg.schemes[static_cast<size_t>(job.scheme_idx)];
    p.seed = cfg.seeds[static_cast<size_t>(job.seed_idx)];
    p.tau = tau;
    StepOptions opts;
    opts.nonlinearity_enabled = cfg.nonlinearity;
    StepContext ctx = make_step_context(cfg.grid, tau, opts);
    SchemeSpec spec{p.scheme, PsiChoice::Resonance, 64};
    try {
      SpectralField uN =
          evolve(ctx, spec, u0[static_cast<size_t>(job.seed_idx)], steps_for(cfg.horizon, tau));
      p.error_l2 = l2_distance(uN, refs[static_cast<size_t>(job.seed_idx)].u);
    } catch (const BlowUpError& e) {
      p.blew_up = true;
      p.blow_step = e.step_index;
      p.error_l2 = std::numeric_limits<double>::quiet_NaN();
    }
    results[static_cast<size_t>(j)] = p;
  });
  report.points = std::move(results);

  detail::fit_and_summarize(cfg, report);

  if (cfg.reference.validate)
    enforce_reference_validity(cfg.seeds, report.reference_error_estimate, report.min_valid_error,
                               cfg.reference.max_estimate_fraction);
  return report;
}

struct GapPoint {
  uint64_t seed;
  double tau;
  double gap;  // sup over sampled t of ||u_full(t) - u_proj(t)||_L2
  bool blew_up = false;
};

struct GapReport {
  ExperimentConfig cfg;
  std::vector<GapPoint> points;  // seed-major, ladder order
  std::vector<SchemeSeedFit> fits;
  double median_slope = std::numeric_limits<double>::quiet_NaN();
};

/** Filtered-vs-unfiltered flow gap: co-integrate the full truncated equation
 * and, per ladder tau, the projected equation (filter frozen at that tau's
 * cutoff, initial datum Pi_tau u0) with the same fine step, and take the sup
 * of the L2 distance over sampled times.  Both solves share the stepper and
 * the step size, so their time-discretization errors largely cancel and the
 * measured quantity isolates the projection gap.
 */
inline GapReport projection_gap_study(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg, true);
  GapReport report;
  report.cfg = cfg;

  int n_seeds = static_cast<int>(cfg.seeds.size());
  int L = static_cast<int>(cfg.tau_ladder.size());
  double tau_ref = cfg.reference.tau_ref;
  int n_ref = steps_for(cfg.horizon, tau_ref);
  int stride = std::max(1, n_ref / 128);
  SchemeSpec spec{SchemeKind::Resonance, PsiChoice::Resonance, 64};

  auto sampled_run = [&](const SpectralField& start, int cutoff) {
    StepOptions opts;
    opts.cutoff_override = cutoff;
    StepContext ctx = make_step_context(cfg.grid, tau_ref, opts);
    std::vector<SpectralField> samples;
    samples.push_back(start);
    std::vector<StepObserver> obs{[&](int n, const SpectralField& u) {
      if (n % stride == 0 || n == n_ref) samples.push_back(u);
    }};
    evolve(ctx, spec, start, n_ref, obs);
    return samples;
  };

  // job 0 per seed: full-band run; jobs 1..L: projected runs per ladder tau.
  std::vector<std::vector<SpectralField>> traj(static_cast<size_t>(n_seeds * (L + 1)));
  std::vector<char> blew(static_cast<size_t>(n_seeds * (L + 1)), 0);
  std::vector<SpectralField> u0(static_cast<size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i)
    u0[static_cast<size_t>(i)] = make_initial_datum(cfg, cfg.seeds[static_cast<size_t>(i)]);

  run_parallel(n_seeds * (L + 1), cfg.jobs, [&](int j) {
    int seed_idx = j / (L + 1);
    int slot = j % (L + 1);
    try {
      if (slot == 0) {
        traj[static_cast<size_t>(j)] =
            sampled_run(u0[static_cast<size_t>(seed_idx)], max_mode(cfg.grid));
      } else {
        double tau = cfg.tau_ladder[static_cast<size_t>(slot - 1)];
        int cutoff = filter_cutoff(tau);
        SpectralField start =
            apply_multiplier(make_band_filter(cutoff, cfg.grid), u0[static_cast<size_t>(seed_idx)]);
        traj[static_cast<size_t>(j)] = sampled_run(start, cutoff);
      }
    } catch (const BlowUpError&) {
      blew[static_cast<size_t>(j)] = 1;
    }
  });

  for (int di = 0; di < n_seeds; ++di) {
    const auto& full = traj[static_cast<size_t>(di * (L + 1))];
    bool full_ok = !blew[static_cast<size_t>(di * (L + 1))];
    std::vector<double> slopes;
    std::vector<std::pair<double, double>> pts;
    for (int ti = 0; ti < L; ++ti) {
      GapPoint p;
      p.seed = cfg.seeds[static_cast<size_t>(di)];
      p.tau = cfg.tau_ladder[static_cast<size_t>(ti)];
      int j = di * (L + 1) + 1 + ti;
      if (!full_ok || blew[static_cast<size_t>(j)]) {
        p.blew_up = true;
        p.gap = std::numeric_limits<double>::quiet_NaN();
      } else {
        const auto& proj = traj[static_cast<size_t>(j)];
        double worst = 0.0;
        for (size_t i = 0; i < full.size(); ++i)
          worst = std::max(worst, l2_distance(full[i], proj[i]));
        p.gap = worst;
      }
      report.points.push_back(p);
    }
    auto [w0, w1] = fit_window(cfg);
    for (int ti = w0; ti <= w1; ++ti) {
      const GapPoint& p = report.points[static_cast<size_t>(di * L + ti)];
      if (!p.blew_up && p.gap > 0.0) pts.emplace_back(p.tau, p.gap);
    }
    SchemeSeedFit f;
    f.scheme = SchemeKind::Resonance;
    f.seed = cfg.seeds[static_cast<size_t>(di)];
    if (pts.size() >= 3) {
      f.fit = rate_fit(pts);
      f.has_fit = true;
    }
    report.fits.push_back(f);
    (void)slopes;
  }
  std::vector<double> all_slopes;
  for (const auto& f : report.fits)
    if (f.has_fit) all_slopes.push_back(f.fit.slope);
  report.median_slope = median(all_slopes);
  return report;
}

struct LocalErrorPoint {
  SchemeKind scheme;
  double tau;
  double defect;  // || one step - fine projected solve over one step ||_L2
};

struct LocalErrorReport {
  ExperimentConfig cfg;
  std::vector<LocalErrorPoint> points;  // scheme-major, ladder order
  std::vector<SchemeSeedFit> fits;      // one per scheme (seed field carries cfg seed)
};

/** One-step defect against the projected flow: for each tau, compare a
 * single step of each scheme with a Richardson-extrapolated fine solve
 * (steps tau/refine and tau/(2 refine), filter frozen at this tau's cutoff)
 * of the projected equation over [0, tau].  The extrapolation keeps the
 * reference's own O(tau_fine) error from polluting the O(tau^2) defect.
 */
inline LocalErrorReport local_error_study(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg, false);
  if (cfg.local_refine < 16)
    throw std::invalid_argument("config: local_refine must be >= 16");
  LocalErrorReport report;
  report.cfg = cfg;

  uint64_t seed = cfg.seeds.front();
  SpectralField u0 = make_initial_datum(cfg, seed);
  SchemeSpec ref_spec{SchemeKind::Resonance, PsiChoice::Resonance, 64};

  int L = static_cast<int>(cfg.tau_ladder.size());
  int S = static_cast<int>(cfg.schemes.size());
  // Fine references are shared across schemes: one job per ladder entry.
  std::vector<SpectralField> fine(static_cast<size_t>(L));
  run_parallel(L, cfg.jobs, [&](int ti) {
    double tau = cfg.tau_ladder[static_cast<size_t>(ti)];
    StepOptions opts;
    opts.cutoff_override = filter_cutoff(tau);
    opts.nonlinearity_enabled = cfg.nonlinearity;
    StepContext ctx_a = make_step_context(cfg.grid, tau / cfg.local_refine, opts);
    StepContext ctx_b = make_step_context(cfg.grid, tau / (2.0 * cfg.local_refine), opts);
    SpectralField ua = evolve(ctx_a, ref_spec, u0, cfg.local_refine);
    SpectralField ub = evolve(ctx_b, ref_spec, u0, 2 * cfg.local_refine);
    fine[static_cast<size_t>(ti)] = axpy(-1.0, ua, scale(2.0, ub));
  });

  report.points.resize(static_cast<size_t>(S * L));
  run_parallel(S * L, cfg.jobs, [&](int j) {
    int si = j / L, ti = j % L;
    double tau = cfg.tau_ladder[static_cast<size_t>(ti)];
    StepOptions opts;
    opts.nonlinearity_enabled = cfg.nonlinearity;
    StepContext ctx = make_step_context(cfg.grid, tau, opts);
    SchemeSpec spec{cfg.schemes[static_cast<size_t>(si)], PsiChoice::Resonance, 64};
    SpectralField u1 = step(ctx, spec, u0);
    report.points[static_cast<size_t>(j)] = {spec.kind, tau,
                                             l2_distance(u1, fine[static_cast<size_t>(ti)])};
  });

  auto [w0, w1] = fit_window(cfg);
  for (int si = 0; si < S; ++si) {
    std::vector<std::pair<double, double>> pts;
    for (int ti = w0; ti <= w1; ++ti) {
      const LocalErrorPoint& p = report.points[static_cast<size_t>(si * L + ti)];
      if (p.defect > 0.0) pts.emplace_back(p.tau, p.defect);
    }
    SchemeSeedFit f;
    f.scheme = cfg.schemes[static_cast<size_t>(si)];
    f.seed = seed;
    if (pts.size() >= 3) {
      f.fit = rate_fit(pts);
      f.has_fit = true;
    }
    report.fits.push_back(f);
  }
  return report;
}

}  // namespace kdvlab
