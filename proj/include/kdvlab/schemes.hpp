#pragma once
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/field.hpp"
#include "kdvlab/grid.hpp"
#include "kdvlab/multiplier.hpp"
#include "kdvlab/product.hpp"
#include "kdvlab/quadrature.hpp"

namespace kdvlab {

enum class SchemeKind { ExpIntegrator, LieSplitting, Resonance, QuadratureOracle };

// psi-multiplier choice for the quadrature stepper; each selection makes the
// unified increment reproduce one of the closed-form schemes.
enum class PsiChoice { ExpIntegrator, LieSplitting, Resonance };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::Resonance;
  PsiChoice psi_choice = PsiChoice::Resonance;  // used iff kind == QuadratureOracle
  int n_quad = 64;
};

inline std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ExpIntegrator: return "exp_integrator";
    case SchemeKind::LieSplitting: return "lie_splitting";
    case SchemeKind::Resonance: return "resonance";
    case SchemeKind::QuadratureOracle: return "quadrature_oracle";
  }
  return "unknown";
}

struct StepOptions {
  // Filter cutoff override in modes; < 0 derives the cutoff from tau.
  // Freezing it open (grid full band) or to a coarser step's cutoff is how
  // the reference and projected-equation solves are built.
  int cutoff_override = -1;
  // Expert switch: drop the nonlinear increment entirely (free flow only).
  bool nonlinearity_enabled = true;
};

/** Immutable per-(tau, grid) step state: the filter cutoff in force and the
 * cached multipliers every step reuses.  Rebuilding from the same inputs
 * reproduces the symbols bit-exactly.
 */
struct StepContext {
  double tau = 0.0;
  GridSpec grid;
  int cutoff = 0;
  bool nonlinearity_enabled = true;
  Multiplier free_flow;  // e^{-tau dx^3}
  Multiplier pi;         // sharp filter at `cutoff`
  Multiplier phi1_op;    // phi1(tau dx^3)
  Multiplier deriv;      // dx
};

inline StepContext make_step_context(const GridSpec& grid, double tau,
                                     const StepOptions& opts = {}) {
  validate_grid(grid);
  if (!(tau > 0.0)) throw std::invalid_argument("make_step_context: tau must be > 0");
  StepContext ctx;
  ctx.tau = tau;
  ctx.grid = grid;
  ctx.cutoff = opts.cutoff_override >= 0 ? opts.cutoff_override : filter_cutoff(tau);
  ctx.nonlinearity_enabled = opts.nonlinearity_enabled;
  ctx.free_flow = make_free_flow(tau, grid);
  ctx.pi = opts.cutoff_override >= 0 ? make_band_filter(opts.cutoff_override, grid)
                                     : make_pi_tau(tau, grid);
  ctx.phi1_op = make_phi1(tau, grid);
  ctx.deriv = make_derivative(grid);
  return ctx;
}

/** Filtered exponential integrator:
 * u+ = e^{-tau dx^3} [u - (tau/2) phi1(tau dx^3) Pi dx (Pi u)^2].
 */
inline SpectralField step_exp_integrator(const StepContext& ctx, const SpectralField& u) {
  if (!ctx.nonlinearity_enabled) return apply_multiplier(ctx.free_flow, u);
  SpectralField v = apply_multiplier(ctx.pi, u);
  SpectralField w = product_dealiased(v, v);
  w = apply_multiplier(ctx.deriv, w);
  w = apply_multiplier(ctx.pi, w);
  w = apply_multiplier(ctx.phi1_op, w);
  return apply_multiplier(ctx.free_flow, axpy(-0.5 * ctx.tau, w, u));
}

/** Filtered Lie splitting (Lawson):
 * u+ = e^{-tau dx^3} [u - (tau/2) Pi dx (Pi u)^2].
 */
inline SpectralField step_lie_splitting(const StepContext& ctx, const SpectralField& u) {
  if (!ctx.nonlinearity_enabled) return apply_multiplier(ctx.free_flow, u);
  SpectralField v = apply_multiplier(ctx.pi, u);
  SpectralField w = product_dealiased(v, v);
  w = apply_multiplier(ctx.deriv, w);
  w = apply_multiplier(ctx.pi, w);
  return apply_multiplier(ctx.free_flow, axpy(-0.5 * ctx.tau, w, u));
}

/** Filtered resonance scheme:
 * u+ = e^{-tau dx^3} u - (1/6) Pi (e^{-tau dx^3} dxinv Pi u)^2
 *                       + (1/6) Pi e^{-tau dx^3} (dxinv Pi u)^2.
 * The two squares share their zero mode (phases at k and -k cancel), so the
 * increment's k = 0 bin is set to exactly zero, which is the cancellation
 * the closed form owns rather than a projection.
 */
inline SpectralField step_resonance(const StepContext& ctx, const SpectralField& u) {
  if (!ctx.nonlinearity_enabled) return apply_multiplier(ctx.free_flow, u);
  SpectralField a = dx_inv(apply_multiplier(ctx.pi, u));
  SpectralField b = apply_multiplier(ctx.free_flow, a);
  SpectralField t1 = apply_multiplier(ctx.pi, product_dealiased(b, b));
  SpectralField t2 =
      apply_multiplier(ctx.pi, apply_multiplier(ctx.free_flow, product_dealiased(a, a)));
  SpectralField incr = axpy(-1.0, t1, t2);  // t2 - t1
  incr.coeff[0] = cplx(0.0, 0.0);
  return axpy(1.0 / 6.0, incr, apply_multiplier(ctx.free_flow, u));
}

/** Unified one-step map through the Duhamel increment
 * Psi_tau(v) = -(1/2) int_0^tau psi1(s, dx) dx (psi2(s, dx) v)^2 ds,
 * u+ = e^{-tau dx^3} [u + Pi Psi_tau(Pi u)], with the s-integral replaced by
 * n_quad-point Gauss-Legendre.  Serves as the cross-validation oracle for
 * the three closed forms under their psi selections.
 */
inline SpectralField step_quadrature_oracle(const StepContext& ctx, const SchemeSpec& spec,
                                            const SpectralField& u) {
  if (spec.kind != SchemeKind::QuadratureOracle)
    throw std::invalid_argument("step_quadrature_oracle: spec.kind must be QuadratureOracle");
  if (spec.n_quad < 4) throw std::invalid_argument("step_quadrature_oracle: n_quad must be >= 4");
  if (!ctx.nonlinearity_enabled) return apply_multiplier(ctx.free_flow, u);

  SpectralField v = apply_multiplier(ctx.pi, u);
  QuadratureRule rule = gauss_legendre_on(ctx.tau, spec.n_quad);
  SpectralField acc(ctx.grid);
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    double s = rule.nodes[q];
    SpectralField g = v;
    if (spec.psi_choice == PsiChoice::Resonance) g = apply_multiplier(make_exp_dx3(-s, ctx.grid), g);
    SpectralField p = product_dealiased(g, g);
    p = apply_multiplier(ctx.deriv, p);
    if (spec.psi_choice == PsiChoice::ExpIntegrator || spec.psi_choice == PsiChoice::Resonance)
      p = apply_multiplier(make_exp_dx3(s, ctx.grid), p);
    acc = axpy(rule.weights[q], p, acc);
  }
  SpectralField incr = apply_multiplier(ctx.pi, scale(-0.5, acc));
  return apply_multiplier(ctx.free_flow, add(u, incr));
}

inline SpectralField step(const StepContext& ctx, const SchemeSpec& spec, const SpectralField& u) {
  switch (spec.kind) {
    case SchemeKind::ExpIntegrator: return step_exp_integrator(ctx, u);
    case SchemeKind::LieSplitting: return step_lie_splitting(ctx, u);
    case SchemeKind::Resonance: return step_resonance(ctx, u);
    case SchemeKind::QuadratureOracle: return step_quadrature_oracle(ctx, spec, u);
  }
  throw std::logic_error("step: unhandled scheme kind");
}

// Raised on the first non-finite coefficient after a step.
struct BlowUpError : std::runtime_error {
  int step_index;
  explicit BlowUpError(int n)
      : std::runtime_error("blow-up detected after step " + std::to_string(n)),
        step_index(n) {}
  BlowUpError(const std::string& msg, int n) : std::runtime_error(msg), step_index(n) {}
};

using StepObserver = std::function<void(int, const SpectralField&)>;

/** Applies the selected step n_steps times.  Observers run after each step
 * with (step index, state).  Non-finite state aborts with BlowUpError naming
 * the step; rough-data runs at coarse tau may do this legitimately and the
 * harness records them as missing points.
 */
inline SpectralField evolve(const StepContext& ctx, const SchemeSpec& spec,
                            const SpectralField& u0, int n_steps,
                            const std::vector<StepObserver>& observers = {}) {
  if (n_steps < 0) throw std::invalid_argument("evolve: n_steps must be >= 0");
  SpectralField u = u0;
  for (int n = 1; n <= n_steps; ++n) {
    u = step(ctx, spec, u);
    if (!all_finite(u)) throw BlowUpError(n);
    for (const auto& obs : observers) obs(n, u);
  }
  return u;
}

}  // namespace kdvlab
