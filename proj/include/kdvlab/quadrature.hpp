#pragma once
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kdvlab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/** Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on the Legendre
 * recurrence from the Chebyshev-like initial guess.  Exact for polynomials
 * of degree 2n - 1; n = 64 integrates the schemes' oscillatory kernels
 * (at most a few radians over the step) to machine precision.
 */
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<size_t>(n));
  rule.weights.resize(static_cast<size_t>(n));
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<size_t>(i)] = -x;
    rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[static_cast<size_t>(i)] = w;
    rule.weights[static_cast<size_t>(n - 1 - i)] = w;
  }
  return rule;
}

// Same rule affinely mapped to [0, h].
inline QuadratureRule gauss_legendre_on(double h, int n) {
  QuadratureRule rule = gauss_legendre(n);
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = 0.5 * h * (rule.nodes[i] + 1.0);
    rule.weights[i] *= 0.5 * h;
  }
  return rule;
}

}  // namespace kdvlab
