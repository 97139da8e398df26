#pragma once
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kdvlab {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log2 of the prefactor
  double residual = 0.0;   // RMS deviation of the fit in log2 space
  int n_points = 0;
};

// Ordinary least squares on (log2 tau, log2 error).
inline RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 points");
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& [tau, err] : points) {
    if (!(tau > 0.0)) throw std::invalid_argument("rate_fit: tau must be > 0");
    if (!(err > 0.0)) throw std::invalid_argument("rate_fit: error must be > 0");
    x.push_back(std::log2(tau));
    y.push_back(std::log2(err));
  }
  double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  RateFit fit;
  fit.n_points = static_cast<int>(x.size());
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace kdvlab
