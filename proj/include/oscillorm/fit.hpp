#pragma once

// Least-squares power-law fits  y ~ c * x^slope  on log-log axes.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "oscillorm/errors.hpp"

namespace oscillorm {

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;      // log of the prefactor
  double max_residual = 0.0;   // max |log y - fit| over the points
  std::vector<double> ladder;  // the abscissae used
};

// Fit log(norm) against log(N).  Requires at least `min_points` pairs with a
// strictly increasing ladder and positive values.
inline ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs,
                                std::size_t min_points = 4) {
  if (pairs.size() < min_points) {
    throw DomainError("fit_exponent needs at least " + std::to_string(min_points) + " points");
  }
  ExponentFit fit;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [x, y] = pairs[i];
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("fit_exponent: ladder values must be positive");
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("fit_exponent: norms must be positive and finite");
    if (i > 0 && !(x > pairs[i - 1].first)) throw DomainError("fit_exponent: ladder must be strictly increasing");
    fit.ladder.push_back(x);
    sx += std::log(x);
    sy += std::log(y);
  }
  const double m = static_cast<double>(pairs.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : pairs) {
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(std::log(y) - fit.intercept - fit.slope * std::log(x)));
  }
  return fit;
}

}  // namespace oscillorm
