#pragma once

#include <span>
#include <vector>

namespace semorder {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  ///< NaN when fewer than two values
  double se = 0.0;  ///< sd / sqrt(count), NaN when sd is
  double q90 = 0.0;
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  ///< NaN with fewer than three points
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x.
SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares slope of log(y) against log(x).
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace semorder
