#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "fqlin/errors.hpp"

namespace fqlin::stats {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for successes / trials (z = 1.96 gives 95%).
inline Interval wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  // The bounds are exactly 0 and 1 at the extremes; rounding would leave them off by an ulp.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

inline MeanSe mean_se(std::span<const double> xs) {
  MeanSe out;
  out.count = xs.size();
  if (xs.empty()) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return out;
}

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Upper tail of the chi-square law with dof degrees of freedom.
inline double chi_square_tail(double statistic, std::size_t dof) {
  if (dof == 0) throw InvalidArgument("chi-square test needs at least 1 degree of freedom");
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

/// Pearson statistic of observed counts against expected counts; cells with
/// zero expectation must be empty and are skipped.
inline ChiSquare chi_square(std::span<const std::size_t> observed, std::span<const double> expected, std::size_t dof) {
  if (observed.size() != expected.size()) throw LengthMismatch("observed and expected counts differ in length");
  ChiSquare out;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double o = static_cast<double>(observed[i]);
    if (expected[i] == 0.0) {
      if (observed[i] != 0) throw InvalidArgument("observation in a cell with zero expectation");
      continue;
    }
    out.statistic += (o - expected[i]) * (o - expected[i]) / expected[i];
  }
  out.dof = dof;
  out.p_value = chi_square_tail(out.statistic, dof);
  return out;
}

/// Pearson goodness-of-fit of observed counts against the uniform law on the cells.
inline ChiSquare chi_square_uniform(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw InvalidArgument("chi-square test needs at least 2 cells");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const std::vector<double> expected(counts.size(), total / static_cast<double>(counts.size()));
  return chi_square(counts, expected, counts.size() - 1);
}

}  // namespace fqlin::stats
