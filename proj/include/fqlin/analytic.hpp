#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "fqlin/errors.hpp"

namespace fqlin::analytic {

inline constexpr double kIterationTol = 1e-12;
inline constexpr double kBisectionTol = 1e-9;
inline constexpr double kFiniteDifferenceTol = 1e-4;
inline constexpr double kCollapse = 1e-9;
inline constexpr long kMaxIterations = 200'000'000;

inline void check_k(unsigned k) {
  if (k < 3) throw InvalidArgument("k must be >= 3");
}

/// f(x) = 1 - exp(-d x^(k-1)).
inline double fixed_point_map(unsigned k, double d, double x) { return -std::expm1(-d * std::pow(x, k - 1.0)); }

/// Largest fixed point of f in [0, 1]; 0 when the only fixed point is 0.
inline double rho(unsigned k, double d) {
  check_k(k);
  if (!(d > 0.0)) return 0.0;
  // Iterates decrease monotonically from 1 to the largest fixed point. Stop
  // once f(x - tol) > x - tol, which brackets a fixed point in [x - tol, x].
  double x = 1.0;
  for (long t = 0; t < kMaxIterations; ++t) {
    const double next = fixed_point_map(k, d, x);
    if (next < kCollapse) return 0.0;
    const double probe = x - kIterationTol;
    if (next >= x) return x;
    if (fixed_point_map(k, d, probe) > probe) return next;  // rho lies in [next, x]
    x = next;
  }
  return x;
}

/// h(mu) = mu / (1 - e^-mu)^(k-1).
inline double h(unsigned k, double mu) { return mu / std::pow(-std::expm1(-mu), k - 1.0); }

namespace detail {

// Minimizer of a unimodal function on [a, b].
template <class F>
double golden_min(F&& fn, double a, double b, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace detail

/// mu* = argmin h.
inline double mu_star(unsigned k) {
  check_k(k);
  return detail::golden_min([k](double mu) { return h(k, mu); }, 1e-6, 50.0);
}

/// Dynamical threshold inf{d : rho_{k,d} > 0} = h(mu*).
inline double d_k_star(unsigned k) { return h(k, mu_star(k)); }

/// The same threshold located by bisection on the predicate rho(k, d) > 0.
inline double d_k_star_by_bisection(unsigned k) {
  check_k(k);
  double lo = 1e-3, hi = 2.0;
  while (rho(k, hi) == 0.0) hi *= 2.0;
  while (hi - lo > kBisectionTol) {
    const double mid = (lo + hi) / 2.0;
    (rho(k, mid) > 0.0 ? hi : lo) = mid;
  }
  return (lo + hi) / 2.0;
}

/// rho - d rho^(k-1) + (1 - 1/k) d rho^k; its sign change is the satisfiability threshold.
inline double threshold_expression(unsigned k, double d) {
  const double r = rho(k, d);
  return r - d * std::pow(r, k - 1.0) + (1.0 - 1.0 / k) * d * std::pow(r, k);
}

/// Satisfiability threshold d_k.
inline double d_k(unsigned k) {
  const double star = d_k_star(k);
  double lo = star, hi = star + 10.0;
  while (hi - lo > kBisectionTol) {
    const double mid = (lo + hi) / 2.0;
    (threshold_expression(k, mid) < 0.0 ? hi : lo) = mid;
  }
  return (lo + hi) / 2.0;
}

/// Predicted core size fractions (n_star / n, m_star / n).
inline std::pair<double, double> core_fractions(unsigned k, double d) {
  const double r = rho(k, d);
  if (r == 0.0) return {0.0, 0.0};
  return {r - d * std::pow(r, k - 1.0) + d * std::pow(r, k), d * std::pow(r, k) / k};
}

/// Core rows per core variable, m_star / n_star.
inline double pi_k(unsigned k, double d) {
  const auto [ns, ms] = core_fractions(k, d);
  if (ns <= 0.0) throw OutOfRegime("pi_k needs a non-empty core (d > d_k_star)");
  return ms / ns;
}

inline double phi(unsigned k, double d, double alpha) {
  const double a1 = std::pow(alpha, k - 1.0);
  return std::exp(-d * a1) + d * a1 - d * (k - 1.0) / k * alpha * a1 - d / k;
}

/// Smaller positive (unstable) fixed point of f, if one exists below rho.
inline std::optional<double> unstable_fixed_point(unsigned k, double d) {
  const double r = rho(k, d);
  if (r == 0.0) return std::nullopt;
  auto g = [&](double x) { return fixed_point_map(k, d, x) - x; };
  // g is concave right of the inflection point of f, so its maximum there is unimodal.
  const double xw = std::min(std::pow((k - 2.0) / (d * (k - 1.0)), 1.0 / (k - 1.0)), r);
  const double x2 = detail::golden_min([&](double x) { return -g(x); }, xw, r);
  if (!(g(x2) > 0.0)) return std::nullopt;
  double lo = x2 * 1e-6, hi = x2;
  if (!(g(lo) < 0.0)) return std::nullopt;
  while (hi - lo > kIterationTol) {
    const double mid = (lo + hi) / 2.0;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

struct PhiMax {
  double value = 0.0;
  double argmax = 0.0;
};

/// max of phi over its critical points and the endpoints; ties keep the smaller alpha.
inline PhiMax phi_max(unsigned k, double d) {
  check_k(k);
  std::vector<double> candidates{0.0};
  if (auto u = unstable_fixed_point(k, d)) candidates.push_back(*u);
  if (const double r = rho(k, d); r > 0.0) candidates.push_back(r);
  candidates.push_back(1.0);
  PhiMax best{phi(k, d, 0.0), 0.0};
  for (double a : candidates)
    if (const double v = phi(k, d, a); v > best.value) best = {v, a};
  return best;
}

/// Limit of rk(A) / m above the satisfiability threshold.
inline double rank_fraction(unsigned k, double d) {
  if (d <= d_k(k)) throw BelowThreshold("rank fraction formula needs d > d_k; below it rk(A) = m");
  const double r = rho(k, d);
  return 1.0 + (k / d) * r - k * std::pow(r, k - 1.0) + (k - 1.0) * std::pow(r, k);
}

/// Per-ln-q exponent of the number of solution clusters, for d_k_star < d < d_k.
inline double cluster_exponent(unsigned k, double d) {
  if (!(d > d_k_star(k) && d < d_k(k))) throw OutOfRegime("cluster exponent needs d_k_star < d < d_k");
  return threshold_expression(k, d);
}

struct ThresholdReport {
  unsigned k = 3;
  double d_k_star = 0.0;
  double mu_star = 0.0;
  double d_k = 0.0;
  struct AtD {
    double d = 0.0;
    double rho = 0.0;
    double phi_max = 0.0;
    double phi_argmax = 0.0;
    double n_star_frac = 0.0;
    double m_star_frac = 0.0;
    std::optional<double> rank_frac;         // only above d_k
    std::optional<double> cluster_exponent;  // only in (d_k_star, d_k)
    std::optional<double> pi_k;              // only with a non-empty core
  };
  std::optional<AtD> at;
};

inline ThresholdReport threshold_report(unsigned k, std::optional<double> d = std::nullopt) {
  check_k(k);
  ThresholdReport rep;
  rep.k = k;
  rep.mu_star = mu_star(k);
  rep.d_k_star = h(k, rep.mu_star);
  rep.d_k = d_k(k);
  if (d) {
    if (!(*d > 0.0)) throw InvalidArgument("d must be > 0");
    ThresholdReport::AtD a;
    a.d = *d;
    a.rho = rho(k, *d);
    const auto pm = phi_max(k, *d);
    a.phi_max = pm.value;
    a.phi_argmax = pm.argmax;
    std::tie(a.n_star_frac, a.m_star_frac) = core_fractions(k, *d);
    if (*d > rep.d_k) a.rank_frac = 1.0 + (k / *d) * a.rho - k * std::pow(a.rho, k - 1.0) + (k - 1.0) * std::pow(a.rho, k);
    if (*d > rep.d_k_star && *d < rep.d_k) a.cluster_exponent = threshold_expression(k, *d);
    if (a.n_star_frac > 0.0) a.pi_k = a.m_star_frac / a.n_star_frac;
    rep.at = a;
  }
  return rep;
}

/// F(z) for the second moment of the number of solutions, q = 2.
inline double second_moment_exponent(unsigned k, double d, double z) {
  const double entropy = -z * std::log(z) - (1.0 - z) * std::log1p(-z);
  return entropy + (d / k) * std::log1p(std::pow(2.0 * z - 1.0, k)) + (1.0 - 2.0 * d / k) * std::log(2.0);
}

struct SecondMomentCurve {
  unsigned k = 3;
  double d = 0.0;
  std::vector<double> z;
  std::vector<double> F;
  double argmax = 0.5;
  double max = 0.0;
};

inline SecondMomentCurve second_moment_curve(unsigned k, double d, std::size_t grid_size) {
  check_k(k);
  if (grid_size < 2) throw InvalidArgument("grid size must be >= 2");
  SecondMomentCurve c{k, d, {}, {}, 0.5, 0.0};
  const double lo = 0.5, hi = 1.0 - 1e-9;
  c.z.resize(grid_size);
  c.F.resize(grid_size);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    c.z[i] = i + 1 == grid_size ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    c.F[i] = second_moment_exponent(k, d, c.z[i]);
    if (c.F[i] > c.F[best]) best = i;
  }
  c.argmax = c.z[best];
  c.max = c.F[best];
  const double a = c.z[best == 0 ? 0 : best - 1];
  const double b = c.z[std::min(best + 1, grid_size - 1)];
  const double z = detail::golden_min([&](double t) { return -second_moment_exponent(k, d, t); }, a, b);
  if (const double v = second_moment_exponent(k, d, z); v > c.max) {
    c.argmax = z;
    c.max = v;
  }
  return c;
}

}  // namespace fqlin::analytic
