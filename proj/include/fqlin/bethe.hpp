#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "fqlin/analytic.hpp"
#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"
#include "fqlin/gf.hpp"
#include "fqlin/linalg.hpp"
#include "fqlin/rng.hpp"

namespace fqlin {

/// phi(alpha) * ln q.
inline double bethe_closed_form(unsigned k, double d, double alpha, unsigned q) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  return analytic::phi(k, d, alpha) * std::log(static_cast<double>(q));
}

struct BetheEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double b_prime = 0.0;   // mean of the single-clause term
  double b_second = 0.0;  // mean of the variable-node term
  std::size_t samples = 0;
};

inline constexpr std::size_t kBetheChunk = 4096;

namespace detail {

// Law of sum_j a_j sigma_j with sigma_j ~ nu_j independent; each nu_j is
// delta_0 (frozen[j]) or uniform on F_q. Exact, by convolution over F_q.
inline void linear_form_law(const FiniteField& F, std::span<const Element> a, std::span<const char> frozen,
                            std::vector<double>& law, std::vector<double>& scratch) {
  const unsigned q = F.order();
  law.assign(q, 0.0);
  law[0] = 1.0;
  scratch.resize(q);
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (frozen[j]) continue;  // sigma_j = 0 contributes nothing
    std::fill(scratch.begin(), scratch.end(), 0.0);
    const double w = 1.0 / q;
    for (unsigned s = 0; s < q; ++s) {
      if (law[s] == 0.0) continue;
      for (unsigned t = 0; t < q; ++t)
        scratch[F.add(Element{static_cast<std::uint8_t>(s)}, F.mul(a[j], Element{static_cast<std::uint8_t>(t)})).code] += law[s] * w;
    }
    law.swap(scratch);
  }
}

}  // namespace detail

/// Monte Carlo estimate of B'' - d(1 - 1/k) B' for pi = alpha delta_{delta_0} + (1 - alpha) delta_{uniform}.
/// Samples are grouped in chunks with their own substreams, so the result does
/// not depend on the thread count.
inline BetheEstimate bethe_mc(unsigned k, double d, double alpha, unsigned q, const RowDistribution& P, std::size_t samples,
                              std::uint64_t seed, unsigned threads = 1) {
  analytic::check_k(k);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(d > 0.0)) throw InvalidArgument("d must be > 0");
  if (samples < 2) throw InvalidArgument("need at least 2 samples");
  const auto field = make_field(q);
  const auto& F = *field;
  P.validate(F, k);

  const std::size_t chunks = (samples + kBetheChunk - 1) / kBetheChunk;
  struct Sums {
    double x = 0, x2 = 0, bp = 0, bs = 0;
  };
  std::vector<Sums> sums(chunks);
  const double weight = d * (1.0 - 1.0 / k);

  auto run_chunk = [&](std::size_t c) {
    auto g = rng::substream(seed, c);
    std::vector<Element> a(k);
    std::vector<char> frozen(k);
    std::vector<double> law, scratch, prod(q);
    const std::size_t begin = c * kBetheChunk, end = std::min(samples, begin + kBetheChunk);
    Sums s;
    for (std::size_t t = begin; t < end; ++t) {
      // B': one clause with all k incoming messages.
      P.draw(F, k, g, a);
      for (auto& f : frozen) f = rng::uniform01(g) < alpha;
      detail::linear_form_law(F, a, frozen, law, scratch);
      const double bp = std::log(law[0]);
      // B'': Po(d) clauses around one variable of value chi.
      const auto gamma = rng::poisson(g, d);
      std::fill(prod.begin(), prod.end(), 1.0);
      for (std::uint64_t i = 0; i < gamma; ++i) {
        P.draw(F, k, g, a);
        for (unsigned j = 0; j + 1 < k; ++j) frozen[j] = rng::uniform01(g) < alpha;
        detail::linear_form_law(F, std::span<const Element>(a).first(k - 1), std::span<const char>(frozen).first(k - 1), law, scratch);
        for (unsigned chi = 0; chi < q; ++chi)
          prod[chi] *= law[F.neg(F.mul(a[k - 1], Element{static_cast<std::uint8_t>(chi)})).code];
      }
      double total = 0.0;
      for (double p : prod) total += p;
      const double bs = std::log(total);
      const double x = bs - weight * bp;
      s.x += x;
      s.x2 += x * x;
      s.bp += bp;
      s.bs += bs;
    }
    sums[c] = s;
  };

  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += threads) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  Sums total;
  for (const auto& s : sums) {
    total.x += s.x;
    total.x2 += s.x2;
    total.bp += s.bp;
    total.bs += s.bs;
  }
  const double N = static_cast<double>(samples);
  BetheEstimate out;
  out.samples = samples;
  out.estimate = total.x / N;
  const double var = std::max(0.0, (total.x2 - N * out.estimate * out.estimate) / (N - 1.0));
  out.stderr_ = std::sqrt(var / N);
  out.b_prime = total.bp / N;
  out.b_second = total.bs / N;
  return out;
}

inline constexpr double kPhiCapitalCap = 1e8;

/// Phi(omega) = ln sum_{a, y} P(a)/q sum_{sigma, tau} 1{a.sigma = a.tau = y} prod_i omega(sigma_i, tau_i),
/// by direct summation over all (sigma_i, tau_i) pairs.
inline double phi_capital(unsigned q, unsigned k, const RowDistribution& P, const OverlapMatrix& omega) {
  if (omega.q != q || omega.freq.size() != std::size_t{q} * q) throw LengthMismatch("overlap matrix is not q x q");
  const auto field = make_field(q);
  const auto& F = *field;
  const auto support = P.ordered_support(F, k);
  const double cost = std::pow(static_cast<double>(q), 2.0 * k + 1.0) * static_cast<double>(support.size());
  if (cost > kPhiCapitalCap) throw ComplexityGuard("Phi(omega) direct summation exceeds 1e8 terms");

  const unsigned q2 = q * q;
  double total = 0.0;
  std::vector<unsigned> pair(k, 0);
  for (const auto& [a, pa] : support) {
    // Enumerate (sigma_i, tau_i) in F_q^2 for each coordinate as an odometer.
    std::fill(pair.begin(), pair.end(), 0U);
    double inner = 0.0;
    for (;;) {
      Element ls = FiniteField::zero(), lt = FiniteField::zero();
      double w = 1.0;
      for (unsigned i = 0; i < k; ++i) {
        const Element s{static_cast<std::uint8_t>(pair[i] / q)}, t{static_cast<std::uint8_t>(pair[i] % q)};
        ls = F.add(ls, F.mul(Element{a[i]}, s));
        lt = F.add(lt, F.mul(Element{a[i]}, t));
        w *= omega.freq[pair[i]];
      }
      if (ls == lt) inner += w;  // exactly one y matches
      unsigned i = 0;
      while (i < k && pair[i] == q2 - 1) pair[i++] = 0;
      if (i == k) break;
      ++pair[i];
    }
    total += pa / q * inner;
  }
  return std::log(total);
}

/// The uniform overlap matrix omega-bar.
inline OverlapMatrix uniform_overlap(unsigned q) {
  return OverlapMatrix{q, std::vector<double>(std::size_t{q} * q, 1.0 / (static_cast<double>(q) * q))};
}

}  // namespace fqlin
