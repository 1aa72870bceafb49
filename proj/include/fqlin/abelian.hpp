#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"
#include "fqlin/peel.hpp"
#include "fqlin/rng.hpp"
#include "fqlin/stats.hpp"

namespace fqlin {

/// Finite abelian group given by its cyclic prime-power components Z/q_1 + ... + Z/q_K.
struct GroupSpec {
  std::vector<std::uint64_t> components;

  void validate() const {
    if (components.empty()) throw InvalidArgument("group needs at least one component");
    for (auto q : components) {
      if (q < 2 || q > (std::uint64_t{1} << 31)) throw NotAPrimePower(q);
      std::uint64_t p = 2;
      while (p * p <= q && q % p) ++p;
      if (q % p) p = q;
      std::uint64_t r = q;
      while (r % p == 0) r /= p;
      if (r != 1) throw NotAPrimePower(q);
    }
    if (order() > (std::uint64_t{1} << 62)) throw InvalidArgument("group order too large");
  }

  std::uint64_t order() const {
    std::uint64_t o = 1;
    for (auto q : components) o *= q;
    return o;
  }

  /// Mixed-radix decoding, component 0 least significant.
  std::vector<std::uint64_t> decode(std::uint64_t v) const {
    std::vector<std::uint64_t> out(components.size());
    for (std::size_t c = 0; c < components.size(); ++c) {
      out[c] = v % components[c];
      v /= components[c];
    }
    return out;
  }
};

/// All-ones system sum_h x[positions[h]] = rhs[i] over the group; rhs[i][c] is in Z/q_c.
struct AbelianSystem {
  GroupSpec group;
  std::size_t n = 0;
  unsigned k = 3;
  std::vector<std::vector<std::uint32_t>> positions;
  std::vector<std::vector<std::uint64_t>> rhs;

  std::size_t m() const noexcept { return positions.size(); }
};

namespace detail {

struct Xgcd {
  std::int64_t g, s, t;
};

inline Xgcd xgcd(std::int64_t a, std::int64_t b) {
  std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (b != 0) {
    const auto qt = a / b;
    std::tie(a, b) = std::make_pair(b, a - qt * b);
    std::tie(s0, s1) = std::make_pair(s1, s0 - qt * s1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - qt * t1);
  }
  return {a, s0, t0};
}

inline std::int64_t mod(std::int64_t a, std::int64_t N) {
  a %= N;
  return a < 0 ? a + N : a;
}

}  // namespace detail

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Howell normal form of the row span of M over Z/N: rows in echelon order,
/// pivots dividing N, entries above each pivot reduced modulo it, and closed
/// under annihilators so every prefix-zero subspan is spanned by Howell rows.
inline IntMatrix howell_form(IntMatrix M, std::int64_t N) {
  if (N < 2) throw InvalidArgument("modulus must be >= 2");
  const std::size_t cols = M.empty() ? 0 : M.front().size();
  for (auto& row : M) {
    if (row.size() != cols) throw LengthMismatch("ragged matrix");
    for (auto& v : row) v = detail::mod(v, N);
  }
  IntMatrix H;
  std::vector<std::size_t> pivot_col;
  auto& work = M;
  for (std::size_t c = 0; c < cols; ++c) {
    // Fold every working row with a non-zero entry in column c into one.
    std::size_t acc = work.size();
    for (std::size_t r = 0; r < work.size(); ++r) {
      if (work[r][c] == 0) continue;
      if (acc == work.size()) {
        acc = r;
        continue;
      }
      auto& A = work[acc];
      auto& B = work[r];
      const auto [g, s, t] = detail::xgcd(A[c], B[c]);
      const auto u = A[c] / g, v = B[c] / g;
      for (std::size_t j = c; j < cols; ++j) {
        const auto a = A[j], b = B[j];
        A[j] = detail::mod(s * a + t * b, N);
        B[j] = detail::mod(u * b - v * a, N);
      }
    }
    if (acc == work.size()) continue;
    auto row = std::move(work[acc]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(acc));
    // Scale the pivot to g = gcd(pivot, N) by a unit w = pivot / g (mod N / g).
    const auto g = std::gcd(row[c], N);
    auto w = row[c] / g;
    while (std::gcd(w, N) != 1) w += N / g;
    const auto inv = detail::mod(detail::xgcd(w, N).s, N);
    for (std::size_t j = c; j < cols; ++j) row[j] = detail::mod(row[j] * inv, N);
    // Annihilator row (N / g) * row has a zero in column c.
    std::vector<std::int64_t> ann(cols, 0);
    bool nonzero = false;
    for (std::size_t j = c; j < cols; ++j) {
      ann[j] = detail::mod((N / g) * row[j], N);
      nonzero |= ann[j] != 0;
    }
    if (nonzero) work.push_back(std::move(ann));
    H.push_back(std::move(row));
    pivot_col.push_back(c);
  }
  // Reduce entries above each pivot.
  for (std::size_t i = 0; i < H.size(); ++i) {
    const auto c = pivot_col[i];
    const auto p = H[i][c];
    for (std::size_t j = 0; j < i; ++j) {
      const auto f = H[j][c] / p;
      if (f == 0) continue;
      for (std::size_t t = c; t < cols; ++t) H[j][t] = detail::mod(H[j][t] - f * H[i][t], N);
    }
  }
  return H;
}

/// Solvability of the all-ones system [A | y] over Z/N by Howell form.
inline bool cyclic_solvable(std::size_t n, std::span<const std::vector<std::uint32_t>> positions, std::span<const std::int64_t> y,
                            std::int64_t N) {
  IntMatrix M(positions.size(), std::vector<std::int64_t>(n + 1, 0));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (auto p : positions[i]) M[i][p] = detail::mod(M[i][p] + 1, N);
    M[i][n] = detail::mod(y[i], N);
  }
  for (const auto& row : howell_form(std::move(M), N)) {
    const bool left_zero = std::all_of(row.begin(), row.end() - 1, [](auto v) { return v == 0; });
    if (left_zero && row.back() != 0) return false;
  }
  return true;
}

/// True iff the system has a solution over the whole group. With peel = true
/// the 2-core is computed first; variables peeled off can always absorb the
/// rhs of their row, so only the core is handed to the Howell form.
inline bool abelian_solvable(const AbelianSystem& sys, bool peel_first = true) {
  sys.group.validate();
  if (sys.rhs.size() != sys.positions.size()) throw LengthMismatch("one rhs per row required");
  std::vector<std::size_t> rows(sys.m());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::uint32_t> cols(sys.n);
  std::iota(cols.begin(), cols.end(), std::uint32_t{0});
  if (peel_first) {
    const auto pi = identity_permutation(sys.n);
    auto positions_of = [&](std::size_t r) -> std::span<const std::uint32_t> { return sys.positions[r]; };
    const auto hp = detail::peel_hypergraph(sys.n, sys.m(), positions_of, pi);
    rows.clear();
    cols.clear();
    for (std::size_t r = 0; r < sys.m(); ++r)
      if (hp.row_alive[r]) rows.push_back(r);
    for (std::uint32_t v = 0; v < sys.n; ++v)
      if (hp.var_alive[v]) cols.push_back(v);
  }
  std::vector<std::uint32_t> index(sys.n, 0);
  for (std::uint32_t j = 0; j < cols.size(); ++j) index[cols[j]] = j;
  std::vector<std::vector<std::uint32_t>> pos;
  pos.reserve(rows.size());
  for (auto r : rows) {
    std::vector<std::uint32_t> p;
    for (auto v : sys.positions[r]) p.push_back(index[v]);
    pos.push_back(std::move(p));
  }
  for (std::size_t c = 0; c < sys.group.components.size(); ++c) {
    std::vector<std::int64_t> y;
    y.reserve(rows.size());
    for (auto r : rows) y.push_back(static_cast<std::int64_t>(sys.rhs[r][c]));
    if (!cyclic_solvable(cols.size(), pos, y, static_cast<std::int64_t>(sys.group.components[c]))) return false;
  }
  return true;
}

/// Same position law and substreams as the field sampler with all-ones
/// coefficients; the rhs is uniform on the group, decoded mixed-radix. For
/// the group Z/2 this reproduces the q = 2 all-ones field ensemble exactly.
inline AbelianSystem sample_abelian(const GroupSpec& group, unsigned k, std::size_t n, double d, std::uint64_t seed) {
  group.validate();
  if (k < 3) throw InvalidArgument("k must be >= 3");
  if (n < k) throw InvalidArgument("n must be >= k");
  if (!(d > 0.0)) throw InvalidArgument("d must be > 0");
  AbelianSystem sys{group, n, k, {}, {}};
  const auto m = draw_row_count(seed, n, k, d);
  sys.positions.resize(m);
  sys.rhs.resize(m);
  const auto order = group.order();
  for (std::size_t i = 0; i < m; ++i) {
    auto g = rng::substream(seed, i);
    draw_positions(g, n, k, sys.positions[i]);
    sys.rhs[i] = group.decode(rng::uniform_below(g, order));
  }
  return sys;
}

struct ScanPoint {
  double d = 0.0;
  std::size_t trials = 0;
  std::size_t solvable = 0;
  double probability = 0.0;
  stats::Interval ci;
};

/// Evenly spaced grid of `steps` points from lo to hi (a single point at lo when steps = 1).
inline std::vector<double> d_grid(double lo, double hi, std::size_t steps) {
  if (steps == 0) throw InvalidArgument("steps must be >= 1");
  if (!(lo > 0.0) || hi < lo) throw InvalidArgument("need 0 < d-min <= d-max");
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i) g[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return g;
}

/// Empirical solvability per d; trial t at grid index j uses seed derive(seed, j, t).
inline std::vector<ScanPoint> abelian_scan(const GroupSpec& group, unsigned k, std::size_t n, std::span<const double> grid,
                                           std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  group.validate();
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  std::vector<char> verdict(grid.size() * trials, 0);
  auto task = [&](std::size_t idx) {
    const auto j = idx / trials, t = idx % trials;
    verdict[idx] = abelian_solvable(sample_abelian(group, k, n, grid[j], rng::derive(seed, j, t)));
  };
  threads = std::max(1U, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < verdict.size(); ++i) task(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < verdict.size(); i += threads) task(i);
      });
    for (auto& th : pool) th.join();
  }
  std::vector<ScanPoint> out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ScanPoint p{grid[j], trials, 0, 0.0, {}};
    for (std::size_t t = 0; t < trials; ++t) p.solvable += verdict[j * trials + t];
    p.probability = static_cast<double>(p.solvable) / static_cast<double>(trials);
    p.ci = stats::wilson(p.solvable, trials);
    out.push_back(p);
  }
  return out;
}

}  // namespace fqlin
