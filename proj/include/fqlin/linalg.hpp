#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"
#include "fqlin/gf.hpp"
#include "fqlin/rng.hpp"

namespace fqlin {

/// Basis of ker(A) plus, when A x = y is solvable, one particular solution.
struct KernelBasis {
  Field field;
  std::size_t n = 0;
  std::vector<std::vector<Element>> vectors;
  std::optional<std::vector<Element>> particular_solution;

  std::size_t nullity() const noexcept { return vectors.size(); }
};

struct Elimination {
  std::size_t rank = 0;
  std::size_t nullity = 0;
  bool solvable = false;
  KernelBasis basis;  // empty vectors when the basis was not requested
};

struct EliminateOptions {
  bool kernel_basis = true;
  /// Column processing order (a permutation of [n]); empty means 0..n-1.
  std::span<const std::size_t> column_order = {};
};

namespace detail {

// Row-major GF(2) matrix, 64 columns per word; column n holds the rhs.
class BitRows {
 public:
  BitRows(std::size_t m, std::size_t cols) : words_((cols + 63) / 64), rows_(m, std::vector<std::uint64_t>(words_, 0)) {}

  std::size_t m() const noexcept { return rows_.size(); }
  unsigned get(std::size_t r, std::size_t c) const noexcept { return (rows_[r][c >> 6] >> (c & 63)) & 1U; }
  void set(std::size_t r, std::size_t c, unsigned v) noexcept {
    const auto bit = std::uint64_t{1} << (c & 63);
    if (v)
      rows_[r][c >> 6] |= bit;
    else
      rows_[r][c >> 6] &= ~bit;
  }
  void swap_rows(std::size_t a, std::size_t b) noexcept { rows_[a].swap(rows_[b]); }
  void normalize(std::size_t, std::size_t) noexcept {}
  void eliminate_column(std::size_t pivot, std::size_t c) noexcept {
    const auto w0 = c >> 6;
    const auto bit = std::uint64_t{1} << (c & 63);
    const auto* src = rows_[pivot].data();
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      if (j == pivot || !(rows_[j][w0] & bit)) continue;
      auto* dst = rows_[j].data();
      for (std::size_t w = w0; w < words_; ++w) dst[w] ^= src[w];
    }
  }
  // Entry as a field code (0 or 1); negation is the identity in F_2.
  std::uint8_t neg_entry(std::size_t r, std::size_t c) const noexcept { return static_cast<std::uint8_t>(get(r, c)); }

 private:
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

// One byte per entry; column n holds the rhs.
class ByteRows {
 public:
  ByteRows(const FiniteField& field, std::size_t m, std::size_t cols)
      : field_(field), cols_(cols), rows_(m, std::vector<std::uint8_t>(cols, 0)), scaled_(field.order()), scaled_ready_(field.order(), 0) {
    for (auto& s : scaled_) s.resize(cols);
  }

  std::size_t m() const noexcept { return rows_.size(); }
  unsigned get(std::size_t r, std::size_t c) const noexcept { return rows_[r][c]; }
  void set(std::size_t r, std::size_t c, unsigned v) noexcept { rows_[r][c] = static_cast<std::uint8_t>(v); }
  void swap_rows(std::size_t a, std::size_t b) noexcept { rows_[a].swap(rows_[b]); }

  void normalize(std::size_t r, std::size_t c) {
    const auto a = rows_[r][c];
    if (a == 1) return;
    const auto* mul = field_.mul_table() + std::size_t{field_.inv_table()[a]} * field_.order();
    auto& row = rows_[r];
    for (std::size_t i = c; i < cols_; ++i) row[i] = mul[row[i]];
  }

  void eliminate_column(std::size_t pivot, std::size_t c) {
    std::fill(scaled_ready_.begin(), scaled_ready_.end(), 0);
    const auto q = field_.order();
    const auto& src = rows_[pivot];
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const auto a = rows_[j][c];
      if (j == pivot || a == 0) continue;
      // row_j += (-a) * row_pivot over columns c..end
      auto& s = scaled_[a];
      if (!scaled_ready_[a]) {
        const auto* mul = field_.mul_table() + std::size_t{field_.neg_table()[a]} * q;
        for (std::size_t i = c; i < cols_; ++i) s[i] = mul[src[i]];
        scaled_ready_[a] = 1;
      }
      add_into(rows_[j].data() + c, s.data() + c, cols_ - c);
    }
  }

  std::uint8_t neg_entry(std::size_t r, std::size_t c) const noexcept { return field_.neg_table()[rows_[r][c]]; }

 private:
  void add_into(std::uint8_t* __restrict dst, const std::uint8_t* __restrict src, std::size_t len) const {
    if (field_.characteristic_two()) {
      for (std::size_t i = 0; i < len; ++i) dst[i] ^= src[i];
    } else if (field_.is_prime_field()) {
      const unsigned p = field_.order();
      for (std::size_t i = 0; i < len; ++i) {
        const unsigned t = unsigned{dst[i]} + src[i];
        dst[i] = static_cast<std::uint8_t>(t >= p ? t - p : t);
      }
    } else {
      const auto* add = field_.add_table();
      const auto q = field_.order();
      for (std::size_t i = 0; i < len; ++i) dst[i] = add[std::size_t{dst[i]} * q + src[i]];
    }
  }

  const FiniteField& field_;
  std::size_t cols_;
  std::vector<std::vector<std::uint8_t>> rows_;
  std::vector<std::vector<std::uint8_t>> scaled_;
  std::vector<char> scaled_ready_;
};

template <class Rows>
Elimination reduce(const SparseLinearSystem& sys, Rows& M, std::span<const std::size_t> order, bool want_basis) {
  const std::size_t n = sys.n;
  const std::size_t m = sys.m();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t i = r;
    while (i < m && M.get(i, c) == 0) ++i;
    if (i == m) continue;
    M.swap_rows(i, r);
    M.normalize(r, c);
    M.eliminate_column(r, c);
    pivots.push_back(c);
    ++r;
  }

  Elimination out;
  out.rank = r;
  out.nullity = n - r;
  out.solvable = true;
  for (std::size_t i = r; i < m; ++i)
    if (M.get(i, n) != 0) {
      out.solvable = false;
      break;
    }
  out.basis.field = sys.field;
  out.basis.n = n;
  if (!want_basis) return out;

  if (out.solvable) {
    std::vector<Element> x(n, FiniteField::zero());
    for (std::size_t i = 0; i < r; ++i) x[order[pivots[i]]] = Element{static_cast<std::uint8_t>(M.get(i, n))};
    out.basis.particular_solution = std::move(x);
  }
  std::vector<char> is_pivot(n, 0);
  for (auto c : pivots) is_pivot[c] = 1;
  out.basis.vectors.reserve(out.nullity);
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Element> v(n, FiniteField::zero());
    v[order[f]] = FiniteField::one();
    for (std::size_t i = 0; i < r; ++i) v[order[pivots[i]]] = Element{M.neg_entry(i, f)};
    out.basis.vectors.push_back(std::move(v));
  }
  return out;
}

template <class Rows>
void load(const SparseLinearSystem& sys, Rows& M, std::span<const std::size_t> column_of) {
  for (std::size_t i = 0; i < sys.m(); ++i) {
    const auto& row = sys.rows[i];
    for (std::size_t h = 0; h < row.positions.size(); ++h) M.set(i, column_of[row.positions[h]], row.coeffs[h].code);
    M.set(i, sys.n, row.rhs.code);
  }
}

}  // namespace detail

/// Gauss-Jordan elimination of [A | y] over F_q: rank, nullity, solvability
/// and (optionally) a kernel basis with a particular solution.
inline Elimination eliminate(const SparseLinearSystem& sys, const EliminateOptions& options = {}) {
  const std::size_t n = sys.n;
  std::vector<std::size_t> order;
  if (options.column_order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    order.assign(options.column_order.begin(), options.column_order.end());
    std::vector<char> seen(n, 0);
    if (order.size() != n) throw InvalidArgument("column order must have length n");
    for (auto c : order) {
      if (c >= n || seen[c]) throw InvalidArgument("column order is not a permutation");
      seen[c] = 1;
    }
  }
  std::vector<std::size_t> column_of(n);
  for (std::size_t c = 0; c < n; ++c) column_of[order[c]] = c;

  if (sys.q() == 2) {
    detail::BitRows M(sys.m(), n + 1);
    detail::load(sys, M, column_of);
    return detail::reduce(sys, M, order, options.kernel_basis);
  }
  detail::ByteRows M(*sys.field, sys.m(), n + 1);
  detail::load(sys, M, column_of);
  return detail::reduce(sys, M, order, options.kernel_basis);
}

/// particular + sum_b c_b * b with uniform coefficients: a uniform element of S(A, y).
inline std::vector<Element> sample_kernel_uniform(const KernelBasis& basis, rng::Engine& g) {
  if (!basis.particular_solution) throw NoSolution();
  const auto& F = *basis.field;
  auto x = *basis.particular_solution;
  for (const auto& b : basis.vectors) {
    const Element c{static_cast<std::uint8_t>(rng::uniform_below(g, F.order()))};
    if (c.code == 0) continue;
    for (std::size_t i = 0; i < basis.n; ++i)
      if (b[i].code != 0) x[i] = F.add(x[i], F.mul(c, b[i]));
  }
  return x;
}

inline std::vector<Element> sample_kernel_uniform(const KernelBasis& basis, std::uint64_t seed) {
  auto g = rng::Engine(rng::derive(seed, 0));
  return sample_kernel_uniform(basis, g);
}

/// One class S_u: members ascending, members[0] the representative, and
/// x[members[t]] = scalars[t] * x[members[0]] for every kernel vector x.
struct KernelClass {
  std::vector<std::size_t> members;
  std::vector<Element> scalars;
};

struct KernelDecomposition {
  unsigned q = 2;
  std::vector<std::size_t> frozen;  // S_0
  std::vector<KernelClass> classes;  // ordered by representative
};

/// Splits [n] into the frozen set and classes of projectively equal
/// kernel-basis columns.
inline KernelDecomposition decompose_kernel(const KernelBasis& basis) {
  const auto& F = *basis.field;
  KernelDecomposition out;
  out.q = F.order();
  std::map<std::vector<std::uint8_t>, std::size_t> class_of;
  std::vector<Element> lead_of_rep;
  std::vector<std::uint8_t> key(basis.nullity());
  for (std::size_t i = 0; i < basis.n; ++i) {
    std::optional<Element> lead;
    for (std::size_t b = 0; b < basis.nullity(); ++b) {
      const auto v = basis.vectors[b][i];
      if (!lead && v.code != 0) lead = v;
      key[b] = v.code;
    }
    if (!lead) {
      out.frozen.push_back(i);
      continue;
    }
    const auto lead_inv = F.inv(*lead);
    for (auto& c : key) c = F.mul(Element{c}, lead_inv).code;
    auto [it, inserted] = class_of.try_emplace(key, out.classes.size());
    if (inserted) {
      out.classes.push_back({{i}, {FiniteField::one()}});
      lead_of_rep.push_back(*lead);
    } else {
      auto& cls = out.classes[it->second];
      cls.members.push_back(i);
      cls.scalars.push_back(F.div(*lead, lead_of_rep[it->second]));
    }
  }
  return out;
}

/// Sum over pairs i < j of || mu_ij - mu_i (x) mu_j ||_TV for a uniform
/// kernel vector: (1 - 1/q) * sum_u C(|S_u|, 2).
inline double symmetry_defect(const KernelDecomposition& d) {
  double pairs = 0.0;
  for (const auto& c : d.classes) {
    const auto s = static_cast<double>(c.members.size());
    pairs += s * (s - 1.0) / 2.0;
  }
  return (1.0 - 1.0 / d.q) * pairs;
}

/// Fraction of trials in which the system pinned at theta - 1 random
/// variables (theta uniform in [T]) has symmetry_defect < epsilon * n^2.
inline double pinning_symmetry_experiment(const SparseLinearSystem& sys, std::size_t T, double epsilon, std::size_t trials,
                                          std::uint64_t seed) {
  if (T == 0 || trials == 0) throw InvalidArgument("T and trials must be >= 1");
  const double n2 = static_cast<double>(sys.n) * static_cast<double>(sys.n);
  std::size_t symmetric = 0;
  std::vector<std::size_t> perm(sys.n);
  for (std::size_t t = 0; t < trials; ++t) {
    auto g = rng::substream(seed, t);
    const auto theta = 1 + static_cast<std::size_t>(rng::uniform_below(g, T));
    if (theta - 1 > sys.n) throw ThetaTooLarge(theta, sys.n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < theta; ++i) std::swap(perm[i], perm[i + rng::uniform_below(g, sys.n - i)]);
    const auto pinned = pin_indices(sys, std::span(perm).first(theta - 1));
    const auto elim = eliminate(pinned);
    if (symmetry_defect(decompose_kernel(elim.basis)) < epsilon * n2) ++symmetric;
  }
  return static_cast<double>(symmetric) / static_cast<double>(trials);
}

/// Empirical joint distribution of coordinate value pairs; freq[s * q + t].
struct OverlapMatrix {
  unsigned q = 2;
  std::vector<double> freq;

  double operator()(unsigned s, unsigned t) const { return freq[std::size_t{s} * q + t]; }
};

inline OverlapMatrix overlap(std::span<const Element> x, std::span<const Element> y, unsigned q) {
  if (x.size() != y.size()) throw LengthMismatch("overlap of vectors with lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  if (x.empty()) throw LengthMismatch("overlap of empty vectors");
  OverlapMatrix w{q, std::vector<double>(std::size_t{q} * q, 0.0)};
  std::vector<std::size_t> counts(std::size_t{q} * q, 0);
  for (std::size_t i = 0; i < x.size(); ++i) ++counts[std::size_t{x[i].code} * q + y[i].code];
  for (std::size_t c = 0; c < counts.size(); ++c) w.freq[c] = static_cast<double>(counts[c]) / static_cast<double>(x.size());
  return w;
}

/// || omega - uniform ||_TV = 1/2 sum |omega_st - q^-2|.
inline double overlap_tv(const OverlapMatrix& w) {
  const double u = 1.0 / (static_cast<double>(w.q) * w.q);
  double s = 0.0;
  for (auto f : w.freq) s += std::abs(f - u);
  return 0.5 * s;
}

}  // namespace fqlin
