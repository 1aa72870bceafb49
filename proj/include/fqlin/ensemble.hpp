#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fqlin/errors.hpp"
#include "fqlin/gf.hpp"
#include "fqlin/rng.hpp"

namespace fqlin {

using Tuple = std::vector<std::uint8_t>;

/// Distribution P of the k non-zero coefficients of a row. Custom weights
/// attach to sorted tuples (multisets); a drawn tuple is uniformly shuffled,
/// which makes P permutation invariant by construction.
class RowDistribution {
 public:
  enum class Kind { UniformNonzero, AllOnes, Custom };

  static RowDistribution uniform_nonzero() { return RowDistribution(Kind::UniformNonzero); }
  static RowDistribution all_ones() { return RowDistribution(Kind::AllOnes); }

  /// Weights must sum to 1 within 1e-12. Tuples are canonicalized by sorting;
  /// duplicates after sorting are merged.
  static RowDistribution custom(const std::vector<std::pair<Tuple, double>>& weights) {
    if (weights.empty()) throw InvalidArgument("custom row distribution is empty");
    RowDistribution d(Kind::Custom);
    std::map<Tuple, double> merged;
    const std::size_t k = weights.front().first.size();
    double total = 0.0;
    for (const auto& [tuple, w] : weights) {
      if (tuple.size() != k || k == 0) throw InvalidArgument("custom row distribution: tuples differ in length");
      if (!(w >= 0.0)) throw InvalidArgument("custom row distribution: negative weight");
      for (auto c : tuple)
        if (c == 0) throw InvalidArgument("custom row distribution: coefficient code 0");
      Tuple sorted = tuple;
      std::sort(sorted.begin(), sorted.end());
      merged[sorted] += w;
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("custom row distribution: weights sum to " + std::to_string(total));
    double cum = 0.0;
    for (auto& [tuple, w] : merged) {
      if (w == 0.0) continue;
      cum += w;
      d.tuples_.push_back(tuple);
      d.weights_.push_back(w);
      d.cumulative_.push_back(cum);
    }
    d.cumulative_.back() = 1.0;
    d.k_ = k;
    return d;
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<Tuple>& custom_tuples() const noexcept { return tuples_; }
  const std::vector<double>& custom_weights() const noexcept { return weights_; }

  /// Checks the distribution can produce rows of weight k over `field`.
  void validate(const FiniteField& field, unsigned k) const {
    if (kind_ != Kind::Custom) return;
    if (k_ != k) throw InvalidArgument("custom row distribution has tuple length " + std::to_string(k_) + ", expected k=" + std::to_string(k));
    for (const auto& t : tuples_)
      for (auto c : t)
        if (!field.contains(c)) throw FieldMismatch("custom row distribution code " + std::to_string(c) + " not in F_" + std::to_string(field.order()));
  }

  void draw(const FiniteField& field, unsigned k, rng::Engine& g, std::span<Element> out) const {
    switch (kind_) {
      case Kind::AllOnes:
        std::fill(out.begin(), out.begin() + k, FiniteField::one());
        return;
      case Kind::UniformNonzero:
        for (unsigned i = 0; i < k; ++i)
          out[i] = Element{static_cast<std::uint8_t>(1 + rng::uniform_below(g, field.order() - 1))};
        return;
      case Kind::Custom: {
        const double u = rng::uniform01(g);
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto& t = tuples_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative_.begin(), tuples_.size() - 1))];
        for (unsigned i = 0; i < k; ++i) out[i] = Element{t[i]};
        rng::shuffle(g, out.first(k));
        return;
      }
    }
  }

  /// P as a list of ordered tuples with their probabilities.
  std::vector<std::pair<Tuple, double>> ordered_support(const FiniteField& field, unsigned k) const {
    std::vector<std::pair<Tuple, double>> out;
    switch (kind_) {
      case Kind::AllOnes:
        out.emplace_back(Tuple(k, 1), 1.0);
        break;
      case Kind::UniformNonzero: {
        const unsigned base = field.order() - 1;
        double count = 1.0;
        for (unsigned i = 0; i < k; ++i) count *= base;
        if (count > 1e7) throw ComplexityGuard("uniform row distribution support too large to enumerate");
        Tuple t(k, 1);
        const double w = 1.0 / count;
        for (;;) {
          out.emplace_back(t, w);
          unsigned i = 0;
          while (i < k && t[i] == base) t[i++] = 1;
          if (i == k) break;
          ++t[i];
        }
        break;
      }
      case Kind::Custom:
        validate(field, k);
        for (std::size_t j = 0; j < tuples_.size(); ++j) {
          Tuple t = tuples_[j];
          std::vector<Tuple> perms;
          do perms.push_back(t);
          while (std::next_permutation(t.begin(), t.end()));
          for (auto& p : perms) out.emplace_back(std::move(p), weights_[j] / static_cast<double>(perms.size()));
        }
        break;
    }
    return out;
  }

 private:
  explicit RowDistribution(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::size_t k_ = 0;
  std::vector<Tuple> tuples_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// One equation sum_h coeffs[h] * x[positions[h]] = rhs. Positions are
/// 0-based and strictly increasing. Pinning rows (x_t = 0) have weight 1 and
/// are flagged so ensemble statistics can skip them.
struct SparseRow {
  std::vector<std::uint32_t> positions;
  std::vector<Element> coeffs;
  Element rhs;
  bool pinned = false;

  std::size_t weight() const noexcept { return positions.size(); }
  friend bool operator==(const SparseRow&, const SparseRow&) = default;
};

struct SparseLinearSystem {
  Field field;
  std::size_t n = 0;
  unsigned k = 0;
  std::vector<SparseRow> rows;

  std::size_t m() const noexcept { return rows.size(); }
  unsigned q() const noexcept { return field->order(); }

  Element evaluate(const SparseRow& row, std::span<const Element> x) const {
    Element acc = FiniteField::zero();
    for (std::size_t h = 0; h < row.positions.size(); ++h)
      acc = field->add(acc, field->mul(row.coeffs[h], x[row.positions[h]]));
    return acc;
  }

  bool satisfied_by(std::span<const Element> x) const {
    if (x.size() != n) throw LengthMismatch("assignment length " + std::to_string(x.size()) + " != n=" + std::to_string(n));
    return std::all_of(rows.begin(), rows.end(), [&](const SparseRow& r) { return evaluate(r, x) == r.rhs; });
  }

  /// Throws InvalidArgument if a row breaks the SparseRow invariants.
  void validate() const {
    if (!field) throw InvalidArgument("system has no field");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const auto where = "row " + std::to_string(i) + ": ";
      if (r.positions.size() != r.coeffs.size()) throw InvalidArgument(where + "positions/coeffs length differ");
      if (r.pinned ? r.positions.size() != 1 : r.positions.size() != k) throw InvalidArgument(where + "wrong row weight");
      for (std::size_t h = 0; h < r.positions.size(); ++h) {
        if (r.positions[h] >= n) throw InvalidArgument(where + "position out of range");
        if (h > 0 && r.positions[h] <= r.positions[h - 1]) throw InvalidArgument(where + "positions not strictly increasing");
        if (r.coeffs[h].code == 0 || !field->contains(r.coeffs[h].code)) throw InvalidArgument(where + "invalid coefficient");
      }
      if (!field->contains(r.rhs.code)) throw InvalidArgument(where + "invalid rhs");
    }
  }

  friend bool operator==(const SparseLinearSystem& a, const SparseLinearSystem& b) {
    return a.field->order() == b.field->order() && a.n == b.n && a.k == b.k && a.rows == b.rows;
  }
};

struct EnsembleParams {
  unsigned q = 2;
  unsigned k = 3;
  std::size_t n = 0;
  double d = 0.0;
  RowDistribution dist = RowDistribution::uniform_nonzero();
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 3) throw InvalidArgument("k must be >= 3");
    if (n < k) throw InvalidArgument("n must be >= k");
    if (!(d > 0.0)) throw InvalidArgument("d must be > 0");
  }
};

namespace stream {
inline constexpr std::uint64_t kRowCount = ~std::uint64_t{0};
inline constexpr std::uint64_t kPlanted = ~std::uint64_t{0} - 1;
}  // namespace stream

/// k distinct uniform positions in [0, n), sorted.
inline void draw_positions(rng::Engine& g, std::size_t n, unsigned k, std::vector<std::uint32_t>& out) {
  out.clear();
  while (out.size() < k) {
    const auto p = static_cast<std::uint32_t>(rng::uniform_below(g, n));
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
}

/// m ~ Po(dn/k), drawn from its own substream of `seed`.
inline std::size_t draw_row_count(std::uint64_t seed, std::size_t n, unsigned k, double d) {
  auto g = rng::substream(seed, stream::kRowCount);
  return static_cast<std::size_t>(rng::poisson(g, d * static_cast<double>(n) / k));
}

/// Rows 0..m-1 of the ensemble with per-row substreams; the order of draws
/// within a row is positions, coefficients, rhs.
inline SparseLinearSystem sample_rows(Field field, std::size_t n, unsigned k, const RowDistribution& dist,
                                      std::uint64_t seed, std::size_t m) {
  dist.validate(*field, k);
  SparseLinearSystem sys{field, n, k, {}};
  sys.rows.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto g = rng::substream(seed, i);
    auto& row = sys.rows[i];
    draw_positions(g, n, k, row.positions);
    row.coeffs.resize(k);
    dist.draw(*field, k, g, row.coeffs);
    row.rhs = Element{static_cast<std::uint8_t>(rng::uniform_below(g, field->order()))};
  }
  return sys;
}

inline SparseLinearSystem sample_system(const EnsembleParams& params) {
  params.validate();
  auto field = make_field(params.q);
  const auto m = draw_row_count(params.seed, params.n, params.k, params.d);
  return sample_rows(std::move(field), params.n, params.k, params.dist, params.seed, m);
}

inline std::vector<Element> uniform_vector(const FiniteField& field, std::size_t n, rng::Engine& g) {
  std::vector<Element> x(n);
  for (auto& v : x) v = Element{static_cast<std::uint8_t>(rng::uniform_below(g, field.order()))};
  return x;
}

/// Replaces every rhs by A x_hat for a uniform x_hat.
inline std::vector<Element> plant(SparseLinearSystem& sys, std::uint64_t seed) {
  auto g = rng::substream(seed, stream::kPlanted);
  auto x = uniform_vector(*sys.field, sys.n, g);
  for (auto& row : sys.rows) {
    row.rhs = FiniteField::zero();
    row.rhs = sys.evaluate(row, x);
  }
  return x;
}

struct PlantedSystem {
  SparseLinearSystem system;
  std::vector<Element> planted_x;
};

/// Same law for A as sample_system; y = A x_hat.
inline PlantedSystem sample_planted(const EnsembleParams& params) {
  auto sys = sample_system(params);
  auto x = plant(sys, params.seed);
  return {std::move(sys), std::move(x)};
}

/// Appends the pinning rows x_i = 0 for each listed (0-based, distinct) index.
inline SparseLinearSystem pin_indices(const SparseLinearSystem& sys, std::span<const std::size_t> indices) {
  SparseLinearSystem out = sys;
  out.rows.reserve(sys.rows.size() + indices.size());
  for (auto i : indices) {
    if (i >= sys.n) throw InvalidArgument("pin index out of range");
    out.rows.push_back(SparseRow{{static_cast<std::uint32_t>(i)}, {FiniteField::one()}, FiniteField::zero(), true});
  }
  return out;
}

/// Appends theta - 1 pinning rows x_1 = 0, ..., x_{theta-1} = 0.
inline SparseLinearSystem pin(const SparseLinearSystem& sys, std::size_t theta) {
  if (theta == 0) throw InvalidArgument("theta must be >= 1");
  if (theta - 1 > sys.n) throw ThetaTooLarge(theta, sys.n);
  std::vector<std::size_t> idx(theta - 1);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return pin_indices(sys, idx);
}

}  // namespace fqlin
