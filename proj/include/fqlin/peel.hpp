#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"
#include "fqlin/rng.hpp"

namespace fqlin {

struct Removal {
  std::uint32_t variable;
  std::optional<std::size_t> row;  // row removed together with the variable

  friend bool operator==(const Removal&, const Removal&) = default;
};

struct PeelReport {
  std::vector<std::size_t> core_rows;    // ascending row indices
  std::vector<std::uint32_t> core_cols;  // ascending variable indices
  /// Core rows over the core variables, re-indexed so core_cols[j] -> j.
  SparseLinearSystem reduced;
  std::size_t n_star = 0;
  std::size_t m_star = 0;
  std::vector<Removal> removal_order;
};

/// The digraph D(A, pi): an edge (j -> i) for every variable j sharing the
/// row with which i was removed, at the time of removal.
struct PeelTrace {
  std::vector<std::uint32_t> pi;  // pi[i] = priority of variable i
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::vector<std::uint32_t>> successors;
  std::vector<std::uint32_t> indegree_zero;  // F(A, pi), ascending

  std::size_t n() const noexcept { return successors.size(); }
};

inline std::vector<std::uint32_t> identity_permutation(std::size_t n) {
  std::vector<std::uint32_t> pi(n);
  std::iota(pi.begin(), pi.end(), std::uint32_t{0});
  return pi;
}

namespace detail {

struct HypergraphPeel {
  std::vector<char> row_alive;
  std::vector<char> var_alive;
  std::vector<Removal> removal_order;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

inline void check_permutation(std::span<const std::uint32_t> pi, std::size_t n) {
  if (pi.size() != n) throw InvalidArgument("pi must have length n");
  std::vector<char> seen(n, 0);
  for (auto v : pi) {
    if (v >= n || seen[v]) throw InvalidArgument("pi is not a permutation of [n]");
    seen[v] = 1;
  }
}

/// Peels the hypergraph with rows given by positions_of(r), always removing
/// the peelable variable of least priority pi.
template <class PositionsOf>
HypergraphPeel peel_hypergraph(std::size_t n, std::size_t m, PositionsOf&& positions_of, std::span<const std::uint32_t> pi) {
  check_permutation(pi, n);
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t r = 0; r < m; ++r)
    for (auto v : positions_of(r)) ++offset[v + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  std::vector<std::size_t> incident(offset[n]);
  {
    auto fill = offset;
    for (std::size_t r = 0; r < m; ++r)
      for (auto v : positions_of(r)) incident[fill[v]++] = r;
  }
  std::vector<std::size_t> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = offset[v + 1] - offset[v];

  HypergraphPeel out;
  out.row_alive.assign(m, 1);
  out.var_alive.assign(n, 1);
  std::vector<char> queued(n, 0);
  using Entry = std::pair<std::uint32_t, std::uint32_t>;  // (pi, variable)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::uint32_t v = 0; v < n; ++v)
    if (degree[v] <= 1) {
      heap.emplace(pi[v], v);
      queued[v] = 1;
    }

  while (!heap.empty()) {
    const auto v = heap.top().second;
    heap.pop();
    out.var_alive[v] = 0;
    std::optional<std::size_t> row;
    if (degree[v] == 1) {
      for (std::size_t e = offset[v]; e < offset[v + 1]; ++e)
        if (out.row_alive[incident[e]]) {
          row = incident[e];
          break;
        }
    }
    out.removal_order.push_back({v, row});
    if (!row) continue;
    out.row_alive[*row] = 0;
    for (auto u : positions_of(*row)) {
      if (u == v) continue;
      out.edges.emplace_back(u, v);
      if (--degree[u] <= 1 && !queued[u]) {
        heap.emplace(pi[u], u);
        queued[u] = 1;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Peels the system down to its 2-core; pi breaks ties (least pi first).
inline std::pair<PeelReport, PeelTrace> peel(const SparseLinearSystem& sys, std::span<const std::uint32_t> pi) {
  auto positions_of = [&](std::size_t r) -> std::span<const std::uint32_t> { return sys.rows[r].positions; };
  auto hp = detail::peel_hypergraph(sys.n, sys.m(), positions_of, pi);

  PeelReport report;
  std::vector<std::uint32_t> new_index(sys.n, 0);
  for (std::uint32_t v = 0; v < sys.n; ++v)
    if (hp.var_alive[v]) {
      new_index[v] = static_cast<std::uint32_t>(report.core_cols.size());
      report.core_cols.push_back(v);
    }
  report.reduced = SparseLinearSystem{sys.field, report.core_cols.size(), sys.k, {}};
  for (std::size_t r = 0; r < sys.m(); ++r) {
    if (!hp.row_alive[r]) continue;
    report.core_rows.push_back(r);
    SparseRow row = sys.rows[r];
    for (auto& p : row.positions) p = new_index[p];
    report.reduced.rows.push_back(std::move(row));
  }
  report.n_star = report.core_cols.size();
  report.m_star = report.core_rows.size();
  report.removal_order = std::move(hp.removal_order);

  PeelTrace trace;
  trace.pi.assign(pi.begin(), pi.end());
  trace.successors.resize(sys.n);
  std::vector<std::size_t> indegree(sys.n, 0);
  for (auto [from, to] : hp.edges) {
    trace.successors[from].push_back(to);
    ++indegree[to];
  }
  trace.edges = std::move(hp.edges);
  for (std::uint32_t v = 0; v < sys.n; ++v)
    if (indegree[v] == 0) trace.indegree_zero.push_back(v);
  return {std::move(report), std::move(trace)};
}

inline std::pair<PeelReport, PeelTrace> peel(const SparseLinearSystem& sys) {
  const auto pi = identity_permutation(sys.n);
  return peel(sys, pi);
}

/// R(A, pi, x_i): every variable reachable from i in D(A, pi), i included. Ascending.
inline std::vector<std::uint32_t> reachable(const PeelTrace& trace, std::uint32_t i) {
  if (i >= trace.n()) throw InvalidArgument("variable index out of range");
  std::vector<char> seen(trace.n(), 0);
  std::vector<std::uint32_t> stack{i}, out;
  seen[i] = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (auto w : trace.successors[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Variables variables[h] lie in rows[h] and rows[(h + 1) % t] and in no other row.
struct FlippableCycle {
  std::vector<std::uint32_t> variables;
  std::vector<std::size_t> rows;
  bool core_only = false;
};

using FlippableCycles = std::vector<FlippableCycle>;

inline constexpr std::size_t kMaxFlippableCycles = 1'000'000;

/// All simple cycles of the multigraph whose nodes are rows and whose edges
/// are the variables of degree exactly 2 in G(A).
inline FlippableCycles find_flippable_cycles(const SparseLinearSystem& sys, const PeelReport& report,
                                             std::size_t max_cycles = kMaxFlippableCycles) {
  const std::size_t m = sys.m();
  std::vector<std::vector<std::size_t>> rows_of(sys.n);
  for (std::size_t r = 0; r < m; ++r)
    for (auto v : sys.rows[r].positions) rows_of[v].push_back(r);

  struct Arc {
    std::size_t to;
    std::uint32_t var;
  };
  std::vector<std::vector<Arc>> adj(m);
  for (std::uint32_t v = 0; v < sys.n; ++v)
    if (rows_of[v].size() == 2) {
      adj[rows_of[v][0]].push_back({rows_of[v][1], v});
      adj[rows_of[v][1]].push_back({rows_of[v][0], v});
    }

  // Nodes of multigraph degree <= 1 lie on no cycle.
  std::vector<char> active(m, 1);
  std::vector<std::size_t> deg(m), stack;
  for (std::size_t r = 0; r < m; ++r) {
    deg[r] = adj[r].size();
    if (deg[r] <= 1) stack.push_back(r);
  }
  while (!stack.empty()) {
    const auto r = stack.back();
    stack.pop_back();
    if (!active[r]) continue;
    active[r] = 0;
    for (const auto& a : adj[r])
      if (active[a.to] && --deg[a.to] <= 1) stack.push_back(a.to);
  }

  std::vector<char> in_core(sys.n, 0);
  for (auto v : report.core_cols) in_core[v] = 1;

  FlippableCycles cycles;
  std::vector<std::size_t> path_rows;
  std::vector<std::uint32_t> path_vars;
  std::vector<char> on_path(m, 0);

  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t start, std::size_t u) {
    for (const auto& a : adj[u]) {
      if (!active[a.to]) continue;
      if (a.to == start) {
        // Each undirected cycle is met twice; keep the traversal whose first
        // variable is smaller than its closing one.
        if (!path_vars.empty() && a.var != path_vars.front() && path_vars.front() < a.var) {
          FlippableCycle c;
          c.rows = path_rows;
          c.variables = path_vars;
          c.variables.push_back(a.var);
          c.core_only = std::all_of(c.variables.begin(), c.variables.end(), [&](auto v) { return in_core[v] != 0; });
          cycles.push_back(std::move(c));
          if (cycles.size() > max_cycles) throw ComplexityGuard("more than " + std::to_string(max_cycles) + " flippable cycles");
        }
        continue;
      }
      if (a.to < start || on_path[a.to]) continue;
      on_path[a.to] = 1;
      path_rows.push_back(a.to);
      path_vars.push_back(a.var);
      dfs(start, a.to);
      path_rows.pop_back();
      path_vars.pop_back();
      on_path[a.to] = 0;
    }
  };

  for (std::size_t s = 0; s < m; ++s) {
    if (!active[s]) continue;
    on_path[s] = 1;
    path_rows.assign(1, s);
    path_vars.clear();
    dfs(s, s);
    on_path[s] = 0;
  }
  return cycles;
}

/// Number of distinct variables lying on core flippable cycles.
inline std::size_t core_flippable_variable_count(const FlippableCycles& cycles) {
  std::vector<std::uint32_t> vars;
  for (const auto& c : cycles)
    if (c.core_only) vars.insert(vars.end(), c.variables.begin(), c.variables.end());
  std::sort(vars.begin(), vars.end());
  return static_cast<std::size_t>(std::unique(vars.begin(), vars.end()) - vars.begin());
}

/// Extends a solution of report.reduced (indexed like core_cols) to the full
/// system, assigning peeled variables in reverse removal order. Variables
/// removed without a row get 0, or a uniform value when `free_values` is set.
inline std::vector<Element> extend_core_solution(const SparseLinearSystem& sys, const PeelReport& report,
                                                 std::span<const Element> x_core, rng::Engine* free_values = nullptr) {
  if (x_core.size() != report.n_star)
    throw CoreAssignmentInvalid("core assignment has length " + std::to_string(x_core.size()) + ", expected " + std::to_string(report.n_star));
  if (!report.reduced.satisfied_by(x_core)) throw CoreAssignmentInvalid("core assignment does not satisfy the reduced system");
  const auto& F = *sys.field;
  std::vector<Element> x(sys.n, FiniteField::zero());
  for (std::size_t j = 0; j < report.core_cols.size(); ++j) x[report.core_cols[j]] = x_core[j];
  for (auto it = report.removal_order.rbegin(); it != report.removal_order.rend(); ++it) {
    const auto v = it->variable;
    if (!it->row) {
      x[v] = free_values ? Element{static_cast<std::uint8_t>(rng::uniform_below(*free_values, F.order()))} : FiniteField::zero();
      continue;
    }
    const auto& row = sys.rows[*it->row];
    Element rest = FiniteField::zero();
    Element own = FiniteField::one();
    for (std::size_t h = 0; h < row.positions.size(); ++h) {
      if (row.positions[h] == v)
        own = row.coeffs[h];
      else
        rest = F.add(rest, F.mul(row.coeffs[h], x[row.positions[h]]));
    }
    x[v] = F.div(F.sub(row.rhs, rest), own);
  }
  return x;
}

}  // namespace fqlin
