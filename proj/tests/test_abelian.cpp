#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fqlin/abelian.hpp"
#include "fqlin/linalg.hpp"
#include "oracles.hpp"

using namespace fqlin;

namespace {

AbelianSystem random_abelian(const GroupSpec& G, std::size_t n, std::size_t m, std::uint64_t seed) {
  AbelianSystem sys{G, n, 3, {}, {}};
  for (std::size_t i = 0; i < m; ++i) {
    auto g = rng::substream(seed, i);
    std::vector<std::uint32_t> pos;
    draw_positions(g, n, 3, pos);
    sys.positions.push_back(pos);
    sys.rhs.push_back(G.decode(rng::uniform_below(g, G.order())));
  }
  return sys;
}

}  // namespace

TEST(GroupSpec, Validation) {
  EXPECT_NO_THROW((GroupSpec{{2, 4, 9, 7}}.validate()));
  EXPECT_THROW((GroupSpec{{6}}.validate()), NotAPrimePower);
  EXPECT_THROW((GroupSpec{{1}}.validate()), NotAPrimePower);
  EXPECT_THROW((GroupSpec{{}}.validate()), InvalidArgument);
  EXPECT_EQ((GroupSpec{{2, 3}}.order()), 6U);
  EXPECT_EQ((GroupSpec{{2, 3}}.decode(5)), (std::vector<std::uint64_t>{1, 2}));
}

TEST(Howell, SingleEquationAlwaysSolvable) {
  for (std::uint64_t N : {4U, 8U, 9U, 27U}) {
    AbelianSystem sys{{{N}}, 3, 3, {{0, 1, 2}}, {{N - 1}}};
    EXPECT_TRUE(abelian_solvable(sys, false));
    EXPECT_TRUE(abelian_solvable(sys, true));
  }
}

TEST(Howell, ConflictOverZ4) {
  // x0+x1+x2 = 1 and x0+x1+x2 = 3 contradict; 2*(x0+x1+x2) = 2 is consistent.
  AbelianSystem bad{{{4}}, 3, 3, {{0, 1, 2}, {0, 1, 2}}, {{1}, {3}}};
  EXPECT_FALSE(abelian_solvable(bad, false));
  EXPECT_FALSE(oracle::abelian_brute_force(bad));
  EXPECT_TRUE(cyclic_solvable(1, std::vector<std::vector<std::uint32_t>>{{0, 0}}, std::vector<std::int64_t>{2}, 4));
  EXPECT_FALSE(cyclic_solvable(1, std::vector<std::vector<std::uint32_t>>{{0, 0}}, std::vector<std::int64_t>{1}, 4));
}

TEST(Howell, FormIsIdempotentAndSpansTheSameRows) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = rng::substream(seed, 0);
    const std::int64_t N = seed % 2 ? 8 : 9;
    IntMatrix M(4, std::vector<std::int64_t>(5));
    for (auto& r : M)
      for (auto& v : r) v = static_cast<std::int64_t>(rng::uniform_below(g, N));
    const auto H = howell_form(M, N);
    EXPECT_EQ(howell_form(H, N), H);
    // every original row reduces to zero against H
    for (auto row : M) {
      for (const auto& h : H) {
        std::size_t c = 0;
        while (h[c] == 0) ++c;
        if (row[c] % h[c] == 0) {
          const auto f = row[c] / h[c];
          for (std::size_t j = 0; j < row.size(); ++j) row[j] = detail::mod(row[j] - f * h[j], N);
        }
      }
      EXPECT_TRUE(std::all_of(row.begin(), row.end(), [](auto v) { return v == 0; })) << seed;
    }
  }
}

TEST(AbelianSolvable, MatchesBruteForce) {
  const std::vector<GroupSpec> groups{{{4}}, {{9}}, {{2, 3}}, {{8}}, {{2, 4}}};
  std::size_t unsolvable = 0, total = 0;
  for (const auto& G : groups)
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const std::size_t n = G.order() > 8 ? 4 : 5 + seed % 2;
      const std::size_t m = 2 + seed % 4;
      const auto sys = random_abelian(G, n, m, seed);
      const bool expect = oracle::abelian_brute_force(sys);
      ASSERT_EQ(abelian_solvable(sys, false), expect) << G.order() << " " << seed;
      ASSERT_EQ(abelian_solvable(sys, true), expect) << G.order() << " " << seed;
      unsolvable += !expect;
      ++total;
    }
  EXPECT_GT(unsolvable, 0U);
  EXPECT_LT(unsolvable, total);
}

TEST(AbelianSolvable, FactorsOverComponents) {
  const GroupSpec G{{4, 3}};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sys = random_abelian(G, 5, 4, seed);
    bool each = true;
    for (std::size_t c = 0; c < 2; ++c) {
      AbelianSystem part{{{G.components[c]}}, sys.n, 3, sys.positions, {}};
      for (const auto& r : sys.rhs) part.rhs.push_back({r[c]});
      each = each && abelian_solvable(part);
    }
    EXPECT_EQ(abelian_solvable(sys), each);
  }
}

TEST(AbelianSolvable, RowOrderDoesNotMatter) {
  const GroupSpec G{{8}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto sys = sample_abelian(G, 3, 60, 2.9, seed);
    const bool before = abelian_solvable(sys, false);
    std::vector<std::size_t> perm(sys.m());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::reverse(perm.begin(), perm.end());
    AbelianSystem shuffled{G, sys.n, 3, {}, {}};
    for (auto i : perm) {
      shuffled.positions.push_back(sys.positions[i]);
      shuffled.rhs.push_back(sys.rhs[i]);
    }
    EXPECT_EQ(abelian_solvable(shuffled, false), before);
    EXPECT_EQ(abelian_solvable(sys, true), before);
  }
}

TEST(AbelianSolvable, PrimeCyclicGroupAgreesWithFieldElimination) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto field_sys = sample_system({3, 3, 80, 2.8, RowDistribution::all_ones(), seed});
    AbelianSystem ab{{{3}}, field_sys.n, 3, {}, {}};
    for (const auto& r : field_sys.rows) {
      ab.positions.push_back(r.positions);
      ab.rhs.push_back({r.rhs.code});
    }
    EXPECT_EQ(abelian_solvable(ab), eliminate(field_sys, {.kernel_basis = false}).solvable) << seed;
  }
}

TEST(AbelianScan, Z2MatchesAllOnesFieldScan) {
  const GroupSpec G{{2}};
  const auto grid = d_grid(2.2, 3.2, 3);
  const auto scan = abelian_scan(G, 3, 120, grid, 20, 99);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::size_t solvable = 0;
    for (std::size_t t = 0; t < 20; ++t)
      solvable += eliminate(sample_system({2, 3, 120, grid[j], RowDistribution::all_ones(), rng::derive(99, j, t)}), {.kernel_basis = false}).solvable;
    EXPECT_EQ(scan[j].solvable, solvable) << grid[j];
  }
}

TEST(AbelianScan, DeterministicAcrossThreadsAndMonotoneEnds) {
  const GroupSpec G{{4}};
  const auto grid = d_grid(1.0, 4.0, 4);
  const auto a = abelian_scan(G, 3, 200, grid, 12, 5, 1), b = abelian_scan(G, 3, 200, grid, 12, 5, 3);
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_EQ(a[j].solvable, b[j].solvable);
  EXPECT_EQ(a.front().probability, 1.0);
  EXPECT_LT(a.back().probability, 0.5);
  EXPECT_LE(a.back().ci.lo, a.back().probability);
  EXPECT_GE(a.back().ci.hi, a.back().probability);
}

TEST(AbelianScan, Validation) {
  EXPECT_THROW(d_grid(0.0, 1.0, 3), InvalidArgument);
  EXPECT_THROW(d_grid(1.0, 2.0, 0), InvalidArgument);
  EXPECT_EQ(d_grid(1.5, 3.0, 1), std::vector<double>{1.5});
  EXPECT_THROW(sample_abelian(GroupSpec{{12}}, 3, 10, 1.0, 1), NotAPrimePower);
  EXPECT_THROW(abelian_scan(GroupSpec{{2}}, 3, 10, std::vector<double>{1.0}, 0, 1), InvalidArgument);
}
