#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fqlin/experiments.hpp"

using namespace fqlin;

namespace {

ExperimentConfig config(ExperimentKind kind, double lo, double hi, std::size_t steps, std::size_t trials, std::size_t n = 300) {
  ExperimentConfig c;
  c.kind = kind;
  c.q = 3;
  c.n = n;
  c.d_min = lo;
  c.d_max = hi;
  c.steps = steps;
  c.trials = trials;
  c.seed = 2024;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Experiments, ThreadCountDoesNotChangeOutput) {
  for (auto kind : {ExperimentKind::Scan, ExperimentKind::Overlap, ExperimentKind::Clusters}) {
    auto c = config(kind, 2.0, 3.0, 3, 4, 200);
    const auto a = run_experiment(c);
    c.threads = 4;
    const auto b = run_experiment(c);
    EXPECT_EQ(records_csv(a.records), records_csv(b.records)) << to_string(kind);
    EXPECT_EQ(summary_json(c, a).dump(), summary_json(c, b).dump());
  }
}

TEST(Experiments, CsvHeaderAndBlankCells) {
  const auto res = run_scan(config(ExperimentKind::Scan, 2.0, 2.0, 1, 2));
  const auto csv = records_csv(res.records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    // overlap_tv, flip_vars, cluster_distance and ms are not computed for a plain scan
    EXPECT_EQ(line.substr(line.size() - 4), ",,,,") << line;
  }
  EXPECT_EQ(rows, 2U);
}

TEST(Experiments, LowDensityIsAlwaysSolvable) {
  const auto res = run_scan(config(ExperimentKind::Scan, 1.0, 1.0, 1, 20, 400));
  EXPECT_EQ(res.table.at(0).p_solvable, 1.0);
  EXPECT_EQ(res.table[0].n_star_over_n.mean, 0.0);
}

TEST(Experiments, HighDensityIsRarelySolvable) {
  const auto res = run_scan(config(ExperimentKind::Scan, 3.5, 3.5, 1, 40, 400));
  EXPECT_LE(res.table.at(0).p_solvable, 0.05);
}

TEST(Experiments, OverlapWithNothingSolvableDoesNotCrash) {
  const auto c = config(ExperimentKind::Overlap, 4.5, 4.5, 1, 3, 300);
  const auto res = run_overlap(c);
  EXPECT_EQ(res.table.at(0).solvable, 0U);
  EXPECT_EQ(res.table[0].overlap_tv.count, 0U);
  for (const auto& r : res.records) EXPECT_FALSE(r.overlap_tv);
  EXPECT_NO_THROW(render_plot(experiment_plot(c, res)));
}

TEST(Experiments, RecordInvariants) {
  const auto c = config(ExperimentKind::Clusters, 2.5, 2.7, 2, 3, 500);
  const auto res = run_clusters(c);
  for (const auto& r : res.records) {
    EXPECT_EQ(r.rank + r.nullity, c.n);
    EXPECT_LE(r.m_star, r.m);
    EXPECT_LE(r.n_star, c.n);
    ASSERT_TRUE(r.flip_vars);
    EXPECT_LE(*r.flip_vars, r.n_star);
    EXPECT_EQ(r.cluster_distance.has_value(), r.solvable);
    // a unique core solution extends to a unique deterministic extension
    if (r.cluster_distance && r.core_nullity == 0) {
      EXPECT_EQ(*r.cluster_distance, 0.0);
    }
    EXPECT_EQ(r.seed, rng::derive(c.seed, r.d_index, r.trial));
    EXPECT_FALSE(r.ms);
  }
}

TEST(Experiments, PredictionsInSummary) {
  const auto c = config(ExperimentKind::Coresize, 2.6, 3.0, 2, 1);
  const auto j = summary_json(c, run_coresize(c));
  EXPECT_EQ(j["tool_version"], kToolVersion);
  EXPECT_TRUE(j["started_at"].is_null());
  EXPECT_EQ(j["config"]["kind"], "coresize");
  EXPECT_FALSE(j["config"].contains("threads"));
  const auto& g = j["grid"];
  ASSERT_EQ(g.size(), 2U);
  EXPECT_NEAR(g[0]["predicted"]["n_star_over_n"].get<double>(), 0.54869897270, 1e-9);
  EXPECT_NEAR(g[1]["predicted"]["m_star_over_n"].get<double>(), 0.78349917229, 1e-9);
  EXPECT_NEAR(g[0]["predicted"]["cluster_exponent"].get<double>(), 0.033109132278, 1e-9);
  EXPECT_TRUE(g[1]["predicted"]["cluster_exponent"].is_null());
}

TEST(Experiments, WritesAllArtifacts) {
  const auto dir = std::filesystem::temp_directory_path() / "fqlin_test_experiments";
  std::filesystem::remove_all(dir);
  const auto c = config(ExperimentKind::Rank, 3.0, 3.4, 2, 2);
  const auto res = run_rank(c);
  write_experiment(dir, c, res);
  EXPECT_EQ(slurp(dir / "records.csv"), records_csv(res.records));
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["grid"].size(), 2U);
  const auto svg = slurp(dir / "plot.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0U);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, Validation) {
  auto c = config(ExperimentKind::Scan, 2.0, 1.0, 2, 1);
  EXPECT_THROW(run_experiment(c), InvalidArgument);
  c = config(ExperimentKind::Scan, 1.0, 2.0, 0, 1);
  EXPECT_THROW(run_experiment(c), InvalidArgument);
  c = config(ExperimentKind::Scan, 1.0, 2.0, 2, 1);
  c.q = 6;
  EXPECT_THROW(run_experiment(c), NotAPrimePower);
}

TEST(Plot, EmptyTableRendersAxes) {
  PlotTable t;
  t.title = "empty & <odd>";
  const auto svg = render_plot(t);
  EXPECT_NE(svg.find("empty &amp; &lt;odd&gt;"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, SeriesAppearInOutput) {
  PlotTable t{"t", "x", "y", {{"alpha", {0, 1, 2}, {0.5, 0.25, 1}, true}, {"beta", {0, 2}, {1, 0}, false}}};
  const auto svg = render_plot(t);
  EXPECT_NE(svg.find("alpha"), std::string::npos);
  EXPECT_NE(svg.find("beta"), std::string::npos);
}
