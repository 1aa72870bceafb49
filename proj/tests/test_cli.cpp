#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string("\"") + FQLIN_CLI + "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fqlin_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* sub : {"thresholds", "solve", "peel", "scan", "overlap", "clusters", "coresize", "rank", "bethe", "abelian"})
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  EXPECT_EQ(run("scan --help").status, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("no-such-command").status, 2);
  EXPECT_EQ(run("scan --q 3 --n 50").status, 2);  // --seed is required
  EXPECT_EQ(run("thresholds --k three").status, 2);
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto r = run("scan --q 6 --n 50 --seed 1 --d-min 1 --d-max 1", true);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("6"), std::string::npos);
  EXPECT_EQ(run("thresholds --k 2").status, 1);
  const auto bad = scratch("bad.sys");
  write(bad, "garbage\n");
  EXPECT_EQ(run("solve --in " + bad.string()).status, 1);
}

TEST(Cli, SolveIdentity) {
  const auto f = scratch("identity.sys");
  std::ofstream(f) << "";
  const auto r0 = run("sample --q 2 --n 3 --d 0.001 --seed 1 --out " + f.string());
  ASSERT_EQ(r0.status, 0);
  const auto r = run("solve --in " + f.string());
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rank"], 0);
  EXPECT_EQ(j["nullity"], 3);
  EXPECT_EQ(j["solvable"], true);
}

TEST(Cli, SampleSolveRoundTripAndPlantedIsSolvable) {
  const auto f = scratch("planted.sys");
  ASSERT_EQ(run("sample --q 5 --n 200 --d 3.2 --seed 9 --planted --out " + f.string()).status, 0);
  const auto j = nlohmann::json::parse(run("solve --in " + f.string() + " --q 5").out);
  EXPECT_EQ(j["solvable"], true);
  EXPECT_EQ(j["rank"].get<int>() + j["nullity"].get<int>(), 200);
  EXPECT_EQ(run("solve --in " + f.string() + " --q 7").status, 1);
  const auto p = nlohmann::json::parse(run("peel --json --in " + f.string()).out);
  EXPECT_TRUE(p.contains("n_star"));
  EXPECT_TRUE(p.contains("m_star"));
}

TEST(Cli, ThresholdsJson) {
  const auto r = run("thresholds --k 3 --d 2.6 --json");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["d_k_star"].get<double>(), 2.455407482284128, 1e-9);
  EXPECT_NEAR(j["d_k"].get<double>(), 2.753805829974258, 1e-8);
}

TEST(Cli, ScanWritesArtifactsAndConfigIsOverridable) {
  const auto out = scratch("scan_out");
  fs::remove_all(out);
  const auto cfg = scratch("scan.json");
  write(cfg, R"({"q": 3, "n": 120, "d_min": 1.5, "d_max": 3.5, "steps": 3, "trials": 4, "seed": 11})");
  const auto r = run("scan --config " + cfg.string() + " --steps 2 --out " + out.string());
  ASSERT_EQ(r.status, 0);
  for (const char* f : {"records.csv", "summary.json", "plot.svg"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto s = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(s["config"]["q"], 3);
  EXPECT_EQ(s["config"]["steps"], 2);  // command line wins over the config file
  EXPECT_EQ(s["grid"].size(), 2U);
}

TEST(Cli, ExperimentJsonOutputParses) {
  const auto r = run("coresize --q 2 --n 150 --d-min 2.6 --d-max 2.6 --trials 2 --seed 3 --json");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["grid"].size(), 1U);
}

TEST(Cli, CustomDistributionFile) {
  const auto dist = scratch("dist.txt");
  write(dist, "# weight then k codes\n1 1 1 2\n2 1 2 2\n");
  EXPECT_EQ(run("scan --q 3 --n 60 --seed 1 --dist file:" + dist.string()).status, 0);
  write(dist, "1 1 1\n");
  EXPECT_EQ(run("scan --q 3 --n 60 --seed 1 --dist file:" + dist.string()).status, 1);
}

TEST(Cli, OtherSubcommandsRun) {
  EXPECT_EQ(run("bethe --q 2 --d 2 --alpha 0.5 --samples 2000 --seed 1 --json").status, 0);
  EXPECT_EQ(run("abelian --group 4 --n 60 --trials 3 --seed 1 --json").status, 0);
  EXPECT_EQ(run("symmetry --q 2 --n 60 --d 2 --trials 2 --seed 1 --json").status, 0);
  const auto csv = scratch("sm.csv");
  ASSERT_EQ(run("secondmoment --d 2.7 --out " + csv.string()).status, 0);
  EXPECT_EQ(slurp(csv).rfind("z,F\n", 0), 0U);
  EXPECT_TRUE(fs::exists(scratch("sm.svg")));
}
