#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <tuple>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "fqlin/abelian.hpp"
#include "fqlin/analytic.hpp"
#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"
#include "fqlin/linalg.hpp"
#include "fqlin/peel.hpp"
#include "fqlin/plot.hpp"
#include "fqlin/rng.hpp"
#include "fqlin/stats.hpp"

#ifndef FQLIN_VERSION
#define FQLIN_VERSION "0.1.0"
#endif

namespace fqlin {

inline constexpr const char* kToolVersion = FQLIN_VERSION;

enum class ExperimentKind { Scan, Overlap, Clusters, Coresize, Rank };

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Scan: return "scan";
    case ExperimentKind::Overlap: return "overlap";
    case ExperimentKind::Clusters: return "clusters";
    case ExperimentKind::Coresize: return "coresize";
    case ExperimentKind::Rank: return "rank";
  }
  return "?";
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Scan;
  unsigned q = 2;
  unsigned k = 3;
  std::size_t n = 300;
  RowDistribution dist = RowDistribution::uniform_nonzero();
  std::string dist_spec = "uniform";  // as given on the command line, echoed in the sidecar
  double d_min = 1.0;
  double d_max = 1.0;
  std::size_t steps = 1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t overlap_pairs = 10;
  unsigned threads = 1;  // does not affect results
  bool timing = false;   // wall time in records; off keeps output byte-reproducible

  void validate() const {
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (k < 3) throw InvalidArgument("k must be >= 3");
    if (n < k) throw InvalidArgument("n must be >= k");
    if (!(d_min > 0.0) || d_max < d_min) throw InvalidArgument("need 0 < d-min <= d-max");
    if (kind == ExperimentKind::Overlap && overlap_pairs < 1) throw InvalidArgument("overlap needs at least one pair");
    dist.validate(*make_field(q), k);
  }

  std::vector<double> grid() const { return d_grid(d_min, d_max, steps); }
};

struct ExperimentRecord {
  double d = 0.0;
  std::size_t d_index = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  bool solvable = false;
  bool core_solvable = false;
  std::size_t rank = 0;
  std::size_t nullity = 0;
  std::size_t n_star = 0;
  std::size_t m_star = 0;
  std::size_t core_nullity = 0;                // nul(A_*) = n_star - rk(A_*)
  std::optional<double> overlap_tv;            // mean over sampled pairs, solvable instances only
  std::optional<std::size_t> flip_vars;        // clusters only
  std::optional<double> cluster_distance;      // clusters only: Hamming fraction between two extended core solutions
  std::optional<double> ms;                    // wall time, only when timing is on
};

/// One instance: peel, eliminate the full and the reduced system, and check
/// that both routes agree on solvability (and that the extension solves A x = y).
inline ExperimentRecord run_trial(const ExperimentConfig& cfg, std::size_t d_index, double d, std::size_t trial) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.d = d;
  rec.d_index = d_index;
  rec.trial = trial;
  rec.seed = rng::derive(cfg.seed, d_index, trial);
  const auto sys = sample_system(EnsembleParams{cfg.q, cfg.k, cfg.n, d, cfg.dist, rec.seed});
  rec.m = sys.m();

  const bool want_basis = cfg.kind == ExperimentKind::Overlap;
  const auto full = eliminate(sys, EliminateOptions{want_basis, {}});
  rec.rank = full.rank;
  rec.nullity = full.nullity;
  rec.solvable = full.solvable;

  const auto [report, trace] = peel(sys);
  rec.n_star = report.n_star;
  rec.m_star = report.m_star;
  const auto core = eliminate(report.reduced);
  rec.core_solvable = core.solvable;
  rec.core_nullity = core.nullity;
  if (core.solvable != full.solvable) throw Error("cross-solver mismatch: core and full elimination disagree on solvability");
  if (core.rank + (rec.m - rec.m_star) != full.rank) throw Error("cross-solver mismatch: rank(A) != (m - m_star) + rank(A_star)");
  if (core.solvable) {
    const auto x = extend_core_solution(sys, report, *core.basis.particular_solution);
    if (!sys.satisfied_by(x)) throw Error("cross-solver mismatch: extended core solution does not solve the system");
  }
  if (rec.rank + rec.nullity != cfg.n || rec.n_star > cfg.n || rec.m_star > rec.m) throw Error("record invariant violated");

  if (cfg.kind == ExperimentKind::Overlap && full.solvable) {
    auto g = rng::substream(rec.seed, stream::kPlanted - 1);
    double tv = 0.0;
    for (std::size_t p = 0; p < cfg.overlap_pairs; ++p) {
      const auto x = sample_kernel_uniform(full.basis, g);
      const auto y = sample_kernel_uniform(full.basis, g);
      tv += overlap_tv(overlap(x, y, cfg.q));
    }
    rec.overlap_tv = tv / static_cast<double>(cfg.overlap_pairs);
  }
  if (cfg.kind == ExperimentKind::Clusters) {
    rec.flip_vars = core_flippable_variable_count(find_flippable_cycles(sys, report));
    // Two uniform core solutions, extended the same way, lie in two sampled
    // clusters; their distance is a heuristic for the inter-cluster distance.
    if (core.solvable) {
      auto g = rng::substream(rec.seed, stream::kPlanted - 2);
      const auto x = extend_core_solution(sys, report, sample_kernel_uniform(core.basis, g));
      const auto y = extend_core_solution(sys, report, sample_kernel_uniform(core.basis, g));
      std::size_t differ = 0;
      for (std::size_t i = 0; i < x.size(); ++i) differ += x[i] != y[i];
      rec.cluster_distance = static_cast<double>(differ) / static_cast<double>(cfg.n);
    }
  }
  if (cfg.timing) rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

struct AggregateRow {
  double d = 0.0;
  std::size_t trials = 0;
  std::size_t solvable = 0;
  double p_solvable = 0.0;
  stats::Interval ci;
  stats::MeanSe rank_over_m;
  stats::MeanSe nullity_over_n;
  stats::MeanSe n_star_over_n;
  stats::MeanSe m_star_over_n;
  stats::MeanSe core_nullity_over_n;
  std::optional<stats::MeanSe> flip_fraction;
  std::optional<stats::MeanSe> cluster_distance;  // over solvable instances
  stats::MeanSe overlap_tv;  // over solvable instances; count 0 when none
  // predictions
  double rho = 0.0;
  double pred_n_star = 0.0;
  double pred_m_star = 0.0;
  std::optional<double> pred_rank_frac;
  std::optional<double> pred_cluster_exponent;
};

/// Deterministic fold over records ordered by (d index, trial).
inline std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& records) {
  const auto grid = cfg.grid();
  const double dk = analytic::d_k(cfg.k), dks = analytic::d_k_star(cfg.k);
  std::vector<AggregateRow> rows;
  const double n = static_cast<double>(cfg.n);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    AggregateRow a;
    a.d = grid[j];
    std::vector<double> rank, nul, ns, ms, cn, flip, dist, tv;
    for (const auto& r : records) {
      if (r.d_index != j) continue;
      ++a.trials;
      a.solvable += r.solvable;
      if (r.m > 0) rank.push_back(static_cast<double>(r.rank) / static_cast<double>(r.m));
      nul.push_back(static_cast<double>(r.nullity) / n);
      ns.push_back(static_cast<double>(r.n_star) / n);
      ms.push_back(static_cast<double>(r.m_star) / n);
      cn.push_back(static_cast<double>(r.core_nullity) / n);
      if (r.flip_vars) flip.push_back(static_cast<double>(*r.flip_vars) / n);
      if (r.cluster_distance) dist.push_back(*r.cluster_distance);
      if (r.overlap_tv) tv.push_back(*r.overlap_tv);
    }
    a.p_solvable = a.trials ? static_cast<double>(a.solvable) / static_cast<double>(a.trials) : 0.0;
    a.ci = stats::wilson(a.solvable, a.trials);
    a.rank_over_m = stats::mean_se(rank);
    a.nullity_over_n = stats::mean_se(nul);
    a.n_star_over_n = stats::mean_se(ns);
    a.m_star_over_n = stats::mean_se(ms);
    a.core_nullity_over_n = stats::mean_se(cn);
    if (!flip.empty()) a.flip_fraction = stats::mean_se(flip);
    if (cfg.kind == ExperimentKind::Clusters) a.cluster_distance = stats::mean_se(dist);
    a.overlap_tv = stats::mean_se(tv);
    a.rho = analytic::rho(cfg.k, a.d);
    std::tie(a.pred_n_star, a.pred_m_star) = analytic::core_fractions(cfg.k, a.d);
    if (a.d > dk) a.pred_rank_frac = analytic::rank_fraction(cfg.k, a.d);
    if (a.d > dks && a.d < dk) a.pred_cluster_exponent = analytic::threshold_expression(cfg.k, a.d);
    rows.push_back(a);
  }
  return rows;
}

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  std::vector<AggregateRow> table;
};

/// Runs every (d, trial) task on cfg.threads workers. Each task owns a
/// preassigned record slot, so results do not depend on scheduling.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.grid();
  ExperimentResult res;
  res.records.resize(grid.size() * cfg.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const auto idx = next.fetch_add(1);
      if (idx >= res.records.size() || failed) return;
      try {
        res.records[idx] = run_trial(cfg, idx / cfg.trials, grid[idx / cfg.trials], idx % cfg.trials);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(res.records.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  res.table = aggregate(cfg, res.records);
  return res;
}

inline ExperimentResult run_scan(ExperimentConfig cfg) { return cfg.kind = ExperimentKind::Scan, run_experiment(cfg); }
inline ExperimentResult run_overlap(ExperimentConfig cfg) { return cfg.kind = ExperimentKind::Overlap, run_experiment(cfg); }
inline ExperimentResult run_clusters(ExperimentConfig cfg) { return cfg.kind = ExperimentKind::Clusters, run_experiment(cfg); }
inline ExperimentResult run_coresize(ExperimentConfig cfg) { return cfg.kind = ExperimentKind::Coresize, run_experiment(cfg); }
inline ExperimentResult run_rank(ExperimentConfig cfg) { return cfg.kind = ExperimentKind::Rank, run_experiment(cfg); }

// ---- persistence ----

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "d,trial,seed,m,solvable,rank,nullity,n_star,m_star,overlap_tv,flip_vars,cluster_distance,ms";

inline std::string records_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream o;
  o << kCsvHeader << '\n';
  for (const auto& r : records) {
    o << detail::shortest(r.d) << ',' << r.trial << ',' << r.seed << ',' << r.m << ',' << (r.solvable ? 1 : 0) << ',' << r.rank << ','
      << r.nullity << ',' << r.n_star << ',' << r.m_star << ',';
    if (r.overlap_tv) o << detail::shortest(*r.overlap_tv);
    o << ',';
    if (r.flip_vars) o << *r.flip_vars;
    o << ',';
    if (r.cluster_distance) o << detail::shortest(*r.cluster_distance);
    o << ',';
    if (r.ms) o << detail::shortest(*r.ms);
    o << '\n';
  }
  return o.str();
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(cfg.kind);
  j["q"] = cfg.q;
  j["k"] = cfg.k;
  j["n"] = cfg.n;
  j["dist"] = cfg.dist_spec;
  j["d_min"] = cfg.d_min;
  j["d_max"] = cfg.d_max;
  j["steps"] = cfg.steps;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  if (cfg.kind == ExperimentKind::Overlap) j["overlap_pairs"] = cfg.overlap_pairs;
  return j;
}

inline nlohmann::ordered_json mean_json(const stats::MeanSe& m) {
  nlohmann::ordered_json j;
  j["mean"] = m.mean;
  j["se"] = m.se;
  j["count"] = m.count;
  return j;
}

inline nlohmann::ordered_json aggregate_json(const ExperimentConfig& cfg, const AggregateRow& a) {
  nlohmann::ordered_json j;
  j["d"] = a.d;
  j["trials"] = a.trials;
  j["solvable"] = a.solvable;
  j["p_solvable"] = a.p_solvable;
  j["ci95"] = {a.ci.lo, a.ci.hi};
  j["rank_over_m"] = mean_json(a.rank_over_m);
  j["nullity_over_n"] = mean_json(a.nullity_over_n);
  j["n_star_over_n"] = mean_json(a.n_star_over_n);
  j["m_star_over_n"] = mean_json(a.m_star_over_n);
  j["core_nullity_over_n"] = mean_json(a.core_nullity_over_n);
  if (a.flip_fraction) j["flip_fraction"] = mean_json(*a.flip_fraction);
  if (a.cluster_distance) j["cluster_distance"] = mean_json(*a.cluster_distance);
  if (cfg.kind == ExperimentKind::Overlap) j["overlap_tv"] = mean_json(a.overlap_tv);
  nlohmann::ordered_json p;
  p["rho"] = a.rho;
  p["n_star_over_n"] = a.pred_n_star;
  p["m_star_over_n"] = a.pred_m_star;
  p["rank_over_m"] = a.pred_rank_frac ? nlohmann::ordered_json(*a.pred_rank_frac) : nlohmann::ordered_json(1.0);
  p["cluster_exponent"] = a.pred_cluster_exponent ? nlohmann::ordered_json(*a.pred_cluster_exponent) : nlohmann::ordered_json(nullptr);
  j["predicted"] = p;
  return j;
}

inline nlohmann::ordered_json summary_json(const ExperimentConfig& cfg, const ExperimentResult& res,
                                           const std::optional<std::string>& started_at = std::nullopt) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["tool_version"] = kToolVersion;
  j["started_at"] = started_at ? nlohmann::ordered_json(*started_at) : nlohmann::ordered_json(nullptr);
  j["grid"] = nlohmann::ordered_json::array();
  for (const auto& a : res.table) j["grid"].push_back(aggregate_json(cfg, a));
  return j;
}

inline PlotTable experiment_plot(const ExperimentConfig& cfg, const ExperimentResult& res) {
  PlotTable t;
  t.x_label = "d";
  PlotSeries emp{"empirical", {}, {}, true}, pred{"predicted", {}, {}, false};
  for (const auto& a : res.table) {
    emp.x.push_back(a.d);
    pred.x.push_back(a.d);
    switch (cfg.kind) {
      case ExperimentKind::Scan:
        emp.y.push_back(a.p_solvable);
        pred.y.push_back(a.d < analytic::d_k(cfg.k) ? 1.0 : 0.0);
        break;
      case ExperimentKind::Overlap:
        emp.y.push_back(a.overlap_tv.count ? a.overlap_tv.mean : std::nan(""));
        pred.y.push_back(0.0);
        break;
      case ExperimentKind::Clusters:
        emp.y.push_back(a.core_nullity_over_n.mean);
        pred.y.push_back(a.pred_cluster_exponent.value_or(std::nan("")));
        break;
      case ExperimentKind::Coresize:
        emp.y.push_back(a.n_star_over_n.mean);
        pred.y.push_back(a.pred_n_star);
        break;
      case ExperimentKind::Rank:
        emp.y.push_back(a.rank_over_m.mean);
        pred.y.push_back(a.pred_rank_frac.value_or(1.0));
        break;
    }
  }
  const std::string setting = " (q=" + std::to_string(cfg.q) + ", k=" + std::to_string(cfg.k) + ", n=" + std::to_string(cfg.n) + ")";
  switch (cfg.kind) {
    case ExperimentKind::Scan: t.title = "P[solvable]" + setting, t.y_label = "P[solvable]"; break;
    case ExperimentKind::Overlap: t.title = "overlap TV distance" + setting, t.y_label = "mean TV"; break;
    case ExperimentKind::Clusters: t.title = "core nullity" + setting, t.y_label = "nul(A*)/n"; break;
    case ExperimentKind::Coresize: t.title = "core size" + setting, t.y_label = "n*/n"; break;
    case ExperimentKind::Rank: t.title = "rank" + setting, t.y_label = "rk(A)/m"; break;
  }
  t.series = {emp, pred};
  return t;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

/// Writes records.csv, summary.json and plot.svg into dir.
inline void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ExperimentResult& res,
                             const std::optional<std::string>& started_at = std::nullopt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "records.csv", records_csv(res.records));
  write_text(dir / "summary.json", summary_json(cfg, res, started_at).dump(2) + "\n");
  emit_plot(experiment_plot(cfg, res), dir / "plot.svg");
}

}  // namespace fqlin
