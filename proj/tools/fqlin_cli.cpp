// fqlin: command-line front end for the fqlin library.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fqlin/fqlin.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace fqlin;

unsigned default_threads() { return std::max(1U, std::thread::hardware_concurrency()); }

// "uniform", "allones" or "file:PATH" with lines "<weight> <c1> ... <ck>".
RowDistribution parse_dist(const std::string& spec) {
  if (spec == "uniform") return RowDistribution::uniform_nonzero();
  if (spec == "allones") return RowDistribution::all_ones();
  if (spec.rfind("file:", 0) == 0) {
    const auto path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw Error("cannot open distribution file " + path);
    std::vector<std::pair<Tuple, double>> weights;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      double w;
      if (!(ls >> w)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError(line_no, "expected a weight");
      }
      Tuple t;
      unsigned c;
      while (ls >> c) {
        if (c > 255) throw FieldMismatch("code " + std::to_string(c) + " out of range");
        t.push_back(static_cast<std::uint8_t>(c));
      }
      if (!ls.eof()) throw ParseError(line_no, "expected coefficient codes");
      if (!(w > 0.0)) throw ParseError(line_no, "weight must be positive");
      weights.emplace_back(std::move(t), w);
    }
    // File weights are relative; normalize to probabilities.
    double total = 0.0;
    for (const auto& [t, w] : weights) total += w;
    for (auto& [t, w] : weights) w /= total;
    return RowDistribution::custom(weights);
  }
  throw InvalidArgument("unknown distribution '" + spec + "' (uniform, allones or file:PATH)");
}

std::string iso_now() {
  const auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Appends "--key value" for every config entry whose flag is not already given.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  const auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end() || it + 1 == args.end()) return args;
  const std::string path = *(it + 1);
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    if (value.is_string())
      args.push_back(value.get<std::string>());
    else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      args.push_back(joined);
    } else
      args.push_back(value.dump());
  }
  return args;
}

struct ExperimentFlags {
  unsigned q = 2, k = 3;
  std::size_t n = 300, steps = 1, trials = 1, pairs = 10;
  double d_min = 1.0, d_max = 1.0;
  std::uint64_t seed = 0;
  std::string dist = "uniform";
  std::string out;
  unsigned threads = default_threads();
  bool timing = false;
};

void add_experiment_flags(CLI::App* sub, ExperimentFlags& f, bool overlap) {
  sub->add_option("--q", f.q, "field order (prime power <= 256)")->capture_default_str();
  sub->add_option("--k", f.k, "row weight (>= 3)")->capture_default_str();
  sub->add_option("--n", f.n, "number of variables")->capture_default_str();
  sub->add_option("--d-min", f.d_min, "smallest average degree")->capture_default_str();
  sub->add_option("--d-max", f.d_max, "largest average degree")->capture_default_str();
  sub->add_option("--steps", f.steps, "grid points")->capture_default_str();
  sub->add_option("--trials", f.trials, "instances per grid point")->capture_default_str();
  sub->add_option("--seed", f.seed, "master seed")->required();
  sub->add_option("--dist", f.dist, "uniform | allones | file:PATH")->capture_default_str();
  sub->add_option("--out", f.out, "output directory (records.csv, summary.json, plot.svg)");
  sub->add_option("--threads", f.threads, "worker threads");
  sub->add_flag("--timing", f.timing, "record wall time per trial (output is then not reproducible)");
  if (overlap) sub->add_option("--pairs", f.pairs, "solution pairs per solvable instance")->capture_default_str();
}

int run_experiment_command(ExperimentKind kind, const ExperimentFlags& f, bool as_json) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.q = f.q;
  cfg.k = f.k;
  cfg.n = f.n;
  cfg.dist = parse_dist(f.dist);
  cfg.dist_spec = f.dist;
  cfg.d_min = f.d_min;
  cfg.d_max = f.d_max;
  cfg.steps = f.steps;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.overlap_pairs = f.pairs;
  cfg.threads = std::max(1U, f.threads);
  cfg.timing = f.timing;
  std::optional<std::string> started;
  if (cfg.timing) started = iso_now();
  const auto res = run_experiment(cfg);
  if (!f.out.empty()) write_experiment(f.out, cfg, res, started);
  if (as_json) {
    print_json(summary_json(cfg, res, started));
    return 0;
  }
  std::cout << to_string(kind) << ": q=" << cfg.q << " k=" << cfg.k << " n=" << cfg.n << " trials=" << cfg.trials << " seed=" << cfg.seed << '\n';
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& a : res.table) {
    std::cout << "d=" << a.d << "  P[solvable]=" << a.p_solvable << " [" << a.ci.lo << ", " << a.ci.hi << "]";
    switch (kind) {
      case ExperimentKind::Scan: break;
      case ExperimentKind::Overlap:
        std::cout << "  mean TV=" << (a.overlap_tv.count ? std::to_string(a.overlap_tv.mean) : std::string("n/a")) << " over "
                  << a.overlap_tv.count << " solvable";
        break;
      case ExperimentKind::Clusters:
        std::cout << "  nul(A*)/n=" << a.core_nullity_over_n.mean << " predicted="
                  << (a.pred_cluster_exponent ? std::to_string(*a.pred_cluster_exponent) : std::string("n/a"))
                  << "  flip/n=" << (a.flip_fraction ? a.flip_fraction->mean : 0.0);
        if (a.cluster_distance && a.cluster_distance->count) std::cout << "  pair distance/n=" << a.cluster_distance->mean;
        break;
      case ExperimentKind::Coresize:
        std::cout << "  n*/n=" << a.n_star_over_n.mean << " (" << a.pred_n_star << ")  m*/n=" << a.m_star_over_n.mean << " (" << a.pred_m_star << ")";
        break;
      case ExperimentKind::Rank:
        std::cout << "  rk/m=" << a.rank_over_m.mean << " (" << a.pred_rank_frac.value_or(1.0) << ")";
        break;
    }
    std::cout << '\n';
  }
  if (!f.out.empty()) std::cout << "wrote " << f.out << '\n';
  return 0;
}

std::vector<std::uint64_t> parse_group(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw CLI::ValidationError("--group", "expected comma-separated prime powers, got '" + s + "'");
    out.push_back(std::stoull(part));
  }
  if (out.empty()) throw CLI::ValidationError("--group", "empty group");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random sparse linear systems over finite fields", "fqlin"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  bool as_json = false;
  std::string config;

  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", as_json, "machine-readable output");
    sub->add_option("--config", config, "JSON file with default flag values");
  };

  // thresholds
  unsigned th_k = 3;
  std::optional<double> th_d;
  auto* thresholds = app.add_subcommand("thresholds", "threshold values and predictions for k (and d)");
  thresholds->add_option("--k", th_k, "row weight")->required();
  thresholds->add_option("--d", th_d, "average degree for the per-d predictions");
  common(thresholds);

  // sample
  unsigned s_q = 2, s_k = 3;
  std::size_t s_n = 0;
  double s_d = 0;
  std::uint64_t s_seed = 0;
  std::string s_dist = "uniform", s_out;
  bool s_planted = false;
  auto* sample = app.add_subcommand("sample", "draw a random system");
  sample->add_option("--q", s_q)->required();
  sample->add_option("--k", s_k)->capture_default_str();
  sample->add_option("--n", s_n)->required();
  sample->add_option("--d", s_d)->required();
  sample->add_option("--seed", s_seed)->required();
  sample->add_option("--dist", s_dist)->capture_default_str();
  sample->add_flag("--planted", s_planted, "y = A x for a uniform x");
  sample->add_option("--out", s_out, "system file (default: stdout)");
  common(sample);

  // solve / peel
  std::string in_path;
  std::optional<unsigned> in_q;
  auto* solve = app.add_subcommand("solve", "rank, nullity and solvability of a system file");
  solve->add_option("--in", in_path, "system file")->required()->check(CLI::ExistingFile);
  solve->add_option("--q", in_q, "expected field order");
  common(solve);
  std::optional<std::uint64_t> pi_seed;
  auto* peel_cmd = app.add_subcommand("peel", "2-core of a system file");
  peel_cmd->add_option("--in", in_path, "system file")->required()->check(CLI::ExistingFile);
  peel_cmd->add_option("--q", in_q, "expected field order");
  peel_cmd->add_option("--pi-seed", pi_seed, "seed for a random tie-breaking order");
  common(peel_cmd);

  // experiments
  ExperimentFlags ef;
  std::vector<std::pair<CLI::App*, ExperimentKind>> experiments;
  for (auto [name, kind, help] : {std::tuple{"scan", ExperimentKind::Scan, "empirical P[solvable] over a d grid"},
                                  std::tuple{"overlap", ExperimentKind::Overlap, "overlap of random solution pairs"},
                                  std::tuple{"clusters", ExperimentKind::Clusters, "core nullity and flippable cycles"},
                                  std::tuple{"coresize", ExperimentKind::Coresize, "2-core size"},
                                  std::tuple{"rank", ExperimentKind::Rank, "rank of A"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_experiment_flags(sub, ef, kind == ExperimentKind::Overlap);
    common(sub);
    experiments.emplace_back(sub, kind);
  }

  // secondmoment
  unsigned sm_k = 3;
  double sm_d = 0;
  std::size_t sm_grid = 1001;
  std::string sm_out;
  auto* second = app.add_subcommand("secondmoment", "q = 2 second-moment exponent F(z)");
  second->add_option("--k", sm_k)->capture_default_str();
  second->add_option("--d", sm_d)->required();
  second->add_option("--grid", sm_grid)->capture_default_str();
  second->add_option("--out", sm_out, "CSV file of (z, F) rows");
  common(second);

  // bethe
  unsigned b_q = 2, b_k = 3, b_threads = default_threads();
  double b_d = 0, b_alpha = 0;
  std::size_t b_samples = 100000;
  std::uint64_t b_seed = 0;
  std::string b_dist = "uniform";
  auto* bethe = app.add_subcommand("bethe", "Monte Carlo Bethe functional against its closed form");
  bethe->add_option("--q", b_q)->required();
  bethe->add_option("--k", b_k)->capture_default_str();
  bethe->add_option("--d", b_d)->required();
  bethe->add_option("--alpha", b_alpha)->required();
  bethe->add_option("--samples", b_samples)->capture_default_str();
  bethe->add_option("--seed", b_seed)->required();
  bethe->add_option("--dist", b_dist)->capture_default_str();
  bethe->add_option("--threads", b_threads);
  common(bethe);

  // abelian
  std::string a_group;
  unsigned a_k = 3, a_threads = default_threads();
  std::size_t a_n = 300, a_steps = 10, a_trials = 100;
  double a_dmin = 2.0, a_dmax = 3.5;
  std::uint64_t a_seed = 0;
  std::string a_out;
  auto* abelian = app.add_subcommand("abelian", "all-ones systems over a finite abelian group");
  abelian->add_option("--group", a_group, "cyclic prime-power components, e.g. 4,3")->required();
  abelian->add_option("--k", a_k)->capture_default_str();
  abelian->add_option("--n", a_n)->capture_default_str();
  abelian->add_option("--d-min", a_dmin)->capture_default_str();
  abelian->add_option("--d-max", a_dmax)->capture_default_str();
  abelian->add_option("--steps", a_steps)->capture_default_str();
  abelian->add_option("--trials", a_trials)->capture_default_str();
  abelian->add_option("--seed", a_seed)->required();
  abelian->add_option("--out", a_out, "CSV file");
  abelian->add_option("--threads", a_threads);
  common(abelian);

  // symmetry
  unsigned y_q = 2, y_k = 3;
  std::size_t y_n = 0, y_T = 1, y_trials = 10;
  double y_d = 0, y_eps = 0.01;
  std::uint64_t y_seed = 0;
  std::string y_dist = "uniform";
  auto* symmetry = app.add_subcommand("symmetry", "pairwise symmetry of kernel marginals after random pinning");
  symmetry->add_option("--q", y_q)->required();
  symmetry->add_option("--k", y_k)->capture_default_str();
  symmetry->add_option("--n", y_n)->required();
  symmetry->add_option("--d", y_d)->required();
  symmetry->add_option("--T", y_T, "pin theta - 1 variables, theta uniform in [T]")->capture_default_str();
  symmetry->add_option("--eps", y_eps)->capture_default_str();
  symmetry->add_option("--trials", y_trials)->capture_default_str();
  symmetry->add_option("--seed", y_seed)->required();
  symmetry->add_option("--dist", y_dist)->capture_default_str();
  common(symmetry);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  } catch (const fqlin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (thresholds->parsed()) {
      const auto rep = analytic::threshold_report(th_k, th_d);
      if (as_json) {
        json j;
        j["k"] = rep.k;
        j["mu_star"] = rep.mu_star;
        j["d_k_star"] = rep.d_k_star;
        j["d_k"] = rep.d_k;
        if (rep.at) {
          json a;
          a["d"] = rep.at->d;
          a["rho"] = rep.at->rho;
          a["phi_max"] = rep.at->phi_max;
          a["phi_argmax"] = rep.at->phi_argmax;
          a["n_star_frac"] = rep.at->n_star_frac;
          a["m_star_frac"] = rep.at->m_star_frac;
          a["rank_frac"] = optional_json(rep.at->rank_frac);
          a["cluster_exponent"] = optional_json(rep.at->cluster_exponent);
          a["pi_k"] = optional_json(rep.at->pi_k);
          j["at"] = a;
        }
        print_json(j);
      } else {
        std::cout << std::setprecision(10) << "k          " << rep.k << "\nd_k_star   " << rep.d_k_star << "  (mu* = " << rep.mu_star
                  << ")\nd_k        " << rep.d_k << '\n';
        if (rep.at) {
          const auto& a = *rep.at;
          std::cout << "at d = " << a.d << "\n  rho          " << a.rho << "\n  phi_max      " << a.phi_max << " at alpha = " << a.phi_argmax
                    << "\n  n_star/n     " << a.n_star_frac << "\n  m_star/n     " << a.m_star_frac << '\n';
          if (a.pi_k) std::cout << "  pi_k         " << *a.pi_k << '\n';
          if (a.rank_frac) std::cout << "  rank/m       " << *a.rank_frac << '\n';
          if (a.cluster_exponent) std::cout << "  cluster exp  " << *a.cluster_exponent << " (x ln q)\n";
        }
      }
      return 0;
    }

    if (sample->parsed()) {
      EnsembleParams p{s_q, s_k, s_n, s_d, parse_dist(s_dist), s_seed};
      auto sys = sample_system(p);
      std::optional<std::vector<Element>> planted;
      if (s_planted) planted = plant(sys, s_seed);
      if (!s_out.empty())
        write_system(std::filesystem::path(s_out), sys);
      if (as_json) {
        json j;
        j["q"] = sys.q();
        j["n"] = sys.n;
        j["k"] = sys.k;
        j["m"] = sys.m();
        if (planted) {
          json x = json::array();
          for (auto e : *planted) x.push_back(e.code);
          j["planted"] = x;
        }
        if (s_out.empty()) {
          std::ostringstream o;
          write_system(o, sys);
          j["system"] = o.str();
        } else {
          j["out"] = s_out;
        }
        print_json(j);
      } else if (s_out.empty()) {
        write_system(std::cout, sys);
      } else {
        std::cout << "wrote " << s_out << " (m=" << sys.m() << ")\n";
      }
      return 0;
    }

    if (solve->parsed()) {
      const auto sys = read_system(std::filesystem::path(in_path), in_q);
      const auto e = eliminate(sys, EliminateOptions{false, {}});
      json j;
      j["rank"] = e.rank;
      j["nullity"] = e.nullity;
      j["solvable"] = e.solvable;
      std::cout << j.dump() << '\n';
      return 0;
    }

    if (peel_cmd->parsed()) {
      const auto sys = read_system(std::filesystem::path(in_path), in_q);
      auto pi = identity_permutation(sys.n);
      if (pi_seed) {
        auto g = rng::substream(*pi_seed, 0);
        rng::shuffle(g, std::span<std::uint32_t>(pi));
      }
      const auto [report, trace] = peel(sys, pi);
      const auto cycles = find_flippable_cycles(sys, report);
      json j;
      j["n_star"] = report.n_star;
      j["m_star"] = report.m_star;
      j["flippable_cycles"] = cycles.size();
      if (as_json) {
        json cols = json::array(), rows = json::array();
        for (auto c : report.core_cols) cols.push_back(c + 1);
        for (auto r : report.core_rows) rows.push_back(r + 1);
        j["core_variables"] = cols;
        j["core_rows"] = rows;
        print_json(j);
      } else {
        std::cout << j.dump() << '\n';
      }
      return 0;
    }

    for (auto [sub, kind] : experiments)
      if (sub->parsed()) return run_experiment_command(kind, ef, as_json);

    if (second->parsed()) {
      const auto c = analytic::second_moment_curve(sm_k, sm_d, sm_grid);
      if (!sm_out.empty()) {
        std::ostringstream o;
        o << "z,F\n" << std::setprecision(17);
        for (std::size_t i = 0; i < c.z.size(); ++i) o << c.z[i] << ',' << c.F[i] << '\n';
        write_text(sm_out, o.str());
        PlotTable t{"F(z), k=" + std::to_string(sm_k) + ", d=" + detail::fmt(sm_d), "z", "F(z)", {{"F", c.z, c.F, false}}};
        emit_plot(t, std::filesystem::path(sm_out).replace_extension(".svg"));
      }
      const double f_half = analytic::second_moment_exponent(sm_k, sm_d, 0.5);
      if (as_json) {
        json j;
        j["k"] = sm_k;
        j["d"] = sm_d;
        j["grid"] = sm_grid;
        j["argmax"] = c.argmax;
        j["max"] = c.max;
        j["F_half"] = f_half;
        print_json(j);
      } else {
        std::cout << std::setprecision(10) << "argmax z* = " << c.argmax << "\nF(z*)     = " << c.max << "\nF(1/2)    = " << f_half << '\n';
      }
      return 0;
    }

    if (bethe->parsed()) {
      const auto r = bethe_mc(b_k, b_d, b_alpha, b_q, parse_dist(b_dist), b_samples, b_seed, std::max(1U, b_threads));
      const double closed = bethe_closed_form(b_k, b_d, b_alpha, b_q);
      const double z = r.stderr_ > 0 ? (r.estimate - closed) / r.stderr_ : 0.0;
      if (as_json) {
        json j;
        j["q"] = b_q;
        j["k"] = b_k;
        j["d"] = b_d;
        j["alpha"] = b_alpha;
        j["samples"] = b_samples;
        j["estimate"] = r.estimate;
        j["stderr"] = r.stderr_;
        j["b_prime"] = r.b_prime;
        j["b_second"] = r.b_second;
        j["closed_form"] = closed;
        j["z_score"] = z;
        print_json(j);
      } else {
        std::cout << std::setprecision(10) << "estimate     " << r.estimate << "\nstderr       " << r.stderr_ << "\nclosed_form  " << closed
                  << "\nz-score      " << z << '\n';
      }
      return 0;
    }

    if (abelian->parsed()) {
      const GroupSpec g{parse_group(a_group)};
      const auto grid = d_grid(a_dmin, a_dmax, a_steps);
      const auto pts = abelian_scan(g, a_k, a_n, grid, a_trials, a_seed, std::max(1U, a_threads));
      std::ostringstream csv;
      csv << "d,trials,solvable,p,ci_lo,ci_hi\n";
      for (const auto& p : pts)
        csv << detail::shortest(p.d) << ',' << p.trials << ',' << p.solvable << ',' << detail::shortest(p.probability) << ','
            << detail::shortest(p.ci.lo) << ',' << detail::shortest(p.ci.hi) << '\n';
      if (!a_out.empty()) write_text(a_out, csv.str());
      if (as_json) {
        json j;
        j["group"] = g.components;
        j["k"] = a_k;
        j["n"] = a_n;
        j["trials"] = a_trials;
        j["seed"] = a_seed;
        j["d_k"] = analytic::d_k(a_k);
        json rows = json::array();
        for (const auto& p : pts) rows.push_back({{"d", p.d}, {"solvable", p.solvable}, {"p", p.probability}, {"ci95", {p.ci.lo, p.ci.hi}}});
        j["grid"] = rows;
        print_json(j);
      } else {
        std::cout << csv.str();
      }
      return 0;
    }

    if (symmetry->parsed()) {
      const auto sys = sample_system(EnsembleParams{y_q, y_k, y_n, y_d, parse_dist(y_dist), y_seed});
      const double frac = pinning_symmetry_experiment(sys, y_T, y_eps, y_trials, y_seed);
      if (as_json) {
        json j;
        j["q"] = y_q;
        j["k"] = y_k;
        j["n"] = y_n;
        j["d"] = y_d;
        j["m"] = sys.m();
        j["T"] = y_T;
        j["eps"] = y_eps;
        j["trials"] = y_trials;
        j["symmetric_fraction"] = frac;
        print_json(j);
      } else {
        std::cout << "fraction of pinned systems with defect < eps n^2: " << frac << '\n';
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fqlin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
