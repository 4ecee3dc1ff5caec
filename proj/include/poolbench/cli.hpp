#pragma once

// The `poolbench` command line. Each subcommand wraps one library operation and
// writes TSV/CSV; exit status is 0 on success, 2 on usage errors, 1 on data errors.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poolbench/agreement.hpp"
#include "poolbench/assemble.hpp"
#include "poolbench/assess/server.hpp"
#include "poolbench/assess/store.hpp"
#include "poolbench/efficiency.hpp"
#include "poolbench/io.hpp"
#include "poolbench/measures.hpp"
#include "poolbench/pooling.hpp"
#include "poolbench/rankstats.hpp"
#include "poolbench/robustness.hpp"

namespace poolbench::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

namespace detail {

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    io::write_file(out_path, text);
  }
}

inline std::vector<std::string> select_topics(const std::vector<std::string>& universe, const std::string& topics_file) {
  if (topics_file.empty()) return universe;
  const auto chosen = io::parse_topic_selection_file(topics_file).apply(universe);
  return {chosen.begin(), chosen.end()};
}

inline std::vector<RankedRun> load_runs_filtered(const std::string& dir, const std::string& run_list) {
  auto runs = io::load_runs(dir);
  if (run_list.empty()) return runs;
  const auto names = io::parse_name_list_file(run_list);
  std::vector<RankedRun> out;
  for (const auto& n : names) {
    auto it = std::find_if(runs.begin(), runs.end(), [&](const RankedRun& r) { return r.run_tag == n; });
    if (it == runs.end()) throw DataError("run list names " + n + ", which is not in " + dir);
    out.push_back(*it);
  }
  return out;
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "pri" || s == "PRI") return Strategy::PRI;
  if (s == "rnd" || s == "RND") return Strategy::RND;
  throw UsageError("--strategy must be pri or rnd");
}

inline Measure measure_option(const std::string& s) {
  try {
    return parse_measure(s);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

inline Projection projection_option(const std::string& s) {
  try {
    return parse_projection(s);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

inline std::string alpha_row(const std::string& scope, Projection p, const AgreementResult& r) {
  return scope + "\t" + std::string(to_string(p)) + "\t" + io::format_double(r.alpha, 4) + "\t" +
         io::format_double(r.observed, 6) + "\t" + io::format_double(r.expected, 6) + "\t" +
         std::to_string(r.unit_count) + "\n";
}

inline std::string tukey_report(const TukeyResult& r) {
  std::string s = "# design=" + std::string(r.design == Design::Paired ? "paired" : "unpaired") +
                  " V=" + io::format_double(r.residual_variance, 8) + " df=" + io::format_double(r.df, 0) +
                  " k=" + std::to_string(r.groups.size()) + "\n";
  s += "pair\tdiff\tq\tp\tES\n";
  for (const auto& p : r.pairwise) {
    s += r.groups[p.a] + "-" + r.groups[p.b] + "\t" + io::format_double(p.mean_diff, 6) + "\t" +
         io::format_double(p.q, 4) + "\t" + io::format_double(p.p, 6) + "\t" + io::format_double(p.effect_size, 4) +
         "\n";
  }
  return s;
}

/// Header row names treatments after a leading block column; cells are numbers or NA.
inline std::pair<std::vector<std::string>, std::vector<std::vector<std::optional<double>>>> read_block_table(
    const std::string& path) {
  auto in = io::open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_blank_or_comment(line)) continue;
    auto f = io::split_ws(line);
    if (names.empty()) {
      if (f.size() < 3) throw ParseError(path, lineno, "header needs a block column and at least two treatments");
      for (std::size_t i = 1; i < f.size(); ++i) names.emplace_back(f[i]);
      continue;
    }
    if (f.size() != names.size() + 1) throw ParseError(path, lineno, "expected " + std::to_string(names.size() + 1) + " fields");
    std::vector<std::optional<double>> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f[i] == "NA") {
        row.push_back(std::nullopt);
        continue;
      }
      double v = 0;
      if (!io::parse_number(f[i], v)) throw ParseError(path, lineno, "bad value '" + std::string(f[i]) + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (names.empty()) throw DataError(path + ": empty table");
  return {names, rows};
}

/// Long format: `group value` per line; groups keep their first-seen order.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_group_table(const std::string& path) {
  auto in = io::open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> groups;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_blank_or_comment(line)) continue;
    auto f = io::split_ws(line);
    if (f.size() != 2) throw ParseError(path, lineno, "expected 2 fields (group value)");
    double v = 0;
    if (!io::parse_number(f[1], v)) throw ParseError(path, lineno, "bad value '" + std::string(f[1]) + "'");
    auto it = std::find(names.begin(), names.end(), f[0]);
    if (it == names.end()) {
      names.emplace_back(f[0]);
      groups.emplace_back();
      it = names.end() - 1;
    }
    groups[static_cast<std::size_t>(it - names.begin())].push_back(v);
  }
  return {names, groups};
}

inline std::map<std::string, std::map<std::string, PooledTopic>> load_version_pools(const std::string& dir,
                                                                                   const std::vector<std::string>& versions) {
  std::map<std::string, std::map<std::string, PooledTopic>> out;
  for (const auto& v : versions) out[v] = parse_pools_file(fs::path(dir) / (v + ".pool"));
  return out;
}

}  // namespace detail

/// Parses `argv` and runs one subcommand. Returns the process exit status.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Pooling, judging and meta-evaluation workbench for IR test collections", "poolbench"};
  app.require_subcommand(1);

  // pool
  std::string runs_dir, topics_file, out_path, version_name, strategy_name = "pri";
  int depth = 15;
  std::uint64_t seed = 0;
  auto* pool = app.add_subcommand("pool", "Build depth-k pools with PRI or RND presentation order");
  pool->add_option("--runs", runs_dir, "Directory of run files")->required();
  pool->add_option("--depth", depth, "Pool depth")->capture_default_str();
  pool->add_option("--strategy", strategy_name, "pri or rnd")->capture_default_str();
  pool->add_option("--seed", seed, "Shuffle seed (rnd)")->capture_default_str();
  pool->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  pool->add_option("--version", version_name, "Output name (default: strategy)");
  pool->add_option("--out", out_path, "Output directory")->required();

  // eval
  std::string qrels_file, measure_name = "ndcg", run_list;
  int cutoff = 10;
  auto* eval = app.add_subcommand("eval", "Topic x run score matrix for one measure and qrels version");
  eval->add_option("--runs", runs_dir, "Directory of run files")->required();
  eval->add_option("--qrels", qrels_file, "Qrels file")->required();
  eval->add_option("--measure", measure_name, "ndcg, q, nerr or irbu")->capture_default_str();
  eval->add_option("--cutoff", cutoff, "Measurement depth")->capture_default_str();
  eval->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  eval->add_option("--run-list", run_list, "Evaluate only these runs");
  eval->add_option("--out", out_path, "Output file (default stdout)");

  // agree
  std::string matrix_file, assignments_file, projection_name = "all";
  bool per_topic = false, leave_one_out = false;
  auto* agree = app.add_subcommand("agree", "Ordinal Krippendorff's alpha");
  agree->add_option("--matrix", matrix_file, "Label matrix TSV")->required();
  agree->add_option("--assignments", assignments_file, "topic assessor version table (needed for rnd/pri)");
  agree->add_option("--projection", projection_name, "all, rnd or pri")->capture_default_str();
  agree->add_flag("--per-topic", per_topic, "Per-topic alpha and their mean");
  agree->add_flag("--leave-one-out", leave_one_out, "Alpha without each assessor in turn");
  agree->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  agree->add_option("--out", out_path, "Output file (default stdout)");

  // kappa
  std::string version_a, version_b;
  auto* kappa = app.add_subcommand("kappa", "Mean per-topic quadratic weighted kappa between two versions");
  kappa->add_option("--matrix", matrix_file, "Label matrix TSV")->required();
  kappa->add_option("--assignments", assignments_file, "topic assessor version table")->required();
  kappa->add_option("--a", version_a, "First qrels version")->required();
  kappa->add_option("--b", version_b, "Second qrels version")->required();
  kappa->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  kappa->add_option("--out", out_path, "Output file (default stdout)");

  // rankcmp
  std::string matrix_a, matrix_b;
  std::vector<std::string> matrices;
  bool want_ci = false;
  auto* rankcmp = app.add_subcommand("rankcmp", "Kendall's tau between run rankings of score matrices");
  rankcmp->add_option("--a", matrix_a, "First score matrix");
  rankcmp->add_option("--b", matrix_b, "Second score matrix");
  rankcmp->add_option("--matrices", matrices, "Score matrices for an all-pairs tau table (CSV)");
  rankcmp->add_flag("--ci", want_ci, "Add a 95% confidence interval");
  rankcmp->add_option("--out", out_path, "Output file (default stdout)");

  // tukey
  std::string table_file;
  bool unpaired = false;
  auto* tukey = app.add_subcommand("tukey", "Tukey HSD with effect sizes");
  tukey->add_option("--table", table_file, "Paired: block x treatment TSV; unpaired: 'group value' lines")->required();
  tukey->add_flag("--unpaired", unpaired, "One-way (Tukey-Kramer) design");
  tukey->add_option("--out", out_path, "Output file (default stdout)");

  // power
  double pilot_t = 0, alpha_level = 0.05, target = 0.70;
  std::size_t pilot_n = 0;
  auto* power = app.add_subcommand("power", "Achieved power and required sample size of a paired t-test");
  power->add_option("--t", pilot_t, "Observed t statistic")->required();
  power->add_option("--n", pilot_n, "Observed number of pairs")->required();
  power->add_option("--alpha", alpha_level, "Significance level")->capture_default_str();
  power->add_option("--target", target, "Target power")->capture_default_str();

  // loto
  std::string teams_file, vdip_file;
  auto* loto = app.add_subcommand("loto", "Leave-one-team-out reusability experiment");
  loto->add_option("--runs", runs_dir, "Directory of all pooled run files")->required();
  loto->add_option("--run-list", run_list, "Runs to rank (default: all)");
  loto->add_option("--qrels", qrels_file, "Qrels file")->required();
  loto->add_option("--teams", teams_file, "run_tag team table")->required();
  loto->add_option("--measure", measure_name, "ndcg, q, nerr or irbu")->capture_default_str();
  loto->add_option("--cutoff", cutoff, "Measurement depth")->capture_default_str();
  loto->add_option("--depth", depth, "Pool depth")->capture_default_str();
  loto->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  loto->add_option("--out", out_path, "Report TSV (default stdout)");
  loto->add_option("--vdip", vdip_file, "Per-run full vs LOTO scores (CSV)");

  // rrfilter
  std::size_t lo = 1, hi = 5;
  auto* rrfilter = app.add_subcommand("rrfilter", "Keep qrels entries some run ranks within [lo, hi]");
  rrfilter->add_option("--qrels", qrels_file, "Qrels file")->required();
  rrfilter->add_option("--runs", runs_dir, "Directory of run files")->required();
  rrfilter->add_option("--lo", lo, "Highest rank kept")->capture_default_str();
  rrfilter->add_option("--hi", hi, "Lowest rank kept")->capture_default_str();
  rrfilter->add_option("--out", out_path, "Output file (default stdout)");

  // efficiency
  std::string log_file;
  std::vector<std::string> versions;
  auto* efficiency = app.add_subcommand("efficiency", "Efficiency criteria from an activity log");
  efficiency->add_option("--log", log_file, "JSON-lines activity log")->required();
  efficiency->add_option("--assignments", assignments_file, "topic assessor version table (enables Tukey HSD)");
  efficiency->add_option("--versions", versions, "Versions compared (default: all assigned)")->delimiter(',');
  efficiency->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  efficiency->add_option("--out", out_path, "Output file (default stdout)");

  // histogram
  std::string pools_dir;
  std::size_t max_rank = 0;
  auto* histogram = app.add_subcommand("histogram", "Relevant labels per presentation rank");
  histogram->add_option("--matrix", matrix_file, "Label matrix TSV")->required();
  histogram->add_option("--assignments", assignments_file, "topic assessor version table")->required();
  histogram->add_option("--pools", pools_dir, "Directory of <version>.pool files")->required();
  histogram->add_option("--strategy", strategy_name, "pri or rnd")->required();
  histogram->add_option("--max-rank", max_rank, "Ranks reported (default: minimum pool size)");
  histogram->add_option("--topics", topics_file, "Topic inclusion/exclusion list");
  histogram->add_option("--out", out_path, "Output file (default stdout)");

  // validtopics
  std::vector<std::string> qrels_files;
  auto* validtopics = app.add_subcommand("validtopics", "Topics with a relevant document in every qrels file");
  validtopics->add_option("--qrels", qrels_files, "Qrels files")->required();
  validtopics->add_option("--out", out_path, "Output file (default stdout)");

  // assign
  std::string assessors_file;
  auto* assign = app.add_subcommand("assign", "Seeded balanced assignment of (topic, version) pairs to assessors");
  assign->add_option("--assessors", assessors_file, "Assessor id list")->required();
  assign->add_option("--topics", topics_file, "Topic id list")->required();
  assign->add_option("--versions", versions, "Qrels versions")->required()->delimiter(',');
  assign->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  assign->add_option("--out", out_path, "Output file (default stdout)");

  // serve
  std::string host = "127.0.0.1", docs_dir, static_dir, topics_xml;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the judging service");
  serve->add_option("--assignments", assignments_file, "topic assessor version table")->required();
  serve->add_option("--pools", pools_dir, "Directory of <version>.pool files")->required();
  serve->add_option("--log", log_file, "Append-only event file")->required();
  serve->add_option("--docs", docs_dir, "Directory of <docid>.html files");
  serve->add_option("--static", static_dir, "UI bundle served at /");
  serve->add_option("--topic-file", topics_xml, "Topic definitions (<query> blocks)");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << app.help();
    }
    return 2;
  }

  try {
    if (*pool) {
      if (depth < 1) throw UsageError("--depth must be >= 1");
      const Strategy strategy = detail::parse_strategy(strategy_name);
      const auto runs = io::load_runs(runs_dir);
      const auto topics = detail::select_topics(covered_topics(runs), topics_file);
      const auto pools = build_pools(runs, topics, {depth, strategy, seed});
      const std::string name = version_name.empty() ? std::string(to_string(strategy)) : version_name;
      io::write_file(fs::path(out_path) / (name + ".pool"), serialize_pools(pools));
      std::size_t docs = 0;
      for (const auto& p : pools) docs += p.documents.size();
      out << "topics=" << pools.size() << " topicdocs=" << docs << "\n";
    } else if (*eval) {
      const auto runs = detail::load_runs_filtered(runs_dir, run_list);
      const auto qrels = io::parse_qrels_file(qrels_file);
      const auto topics = detail::select_topics(qrels.topics(), topics_file);
      MeasureConfig cfg;
      cfg.cutoff = cutoff;
      detail::emit(io::serialize_score_matrix(score_matrix(runs, qrels, detail::measure_option(measure_name), cfg, topics)),
                   out_path, out);
    } else if (*agree) {
      const auto projection = detail::projection_option(projection_name);
      if (projection != Projection::All && assignments_file.empty()) {
        throw UsageError("--projection " + projection_name + " needs --assignments");
      }
      const auto matrix = io::parse_label_matrix_file(matrix_file);
      const Assignments assignments = assignments_file.empty() ? Assignments{} : io::parse_assignments_file(assignments_file);
      const auto topics = detail::select_topics(matrix.topics(), topics_file);
      const std::set<std::string> topic_set(topics.begin(), topics.end());
      const auto scoped = matrix.masked([&](std::size_t u, std::size_t) { return topic_set.count(matrix.units()[u].topic) > 0; });
      const auto projected = project(scoped, assignments, projection);
      std::string report = "scope\tprojection\talpha\tD_o\tD_e\tn_units\n";
      report += detail::alpha_row("overall", projection, krippendorff_alpha_ordinal(projected));
      if (leave_one_out) {
        for (const auto& a : matrix.assessors()) {
          try {
            report += detail::alpha_row("without:" + a, projection, leave_one_out_alpha(projected, a));
          } catch (const StatsError& e) {
            err << "warning: without " << a << ": " << e.what() << "\n";
          }
        }
      }
      if (per_topic) {
        const auto pt = mean_per_topic_alpha(matrix, assignments, topics, projection);
        for (const auto& t : pt.topics) {
          if (t.result) {
            report += detail::alpha_row("topic:" + t.topic, projection, *t.result);
          } else {
            err << "warning: " << t.failure << "\n";
          }
        }
        report += "mean_per_topic\t" + std::string(to_string(projection)) + "\t" + io::format_double(pt.mean, 4) +
                  "\t\t\t" + std::to_string(pt.defined) + "\n";
      }
      detail::emit(report, out_path, out);
    } else if (*kappa) {
      const auto matrix = io::parse_label_matrix_file(matrix_file);
      const auto assignments = io::parse_assignments_file(assignments_file);
      const auto topics = detail::select_topics(matrix.topics(), topics_file);
      const auto pk = mean_per_topic_kappa(matrix, assignments, version_a, version_b, topics);
      std::string report = "topic\tkappa\n";
      for (const auto& t : pk.topics) {
        if (t.kappa) {
          report += t.topic + "\t" + io::format_double(*t.kappa, 4) + "\n";
        } else {
          err << "warning: " << t.failure << "\n";
        }
      }
      report += "mean\t" + io::format_double(pk.mean, 4) + "\n";
      detail::emit(report, out_path, out);
    } else if (*rankcmp) {
      if (!matrices.empty()) {
        if (!matrix_a.empty() || !matrix_b.empty()) throw UsageError("use either --a/--b or --matrices");
        if (matrices.size() < 2) throw UsageError("--matrices needs at least two files");
        std::vector<ScoreMatrix> ms;
        for (const auto& f : matrices) ms.push_back(io::parse_score_matrix_file(f));
        std::vector<std::string> names;
        std::map<std::pair<std::string, std::string>, double> taus;
        std::string csv = want_ci ? "a,b,tau,ci_low,ci_high\n" : "a,b,tau\n";
        for (std::size_t i = 0; i < ms.size(); ++i) {
          names.push_back(ms[i].qrels_version().empty() ? fs::path(matrices[i]).stem().string() : ms[i].qrels_version());
        }
        for (std::size_t i = 0; i < ms.size(); ++i) {
          for (std::size_t j = i + 1; j < ms.size(); ++j) {
            auto r = kendall_tau(ms[i], ms[j]);
            taus[{names[i], names[j]}] = r.tau;
            csv += names[i] + "," + names[j] + "," + io::format_double(r.tau, 4);
            if (want_ci) {
              r = with_ci(r);
              csv += "," + io::format_double(*r.ci_low, 4) + "," + io::format_double(*r.ci_high, 4);
            }
            csv += "\n";
          }
        }
        detail::emit(csv, out_path, out);
        try {
          const auto part = mean_tau_partition(names, taus);
          err << "mean tau: RND-RND=" << io::format_double(part.mean_rnd_rnd, 4)
              << " PRI-PRI=" << io::format_double(part.mean_pri_pri, 4)
              << " RND-PRI=" << io::format_double(part.mean_rnd_pri, 4) << "\n";
        } catch (const DataError&) {
          // names without PRI/RND prefixes: no partition
        }
      } else {
        if (matrix_a.empty() || matrix_b.empty()) throw UsageError("rankcmp needs --a and --b, or --matrices");
        auto r = kendall_tau(io::parse_score_matrix_file(matrix_a), io::parse_score_matrix_file(matrix_b));
        std::string text = "tau=" + io::format_double(r.tau, 3) + "\n";
        if (want_ci) {
          r = with_ci(r);
          text += "ci95=[" + io::format_double(*r.ci_low, 3) + ", " + io::format_double(*r.ci_high, 3) +
                  "] n=" + std::to_string(r.n) + "\n";
        }
        if (r.tied > 0) text += "tied_pairs=" + std::to_string(r.tied) + "\n";
        detail::emit(text, out_path, out);
      }
    } else if (*tukey) {
      TukeyResult r;
      if (unpaired) {
        auto [names, groups] = detail::read_group_table(table_file);
        r = tukey_hsd_unpaired(groups, names);
      } else {
        auto [names, rows] = detail::read_block_table(table_file);
        r = tukey_hsd_paired(rows, names);
        if (r.blocks_used < rows.size()) {
          err << "note: " << rows.size() - r.blocks_used << " block(s) with NA dropped\n";
        }
      }
      detail::emit(detail::tukey_report(r), out_path, out);
    } else if (*power) {
      const auto r = power_pairedt(pilot_t, pilot_n, alpha_level, target);
      out << "achieved=" << io::format_double(r.achieved_power, 3) << " required_n=" << r.required_n << "\n";
    } else if (*loto) {
      const auto pool_runs = io::load_runs(runs_dir);
      const auto eval_runs = detail::load_runs_filtered(runs_dir, run_list);
      const auto qrels = io::parse_qrels_file(qrels_file);
      const auto teams = io::parse_team_map_file(teams_file);
      const auto topics = detail::select_topics(qrels.topics(), topics_file);
      MeasureConfig cfg;
      cfg.cutoff = cutoff;
      const auto report = loto_experiment(pool_runs, eval_runs, qrels, teams, detail::measure_option(measure_name), cfg, topics, depth);
      detail::emit(serialize_loto_report(report), out_path, out);
      if (!vdip_file.empty()) io::write_file(vdip_file, serialize_loto_vdip_csv(report));
    } else if (*rrfilter) {
      const auto qrels = io::parse_qrels_file(qrels_file);
      const auto runs = io::load_runs(runs_dir);
      const auto filtered = rr_filter(qrels, runs, lo, hi);
      detail::emit(io::serialize_qrels(filtered, "rr" + std::to_string(lo) + "-" + std::to_string(hi) + " of " +
                                                     fs::path(qrels_file).filename().string()),
                   out_path, out);
    } else if (*efficiency) {
      std::vector<std::string> warnings;
      const auto timelines = parse_activity_log_file(log_file, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << "\n";
      const auto stats = efficiency_stats(timelines);
      std::string report = serialize_efficiency(stats);
      if (!assignments_file.empty()) {
        const auto assignments = io::parse_assignments_file(assignments_file);
        if (versions.empty()) versions = assignments.versions();
        std::set<std::string> universe;
        for (const auto& [key, v] : assignments.entries()) universe.insert(key.first);
        const auto topics = detail::select_topics({universe.begin(), universe.end()}, topics_file);
        for (auto c : kAllCriteria) {
          const auto table = criterion_table(stats, assignments, versions, topics, c);
          report += "\n# criterion=" + std::string(to_string(c)) + " complete_topics=" +
                    std::to_string(table.complete_rows()) + "\n";
          try {
            report += detail::tukey_report(tukey_hsd_paired(table.cells, versions));
          } catch (const StatsError& e) {
            report += "# not testable: " + std::string(e.what()) + "\n";
          }
        }
      }
      detail::emit(report, out_path, out);
    } else if (*histogram) {
      const Strategy strategy = detail::parse_strategy(strategy_name);
      const auto matrix = io::parse_label_matrix_file(matrix_file);
      const auto assignments = io::parse_assignments_file(assignments_file);
      const auto topics = detail::select_topics(matrix.topics(), topics_file);
      const std::set<std::string> topic_set(topics.begin(), topics.end());
      std::vector<std::string> chosen;
      for (const auto& v : assignments.versions()) {
        if (strategy_of(v) == strategy) chosen.push_back(v);
      }
      if (chosen.empty()) throw DataError("no " + std::string(to_string(strategy)) + " versions in the assignments");
      auto pools = detail::load_version_pools(pools_dir, chosen);
      std::vector<Qrels> qrels;
      for (const auto& v : chosen) {
        qrels.push_back(assemble_version_qrels(matrix, assignments, v));
        std::erase_if(pools[v], [&](const auto& kv) { return !topic_set.count(kv.first); });
      }
      std::vector<VersionPools> vp;
      for (std::size_t i = 0; i < chosen.size(); ++i) vp.push_back({&qrels[i], &pools[chosen[i]]});
      if (max_rank == 0) {
        max_rank = std::numeric_limits<std::size_t>::max();
        for (const auto& v : vp) {
          for (const auto& [t, p] : *v.pools) max_rank = std::min(max_rank, p.presentation_order.size());
        }
      }
      const auto counts = rank_label_histogram(vp, max_rank);
      std::string csv = "rank,relevant_labels\n";
      for (std::size_t r = 0; r < counts.size(); ++r) csv += std::to_string(r + 1) + "," + std::to_string(counts[r]) + "\n";
      detail::emit(csv, out_path, out);
    } else if (*validtopics) {
      std::vector<Qrels> variants;
      std::set<std::string> universe;
      for (const auto& f : qrels_files) {
        variants.push_back(io::parse_qrels_file(f));
        for (const auto& [t, e] : variants.back().entries()) universe.insert(t);
      }
      const auto valid = valid_topics(variants);
      for (const auto& t : excluded_topics({universe.begin(), universe.end()}, valid)) err << "excluded " << t << "\n";
      std::string text;
      for (const auto& t : valid) text += t + "\n";
      detail::emit(text, out_path, out);
    } else if (*assign) {
      const auto assessors = io::parse_name_list_file(assessors_file);
      const auto topics = io::parse_name_list_file(topics_file);
      detail::emit(io::serialize_assignments(assess::balance_assignments(assessors, topics, versions, seed)), out_path, out);
    } else if (*serve) {
      const auto assignments = io::parse_assignments_file(assignments_file);
      const auto pools = detail::load_version_pools(pools_dir, assignments.versions());
      assess::Store store(log_file);
      store.assign_all(assignments, pools);
      if (!topics_xml.empty()) {
        std::map<std::string, Topic> topics;
        for (auto& t : io::parse_topics_file(topics_xml)) topics.emplace(t.qid, std::move(t));
        store.set_topics(std::move(topics));
      }
      store.replay();
      httplib::Server server;
      assess::register_routes(server, store, {docs_dir, static_dir});
      err << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) throw DataError("cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace poolbench::cli
