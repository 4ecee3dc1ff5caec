#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/io.hpp"
#include "poolbench/measures.hpp"
#include "poolbench/pooling.hpp"
#include "poolbench/rankstats.hpp"
#include "poolbench/types.hpp"

namespace poolbench {

namespace detail {

inline const std::string& team_of(const io::TeamMap& teams, const std::string& run_tag) {
  auto it = teams.find(run_tag);
  if (it == teams.end()) throw DataError("run " + run_tag + " has no team in the team map");
  return it->second;
}

}  // namespace detail

/// Pooled topicdocs (depth `depth`) whose contributing runs all belong to `team`.
inline std::set<TopicDoc> unique_contributions(std::span<const RankedRun> runs, const io::TeamMap& teams,
                                               const std::string& team, int depth,
                                               const std::vector<std::string>& topics) {
  if (depth < 1) throw DataError("pool depth must be >= 1");
  bool has_run = false;
  for (const auto& r : runs) has_run |= detail::team_of(teams, r.run_tag) == team;
  if (!has_run) throw DataError("team " + team + " has no runs");
  std::set<TopicDoc> out;
  for (const auto& t : topics) {
    std::map<std::string, std::set<std::string>> contributors;  // doc -> teams
    for (const auto& r : runs) {
      const auto* ranking = r.ranking(t);
      if (!ranking) continue;
      const std::size_t cut = std::min(ranking->size(), static_cast<std::size_t>(depth));
      const auto& tm = detail::team_of(teams, r.run_tag);
      for (std::size_t i = 0; i < cut; ++i) contributors[(*ranking)[i]].insert(tm);
    }
    for (const auto& [doc, ts] : contributors) {
      if (ts.size() == 1 && *ts.begin() == team) out.insert({t, doc});
    }
  }
  return out;
}

inline Qrels without(const Qrels& qrels, const std::set<TopicDoc>& removed, std::string version_id) {
  Qrels out = qrels;
  out.set_version_id(std::move(version_id));
  for (const auto& td : removed) out.erase(td.topic, td.doc);
  return out;
}

struct LotoTeam {
  std::string team;
  std::size_t unique_count = 0;
  std::size_t loto_qrels_size = 0;
  double tau = 1.0;
  std::vector<double> loto_means;  // parallel to LotoReport::runs
};

struct LotoReport {
  std::string qrels_version;
  std::string measure;
  std::size_t original_size = 0;
  std::vector<std::string> runs;    // evaluated runs, tag order
  std::vector<double> full_means;
  std::vector<LotoTeam> teams;
  double mean_tau = 1.0;
};

/// For every team with pooled runs: drop its unique contributions from `qrels`,
/// re-score `eval_runs`, and compare the run ranking with the original by tau-a.
inline LotoReport loto_experiment(std::span<const RankedRun> pool_runs, std::span<const RankedRun> eval_runs,
                                  const Qrels& qrels, const io::TeamMap& teams, Measure m, const MeasureConfig& cfg,
                                  const std::vector<std::string>& topics, int depth) {
  if (topics.empty()) throw DataError("LOTO experiment over an empty topic set");
  LotoReport out;
  out.qrels_version = qrels.version_id();
  out.measure = std::string(to_string(m));
  out.original_size = qrels.size();
  const auto full = score_matrix(eval_runs, qrels, m, cfg, topics);
  out.runs = full.runs();
  out.full_means = full.run_means();

  std::set<std::string> team_ids;
  for (const auto& r : pool_runs) team_ids.insert(detail::team_of(teams, r.run_tag));
  double tau_sum = 0.0;
  for (const auto& team : team_ids) {
    LotoTeam lt;
    lt.team = team;
    const auto unique = unique_contributions(pool_runs, teams, team, depth, topics);
    lt.unique_count = unique.size();
    const auto loto = without(qrels, unique, qrels.version_id() + "-wo-" + team);
    lt.loto_qrels_size = loto.size();
    const auto scores = score_matrix(eval_runs, loto, m, cfg, topics);
    lt.loto_means = scores.run_means();
    lt.tau = kendall_tau(out.full_means, lt.loto_means).tau;
    tau_sum += lt.tau;
    out.teams.push_back(std::move(lt));
  }
  out.mean_tau = tau_sum / static_cast<double>(out.teams.size());
  return out;
}

/// `team unique loto_size tau` rows followed by a mean row.
inline std::string serialize_loto_report(const LotoReport& r) {
  std::string s = "# qrels=" + r.qrels_version + " measure=" + r.measure +
                  " original_size=" + std::to_string(r.original_size) + "\n";
  s += "team\tunique_contributions\tloto_qrels_size\ttau\n";
  for (const auto& t : r.teams) {
    s += t.team + "\t" + std::to_string(t.unique_count) + "\t" + std::to_string(t.loto_qrels_size) + "\t" +
         io::format_double(t.tau, 4) + "\n";
  }
  s += "mean\t\t\t" + io::format_double(r.mean_tau, 4) + "\n";
  return s;
}

/// V-dip plot data: one row per (team left out, run).
inline std::string serialize_loto_vdip_csv(const LotoReport& r) {
  std::string s = "run,full_score,loto_score,team_left_out\n";
  for (const auto& t : r.teams) {
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      s += r.runs[i] + "," + io::format_double(r.full_means[i]) + "," + io::format_double(t.loto_means[i]) + "," +
           t.team + "\n";
    }
  }
  return s;
}

/// Entries whose document some run places at a rank in [lo, hi] for that topic.
inline Qrels rr_filter(const Qrels& qrels, std::span<const RankedRun> runs, std::size_t lo, std::size_t hi) {
  if (lo < 1 || hi < lo) throw DataError("rank range needs 1 <= lo <= hi");
  Qrels out(qrels.version_id());
  for (const auto& [topic, docs] : qrels.entries()) {
    std::set<std::string> in_range;
    for (const auto& r : runs) {
      const auto* ranking = r.ranking(topic);
      if (!ranking) continue;
      for (std::size_t i = lo - 1; i < std::min(hi, ranking->size()); ++i) in_range.insert((*ranking)[i]);
    }
    for (const auto& [doc, level] : docs) {
      if (in_range.count(doc)) out.add(topic, doc, level);
    }
  }
  return out;
}

/// Topics with at least one relevant document in every supplied qrels variant.
inline std::vector<std::string> valid_topics(std::span<const Qrels> variants) {
  if (variants.empty()) throw DataError("valid_topics needs at least one qrels version");
  std::set<std::string> universe;
  for (const auto& q : variants) {
    for (const auto& t : q.topics()) universe.insert(t);
  }
  std::vector<std::string> out;
  for (const auto& t : universe) {
    if (std::all_of(variants.begin(), variants.end(), [&](const Qrels& q) { return q.relevant_count(t) > 0; })) {
      out.push_back(t);
    }
  }
  if (out.empty()) throw DataError("no topic has a relevant document in every qrels variant");
  return out;
}

/// Topics of `universe` dropped by valid_topics, for reporting.
inline std::vector<std::string> excluded_topics(const std::vector<std::string>& universe,
                                                const std::vector<std::string>& valid) {
  std::vector<std::string> out;
  const std::set<std::string> keep(valid.begin(), valid.end());
  for (const auto& t : universe) {
    if (!keep.count(t)) out.push_back(t);
  }
  return out;
}

struct VersionPools {
  const Qrels* qrels = nullptr;
  const std::map<std::string, PooledTopic>* pools = nullptr;
};

/// counts[r-1] = number of (version, topic) pairs whose r-th presented document
/// carries a level >= 1 label.
inline std::vector<std::size_t> rank_label_histogram(std::span<const VersionPools> versions, std::size_t max_rank) {
  if (versions.empty()) throw DataError("rank histogram needs at least one version");
  std::size_t min_pool = std::numeric_limits<std::size_t>::max();
  for (const auto& v : versions) {
    for (const auto& [t, p] : *v.pools) min_pool = std::min(min_pool, p.presentation_order.size());
  }
  if (max_rank > min_pool) {
    throw DataError("max rank " + std::to_string(max_rank) + " exceeds the minimum pool size " + std::to_string(min_pool));
  }
  std::vector<std::size_t> counts(max_rank, 0);
  for (const auto& v : versions) {
    for (const auto& [t, p] : *v.pools) {
      for (std::size_t r = 0; r < max_rank; ++r) {
        if (v.qrels->level_or_zero(t, p.presentation_order[r]) >= 1) ++counts[r];
      }
    }
  }
  return counts;
}

}  // namespace poolbench
