#pragma once

// Graded-relevance measures at a cutoff l, with exponential gains 2^level - 1:
//
//   nDCG@l   sum_r g(r)/log2(r+1), normalised by the same sum over the ideal list
//   Q@l      (1/min(l,R)) sum_r J(r) (C(r) + b cg(r)) / (r + b cg*(r))
//   nERR@l   ERR@l / ideal ERR@l, with stop probability g(r) / 2^H
//   iRBU@l   (1-p) sum_r p^(r-1) J(r)   (single intent, binary utility)
//
// J(r) is 1 when the document at rank r has level >= 1, C(r) counts such documents
// in the top r, and cg / cg* are cumulative actual / ideal gains. R is the number of
// relevant documents for the topic. A topic with R = 0 has no defined score.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/types.hpp"

namespace poolbench {

enum class Measure { NDCG, Q, NERR, IRBU };

inline constexpr std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::NDCG:
      return "nDCG";
    case Measure::Q:
      return "Q";
    case Measure::NERR:
      return "nERR";
    case Measure::IRBU:
      return "iRBU";
  }
  return "?";
}

inline Measure parse_measure(std::string_view name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "ndcg") return Measure::NDCG;
  if (lower == "q" || lower == "q-measure") return Measure::Q;
  if (lower == "nerr") return Measure::NERR;
  if (lower == "irbu") return Measure::IRBU;
  throw DataError("unknown measure '" + std::string(name) + "' (expected ndcg, q, nerr or irbu)");
}

struct MeasureConfig {
  int cutoff = 10;
  int max_level = 2;
  double persistence = 0.99;  // iRBU p
  double beta = 1.0;          // Q-measure

  void validate() const {
    if (cutoff < 1) throw DataError("measure cutoff must be >= 1");
    if (max_level < 1) throw DataError("max level must be >= 1");
    if (!(persistence > 0.0 && persistence < 1.0)) throw DataError("iRBU persistence must lie in (0,1)");
    if (beta < 0.0) throw DataError("Q-measure beta must be >= 0");
  }
};

inline double gain_of(int level, int max_level = 2) {
  if (level < 0 || level > max_level) {
    throw DataError("relevance level " + std::to_string(level) + " outside 0.." + std::to_string(max_level));
  }
  return std::ldexp(1.0, level) - 1.0;
}

namespace detail {

inline std::vector<int> ideal_levels(std::span<const int> judged) {
  std::vector<int> ideal(judged.begin(), judged.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  return ideal;
}

inline std::size_t relevant_in(std::span<const int> judged) {
  return static_cast<std::size_t>(std::count_if(judged.begin(), judged.end(), [](int l) { return l >= 1; }));
}

inline void require_relevant(std::span<const int> judged, std::string_view topic) {
  if (relevant_in(judged) == 0) throw UndefinedMeasure(std::string(topic));
}

inline double dcg(std::span<const int> levels, std::size_t cutoff, int max_level) {
  double sum = 0.0;
  const std::size_t n = std::min(levels.size(), cutoff);
  for (std::size_t i = 0; i < n; ++i) sum += gain_of(levels[i], max_level) / std::log2(static_cast<double>(i) + 2.0);
  return sum;
}

inline double err(std::span<const int> levels, std::size_t cutoff, int max_level) {
  const double denom = std::ldexp(1.0, max_level);
  double sum = 0.0, reach = 1.0;
  const std::size_t n = std::min(levels.size(), cutoff);
  for (std::size_t i = 0; i < n; ++i) {
    const double stop = gain_of(levels[i], max_level) / denom;
    sum += reach * stop / static_cast<double>(i + 1);
    reach *= 1.0 - stop;
  }
  return sum;
}

}  // namespace detail

// Level-based forms. `ranked` holds the levels of the retrieved documents in rank
// order (unjudged = 0); `judged` holds the levels of every judged document for the topic.

inline double ndcg_levels(std::span<const int> ranked, std::span<const int> judged, const MeasureConfig& cfg,
                          std::string_view topic = {}) {
  detail::require_relevant(judged, topic);
  const auto l = static_cast<std::size_t>(cfg.cutoff);
  const auto ideal = detail::ideal_levels(judged);
  return detail::dcg(ranked, l, cfg.max_level) / detail::dcg(ideal, l, cfg.max_level);
}

inline double q_levels(std::span<const int> ranked, std::span<const int> judged, const MeasureConfig& cfg,
                       std::string_view topic = {}) {
  detail::require_relevant(judged, topic);
  const auto l = static_cast<std::size_t>(cfg.cutoff);
  const auto ideal = detail::ideal_levels(judged);
  const std::size_t R = detail::relevant_in(judged);
  const std::size_t n = std::min(ranked.size(), l);
  double sum = 0.0, cg = 0.0, cg_ideal = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cg += gain_of(ranked[i], cfg.max_level);
    if (i < ideal.size()) cg_ideal += gain_of(ideal[i], cfg.max_level);
    if (ranked[i] >= 1) {
      ++hits;
      const double r = static_cast<double>(i + 1);
      sum += (static_cast<double>(hits) + cfg.beta * cg) / (r + cfg.beta * cg_ideal);
    }
  }
  return sum / static_cast<double>(std::min(l, R));
}

inline double nerr_levels(std::span<const int> ranked, std::span<const int> judged, const MeasureConfig& cfg,
                          std::string_view topic = {}) {
  detail::require_relevant(judged, topic);
  const auto l = static_cast<std::size_t>(cfg.cutoff);
  const auto ideal = detail::ideal_levels(judged);
  return detail::err(ranked, l, cfg.max_level) / detail::err(ideal, l, cfg.max_level);
}

inline double irbu_levels(std::span<const int> ranked, std::span<const int> judged, const MeasureConfig& cfg,
                          std::string_view topic = {}) {
  detail::require_relevant(judged, topic);
  const std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(cfg.cutoff));
  double sum = 0.0, weight = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    (void)gain_of(ranked[i], cfg.max_level);  // range check
    if (ranked[i] >= 1) sum += weight;
    weight *= cfg.persistence;
  }
  return (1.0 - cfg.persistence) * sum;
}

inline double evaluate_levels(Measure m, std::span<const int> ranked, std::span<const int> judged,
                              const MeasureConfig& cfg, std::string_view topic = {}) {
  switch (m) {
    case Measure::NDCG:
      return ndcg_levels(ranked, judged, cfg, topic);
    case Measure::Q:
      return q_levels(ranked, judged, cfg, topic);
    case Measure::NERR:
      return nerr_levels(ranked, judged, cfg, topic);
    case Measure::IRBU:
      return irbu_levels(ranked, judged, cfg, topic);
  }
  return 0.0;
}

// Docid-based forms.

/// Levels of the top-`cutoff` ranked documents; unjudged documents count as 0.
inline std::vector<int> ranked_levels(std::span<const std::string> ranked, const Qrels::TopicEntries& judged,
                                      int cutoff) {
  std::vector<int> out;
  const std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(cutoff));
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = judged.find(ranked[i]);
    out.push_back(it == judged.end() ? 0 : it->second);
  }
  return out;
}

inline std::vector<int> judged_levels(const Qrels::TopicEntries& judged) {
  std::vector<int> out;
  out.reserve(judged.size());
  for (const auto& [doc, level] : judged) out.push_back(level);
  return out;
}

inline double evaluate(Measure m, std::span<const std::string> ranked, const Qrels::TopicEntries& judged,
                       const MeasureConfig& cfg, std::string_view topic = {}) {
  const auto r = ranked_levels(ranked, judged, cfg.cutoff);
  const auto j = judged_levels(judged);
  return evaluate_levels(m, r, j, cfg, topic);
}

inline double ndcg_at(std::span<const std::string> ranked, const Qrels::TopicEntries& judged, const MeasureConfig& cfg) {
  return evaluate(Measure::NDCG, ranked, judged, cfg);
}
inline double q_at(std::span<const std::string> ranked, const Qrels::TopicEntries& judged, const MeasureConfig& cfg) {
  return evaluate(Measure::Q, ranked, judged, cfg);
}
inline double nerr_at(std::span<const std::string> ranked, const Qrels::TopicEntries& judged, const MeasureConfig& cfg) {
  return evaluate(Measure::NERR, ranked, judged, cfg);
}
inline double irbu_at(std::span<const std::string> ranked, const Qrels::TopicEntries& judged, const MeasureConfig& cfg) {
  return evaluate(Measure::IRBU, ranked, judged, cfg);
}

/// Topic x run score matrix. Runs are sorted by tag; topics keep the order of `topics`.
/// A run with no ranking for a topic scores 0 there. Every topic must have a relevant document.
inline ScoreMatrix score_matrix(std::span<const RankedRun> runs, const Qrels& qrels, Measure m, const MeasureConfig& cfg,
                                const std::vector<std::string>& topics) {
  cfg.validate();
  std::vector<const RankedRun*> sorted;
  for (const auto& r : runs) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const RankedRun* a, const RankedRun* b) { return a->run_tag < b->run_tag; });
  std::vector<std::string> tags;
  for (const auto* r : sorted) tags.push_back(r->run_tag);
  ScoreMatrix out(std::string(to_string(m)), qrels.version_id(), cfg.cutoff, topics, tags);
  for (std::size_t t = 0; t < topics.size(); ++t) {
    const auto& judged = qrels.topic(topics[t]);
    const auto judged_lv = judged_levels(judged);
    detail::require_relevant(judged_lv, topics[t]);
    for (std::size_t r = 0; r < sorted.size(); ++r) {
      const auto* ranking = sorted[r]->ranking(topics[t]);
      std::vector<int> lv;
      if (ranking) lv = ranked_levels(*ranking, judged, cfg.cutoff);
      out.set(t, r, evaluate_levels(m, lv, judged_lv, cfg, topics[t]));
    }
  }
  return out;
}

inline ScoreMatrix score_matrix(std::span<const RankedRun> runs, const Qrels& qrels, Measure m, const MeasureConfig& cfg,
                                const std::set<std::string>& topics) {
  return score_matrix(runs, qrels, m, cfg, std::vector<std::string>(topics.begin(), topics.end()));
}

}  // namespace poolbench
