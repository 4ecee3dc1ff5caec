#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/labels.hpp"

namespace poolbench {

struct Topic {
  std::string qid;
  std::string content;
  std::string description;
};

/// A (topic, document) pair, the unit of relevance assessment.
struct TopicDoc {
  std::string topic;
  std::string doc;

  friend auto operator<=>(const TopicDoc&, const TopicDoc&) = default;
};

/// A system's ranked output. Per topic, documents are listed in rank order (index 0 is rank 1).
struct RankedRun {
  std::string run_tag;
  std::string team_id;
  std::map<std::string, std::vector<std::string>> rankings;
  // Score column as read, parallel to `rankings`. Never used for ordering.
  std::map<std::string, std::vector<std::string>> score_text;

  const std::vector<std::string>* ranking(const std::string& topic) const {
    auto it = rankings.find(topic);
    return it == rankings.end() ? nullptr : &it->second;
  }
};

/// Graded judgments for one qrels version. Absent pairs are unjudged (gain 0).
class Qrels {
 public:
  using TopicEntries = std::map<std::string, int>;

  Qrels() = default;
  explicit Qrels(std::string version_id) : version_id_(std::move(version_id)) {}

  const std::string& version_id() const noexcept { return version_id_; }
  void set_version_id(std::string id) { version_id_ = std::move(id); }

  /// Throws DataError on a duplicate pair or a level outside 0..2.
  void add(const std::string& topic, const std::string& doc, int level) {
    if (level < 0 || level > kMaxLevel) {
      throw DataError("invalid relevance level " + std::to_string(level) + " for " + topic + "/" + doc);
    }
    auto [it, inserted] = entries_[topic].emplace(doc, level);
    if (!inserted) throw DataError("duplicate qrels entry " + topic + "/" + doc);
  }

  void erase(const std::string& topic, const std::string& doc) {
    auto it = entries_.find(topic);
    if (it == entries_.end()) return;
    it->second.erase(doc);
  }

  std::optional<int> level(const std::string& topic, const std::string& doc) const {
    auto t = entries_.find(topic);
    if (t == entries_.end()) return std::nullopt;
    auto d = t->second.find(doc);
    if (d == t->second.end()) return std::nullopt;
    return d->second;
  }

  int level_or_zero(const std::string& topic, const std::string& doc) const {
    return level(topic, doc).value_or(0);
  }

  /// Entries for one topic; empty if the topic is unknown.
  const TopicEntries& topic(const std::string& topic) const {
    static const TopicEntries empty;
    auto it = entries_.find(topic);
    return it == entries_.end() ? empty : it->second;
  }

  std::size_t relevant_count(const std::string& topic_id) const {
    const auto& e = topic(topic_id);
    return static_cast<std::size_t>(std::count_if(e.begin(), e.end(), [](const auto& kv) { return kv.second >= 1; }));
  }

  std::vector<std::string> topics() const {
    std::vector<std::string> out;
    for (const auto& [t, e] : entries_) {
      if (!e.empty()) out.push_back(t);
    }
    return out;
  }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (const auto& [t, e] : entries_) n += e.size();
    return n;
  }

  bool empty() const noexcept { return size() == 0; }

  const std::map<std::string, TopicEntries>& entries() const noexcept { return entries_; }

  /// Subset restricted to the given topics.
  Qrels restricted_to(const std::set<std::string>& topics) const {
    Qrels out(version_id_);
    for (const auto& [t, e] : entries_) {
      if (topics.count(t)) out.entries_[t] = e;
    }
    return out;
  }

  friend bool operator==(const Qrels& a, const Qrels& b) { return a.entries_ == b.entries_; }

 private:
  std::string version_id_;
  std::map<std::string, TopicEntries> entries_;
};

/// Assessor x topicdoc grid of levels 0..2 or NA. Stored unit-major.
class LabelMatrix {
 public:
  static constexpr std::int8_t kNA = -1;

  LabelMatrix() = default;
  LabelMatrix(std::vector<TopicDoc> units, std::vector<std::string> assessors)
      : units_(std::move(units)), assessors_(std::move(assessors)),
        cells_(units_.size() * assessors_.size(), kNA) {
    for (std::size_t a = 0; a < assessors_.size(); ++a) {
      if (!assessor_index_.emplace(assessors_[a], a).second) {
        throw DataError("duplicate assessor id " + assessors_[a]);
      }
    }
  }

  std::size_t unit_count() const noexcept { return units_.size(); }
  std::size_t assessor_count() const noexcept { return assessors_.size(); }
  const std::vector<TopicDoc>& units() const noexcept { return units_; }
  const std::vector<std::string>& assessors() const noexcept { return assessors_; }

  std::optional<std::size_t> find_assessor(const std::string& id) const {
    auto it = assessor_index_.find(id);
    if (it == assessor_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t assessor_index(const std::string& id) const {
    auto idx = find_assessor(id);
    if (!idx) throw NotFound("unknown assessor " + id);
    return *idx;
  }

  std::optional<int> at(std::size_t unit, std::size_t assessor) const {
    std::int8_t v = cells_[unit * assessors_.size() + assessor];
    if (v == kNA) return std::nullopt;
    return v;
  }

  void set(std::size_t unit, std::size_t assessor, std::optional<int> level) {
    if (level && (*level < 0 || *level > kMaxLevel)) {
      throw DataError("invalid level " + std::to_string(*level) + " in label matrix");
    }
    cells_[unit * assessors_.size() + assessor] = level ? static_cast<std::int8_t>(*level) : kNA;
  }

  /// Copy with every cell for which keep(unit, assessor) is false replaced by NA.
  LabelMatrix masked(const std::function<bool(std::size_t, std::size_t)>& keep) const {
    LabelMatrix out = *this;
    for (std::size_t u = 0; u < units_.size(); ++u) {
      for (std::size_t a = 0; a < assessors_.size(); ++a) {
        if (!keep(u, a)) out.cells_[u * assessors_.size() + a] = kNA;
      }
    }
    return out;
  }

  /// Copy holding only the units of one topic.
  LabelMatrix topic_slice(const std::string& topic) const {
    std::vector<std::size_t> rows;
    for (std::size_t u = 0; u < units_.size(); ++u) {
      if (units_[u].topic == topic) rows.push_back(u);
    }
    std::vector<TopicDoc> units;
    for (auto u : rows) units.push_back(units_[u]);
    LabelMatrix out(std::move(units), assessors_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(rows[i] * assessors_.size()), assessors_.size(),
                  out.cells_.begin() + static_cast<std::ptrdiff_t>(i * assessors_.size()));
    }
    return out;
  }

  std::vector<std::string> topics() const {
    std::set<std::string> s;
    for (const auto& u : units_) s.insert(u.topic);
    return {s.begin(), s.end()};
  }

 private:
  std::vector<TopicDoc> units_;
  std::vector<std::string> assessors_;
  std::unordered_map<std::string, std::size_t> assessor_index_;
  std::vector<std::int8_t> cells_;
};

/// Which qrels version each assessor produced for each topic.
class Assignments {
 public:
  void add(const std::string& topic, const std::string& assessor, const std::string& version) {
    if (!by_key_.emplace(std::make_pair(topic, assessor), version).second) {
      throw DataError("duplicate assignment for topic " + topic + ", assessor " + assessor);
    }
  }

  std::optional<std::string> version(const std::string& topic, const std::string& assessor) const {
    auto it = by_key_.find({topic, assessor});
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
  }

  /// Assessor that produced `version` for `topic`, if any.
  std::optional<std::string> assessor_for(const std::string& topic, const std::string& version) const {
    for (auto it = by_key_.lower_bound({topic, ""}); it != by_key_.end() && it->first.first == topic; ++it) {
      if (it->second == version) return it->first.second;
    }
    return std::nullopt;
  }

  std::vector<std::string> versions() const {
    std::set<std::string> s;
    for (const auto& [k, v] : by_key_) s.insert(v);
    return {s.begin(), s.end()};
  }

  std::size_t size() const noexcept { return by_key_.size(); }

  const std::map<std::pair<std::string, std::string>, std::string>& entries() const noexcept { return by_key_; }

 private:
  std::map<std::pair<std::string, std::string>, std::string> by_key_;
};

/// Topic x run scores for one (measure, qrels version) pair. Runs are kept in tag order.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::string measure_id, std::string qrels_version, int cutoff, std::vector<std::string> topics,
              std::vector<std::string> runs)
      : measure_id_(std::move(measure_id)), qrels_version_(std::move(qrels_version)), cutoff_(cutoff),
        topics_(std::move(topics)), runs_(std::move(runs)), cells_(topics_.size() * runs_.size(), 0.0) {}

  const std::string& measure_id() const noexcept { return measure_id_; }
  const std::string& qrels_version() const noexcept { return qrels_version_; }
  int cutoff() const noexcept { return cutoff_; }
  const std::vector<std::string>& topics() const noexcept { return topics_; }
  const std::vector<std::string>& runs() const noexcept { return runs_; }

  double at(std::size_t topic, std::size_t run) const { return cells_[topic * runs_.size() + run]; }
  void set(std::size_t topic, std::size_t run, double v) { cells_[topic * runs_.size() + run] = v; }

  /// Mean over topics for each run, in run order.
  std::vector<double> run_means() const {
    std::vector<double> means(runs_.size(), 0.0);
    if (topics_.empty()) return means;
    for (std::size_t t = 0; t < topics_.size(); ++t) {
      for (std::size_t r = 0; r < runs_.size(); ++r) means[r] += at(t, r);
    }
    for (auto& m : means) m /= static_cast<double>(topics_.size());
    return means;
  }

 private:
  std::string measure_id_;
  std::string qrels_version_;
  int cutoff_ = 0;
  std::vector<std::string> topics_;
  std::vector<std::string> runs_;
  std::vector<double> cells_;
};

}  // namespace poolbench
