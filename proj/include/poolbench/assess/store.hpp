#pragma once

// Event-sourced judgment store. Every state change is one ActivityEvent appended
// to a JSON-lines file; current labels and progress are derived from the events
// and rebuilt by replaying the file on startup.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/events.hpp"
#include "poolbench/io.hpp"
#include "poolbench/labels.hpp"
#include "poolbench/pooling.hpp"
#include "poolbench/types.hpp"

namespace poolbench::assess {

/// Request names a document outside the assigned pool.
class Conflict : public DataError {
 public:
  using DataError::DataError;
};

/// Malformed request payload.
class BadRequest : public DataError {
 public:
  using DataError::DataError;
};

struct AssignedPool {
  std::string topic;
  std::string version;
  std::vector<std::string> order;  // presentation order
};

struct JudgmentRecord {
  std::size_t seq = 0;  // 1-based, in arrival order
  std::string assessor;
  std::string topic;
  std::string doc;
  RawLabel label = RawLabel::NonRel;
  std::int64_t ts = 0;
};

struct PoolEntry {
  std::string doc;
  std::optional<RawLabel> label;
};

struct PoolView {
  std::string topic;
  std::vector<PoolEntry> documents;
  std::size_t judged = 0;
};

struct JudgmentAck {
  std::size_t seq = 0;
  std::optional<std::string> next;  // next unjudged doc, if any
  bool complete = false;
  bool correction = false;          // doc already carried a label
};

struct TopicProgress {
  std::string topic;
  std::size_t judged = 0;
  std::size_t total = 0;
};

inline std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

class Store {
 public:
  using Clock = std::function<std::int64_t()>;

  /// `log_path` empty keeps events in memory only.
  explicit Store(std::filesystem::path log_path = {}, Clock clock = system_clock_ms)
      : log_path_(std::move(log_path)), clock_(std::move(clock)) {}

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  void assign(const std::string& assessor, AssignedPool pool) {
    std::unique_lock lock(mutex_);
    auto& mine = assignments_[assessor];
    if (mine.count(pool.topic)) throw DataError("assessor " + assessor + " already has topic " + pool.topic);
    std::set<std::string> seen;
    for (const auto& d : pool.order) {
      if (!seen.insert(d).second) throw DataError("pool for topic " + pool.topic + " lists " + d + " twice");
    }
    const auto topic = pool.topic;
    mine.emplace(topic, std::move(pool));
  }

  /// Assigns every (topic, assessor, version) entry using the presentation orders in `pools[version]`.
  void assign_all(const Assignments& assignments,
                  const std::map<std::string, std::map<std::string, PooledTopic>>& pools) {
    for (const auto& [key, version] : assignments.entries()) {
      const auto& [topic, assessor] = key;
      auto v = pools.find(version);
      if (v == pools.end()) throw DataError("no pool file for version " + version);
      auto t = v->second.find(topic);
      if (t == v->second.end()) throw DataError("pool for version " + version + " lacks topic " + topic);
      assign(assessor, {topic, version, t->second.presentation_order});
    }
  }

  void set_topics(std::map<std::string, Topic> topics) {
    std::unique_lock lock(mutex_);
    topics_ = std::move(topics);
  }

  std::optional<Topic> topic_info(const std::string& qid) const {
    std::shared_lock lock(mutex_);
    auto it = topics_.find(qid);
    if (it == topics_.end()) return std::nullopt;
    return it->second;
  }

  /// Reads the event file (if any) and applies each event. Call after the assignments are in place.
  void replay() {
    std::unique_lock lock(mutex_);
    if (log_path_.empty() || !std::filesystem::exists(log_path_)) return;
    auto in = io::open_input(log_path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (io::is_blank_or_comment(line)) continue;
      auto e = event_from_json_line(line, log_path_.string(), lineno);
      try {
        apply(e);
      } catch (const DataError& ex) {
        throw ParseError(log_path_.string(), lineno, ex.what());
      }
      lines_.push_back(line);
    }
  }

  std::vector<AssignedPool> assignments(const std::string& assessor) const {
    std::shared_lock lock(mutex_);
    auto it = assignments_.find(assessor);
    if (it == assignments_.end()) throw NotFound("unknown assessor " + assessor);
    std::vector<AssignedPool> out;
    for (const auto& [t, p] : it->second) out.push_back(p);
    return out;
  }

  /// Current pool state; records an open_topic event.
  PoolView get_pool(const std::string& assessor, const std::string& topic) {
    std::unique_lock lock(mutex_);
    const auto& pool = pool_of(assessor, topic);
    ActivityEvent e{clock_(), assessor, topic, std::nullopt, Action::OpenTopic, std::nullopt, 0};
    append(e);
    PoolView view{topic, {}, 0};
    const auto* labels = labels_of(assessor, topic);
    for (const auto& d : pool.order) {
      std::optional<RawLabel> l;
      if (labels) {
        if (auto it = labels->find(d); it != labels->end()) l = it->second;
      }
      view.judged += l.has_value();
      view.documents.push_back({d, l});
    }
    return view;
  }

  /// Records a view_doc event for a pooled document.
  void view_doc(const std::string& assessor, const std::string& topic, const std::string& doc) {
    std::unique_lock lock(mutex_);
    require_in_pool(pool_of(assessor, topic), doc);
    append({clock_(), assessor, topic, doc, Action::ViewDoc, std::nullopt, 0});
  }

  JudgmentAck post_judgment(const std::string& assessor, const std::string& topic, const std::string& doc,
                            const std::string& label_text) {
    auto label = parse_raw_label(label_text);
    if (!label) throw BadRequest("unknown label '" + label_text + "' (expected H.REL, REL, NONREL or ERROR)");
    std::unique_lock lock(mutex_);
    const auto& pool = pool_of(assessor, topic);
    require_in_pool(pool, doc);
    const auto* before = labels_of(assessor, topic);
    const bool correction = before && before->count(doc);
    append({clock_(), assessor, topic, doc, Action::Judge, label, 0});

    JudgmentAck ack;
    ack.seq = records_.size();
    ack.correction = correction;
    const auto& labels = labels_.at({assessor, topic});
    const auto pos = static_cast<std::size_t>(std::find(pool.order.begin(), pool.order.end(), doc) - pool.order.begin());
    for (std::size_t i = 1; i <= pool.order.size(); ++i) {
      const auto& cand = pool.order[(pos + i) % pool.order.size()];
      if (!labels.count(cand)) {
        ack.next = cand;
        break;
      }
    }
    ack.complete = !ack.next;
    return ack;
  }

  std::vector<TopicProgress> progress(const std::string& assessor) const {
    std::shared_lock lock(mutex_);
    auto it = assignments_.find(assessor);
    if (it == assignments_.end()) throw NotFound("unknown assessor " + assessor);
    std::vector<TopicProgress> out;
    for (const auto& [t, p] : it->second) {
      const auto* labels = labels_of(assessor, t);
      out.push_back({t, labels ? labels->size() : 0, p.order.size()});
    }
    return out;
  }

  std::vector<JudgmentRecord> records() const {
    std::shared_lock lock(mutex_);
    return records_;
  }

  std::set<std::string> versions() const {
    std::shared_lock lock(mutex_);
    std::set<std::string> out;
    for (const auto& [a, pools] : assignments_) {
      for (const auto& [t, p] : pools) out.insert(p.version);
    }
    return out;
  }

  /// Latest label per document, mapped to levels, for every topic judged under `version`.
  Qrels export_qrels(const std::string& version) const {
    std::shared_lock lock(mutex_);
    bool known = false;
    Qrels out(version);
    for (const auto& [assessor, pools] : assignments_) {
      for (const auto& [topic, pool] : pools) {
        if (pool.version != version) continue;
        known = true;
        const auto* labels = labels_of(assessor, topic);
        if (!labels) continue;
        for (const auto& [doc, raw] : *labels) out.add(topic, doc, level_of(raw));
      }
    }
    if (!known) throw NotFound("unknown qrels version " + version);
    return out;
  }

  std::string export_qrels_text(const std::string& version) const {
    return io::serialize_qrels(export_qrels(version), "qrels version " + version);
  }

  /// The event stream verbatim, one JSON object per line.
  std::string export_log() const {
    std::shared_lock lock(mutex_);
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
  }

 private:
  const AssignedPool& pool_of(const std::string& assessor, const std::string& topic) const {
    auto a = assignments_.find(assessor);
    if (a == assignments_.end()) throw NotFound("unknown assessor " + assessor);
    auto t = a->second.find(topic);
    if (t == a->second.end()) throw NotFound("assessor " + assessor + " has no assignment for topic " + topic);
    return t->second;
  }

  static void require_in_pool(const AssignedPool& pool, const std::string& doc) {
    if (std::find(pool.order.begin(), pool.order.end(), doc) == pool.order.end()) {
      throw Conflict("document " + doc + " is not in the pool for topic " + pool.topic);
    }
  }

  const std::map<std::string, RawLabel>* labels_of(const std::string& assessor, const std::string& topic) const {
    auto it = labels_.find({assessor, topic});
    return it == labels_.end() ? nullptr : &it->second;
  }

  void apply(const ActivityEvent& e) {
    const auto& pool = pool_of(e.assessor, e.topic);
    if (e.action == Action::OpenTopic) return;
    require_in_pool(pool, *e.doc);
    if (e.action == Action::Judge) {
      records_.push_back({records_.size() + 1, e.assessor, e.topic, *e.doc, *e.label, e.ts});
      labels_[{e.assessor, e.topic}][*e.doc] = *e.label;
    }
  }

  void append(const ActivityEvent& e) {
    apply(e);
    auto line = to_json_line(e);
    if (!log_path_.empty()) {
      if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
      std::ofstream out(log_path_, std::ios::binary | std::ios::app);
      if (!out) throw DataError("cannot append to " + log_path_.string());
      out << line << '\n';
      out.flush();
    }
    lines_.push_back(std::move(line));
  }

  std::filesystem::path log_path_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::map<std::string, AssignedPool>> assignments_;  // assessor -> topic -> pool
  std::map<std::string, Topic> topics_;
  std::map<std::pair<std::string, std::string>, std::map<std::string, RawLabel>> labels_;
  std::vector<JudgmentRecord> records_;
  std::vector<std::string> lines_;
};

/// Deals every (topic, version) pair to an assessor: pairs are shuffled with the
/// seed, then handed out round-robin, skipping assessors that already hold the topic.
inline Assignments balance_assignments(const std::vector<std::string>& assessors, const std::vector<std::string>& topics,
                                       const std::vector<std::string>& versions, std::uint64_t seed) {
  if (assessors.empty()) throw DataError("no assessors to assign");
  if (versions.size() > assessors.size()) {
    throw DataError("each topic needs a distinct assessor per version: " + std::to_string(versions.size()) +
                    " versions but " + std::to_string(assessors.size()) + " assessors");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& t : topics) {
    for (const auto& v : versions) pairs.emplace_back(t, v);
  }
  SplitMix64 rng(seed);
  for (std::size_t i = pairs.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % i);
    std::swap(pairs[i - 1], pairs[j]);
  }
  Assignments out;
  std::set<std::pair<std::string, std::string>> held;  // (assessor, topic)
  std::size_t cursor = 0;
  for (const auto& [topic, version] : pairs) {
    bool placed = false;
    for (std::size_t step = 0; step < assessors.size(); ++step) {
      const auto& a = assessors[(cursor + step) % assessors.size()];
      if (held.count({a, topic})) continue;
      out.add(topic, a, version);
      held.insert({a, topic});
      cursor = (cursor + step + 1) % assessors.size();
      placed = true;
      break;
    }
    if (!placed) throw DataError("cannot place topic " + topic + " version " + version);
  }
  return out;
}

}  // namespace poolbench::assess
