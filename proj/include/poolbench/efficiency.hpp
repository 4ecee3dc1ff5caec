#pragma once

// Assessor efficiency criteria per (assessor, topic) timeline:
//   TJ1D   open_topic -> first judgment; NA above 3 minutes
//   TF1RH  open_topic -> first REL or H.REL judgment; NA above 30 minutes
//   TF1H   open_topic -> first H.REL judgment; NA above 30 minutes
//   ATBJ   mean gap between consecutive judgments, gaps above 3 minutes dropped
//   NREJ   judgments that changed a document's existing label

#include <algorithm>
#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/events.hpp"
#include "poolbench/io.hpp"
#include "poolbench/types.hpp"

namespace poolbench {

inline constexpr double kJudgeOutlierSeconds = 180.0;
inline constexpr double kFindNASeconds = 1800.0;

/// Key: (assessor, topic).
using TimelineKey = std::pair<std::string, std::string>;
using Timelines = std::map<TimelineKey, std::vector<ActivityEvent>>;

/// Reads JSON-lines events and groups them into per-(assessor, topic) timelines
/// sorted by timestamp. Blank and '#' lines are skipped. Out-of-order timestamps
/// are stable-sorted and reported through `warnings`.
inline Timelines parse_activity_log(std::istream& in, const std::string& source,
                                    std::vector<std::string>* warnings = nullptr) {
  Timelines out;
  std::set<TimelineKey> opened;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_blank_or_comment(line)) continue;
    auto e = event_from_json_line(line, source, lineno);
    TimelineKey key{e.assessor, e.topic};
    if (e.action == Action::OpenTopic) {
      opened.insert(key);
    } else if (!opened.count(key)) {
      throw ParseError(source, lineno,
                       std::string(to_string(e.action)) + " event for assessor " + e.assessor + ", topic " + e.topic +
                           " precedes any open_topic");
    }
    out[key].push_back(std::move(e));
  }
  for (auto& [key, events] : out) {
    const bool sorted = std::is_sorted(events.begin(), events.end(),
                                       [](const ActivityEvent& a, const ActivityEvent& b) { return a.ts < b.ts; });
    if (sorted) continue;
    if (warnings) {
      warnings->push_back(source + ": timestamps out of order for assessor " + key.first + ", topic " + key.second +
                          "; events re-sorted");
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const ActivityEvent& a, const ActivityEvent& b) { return a.ts < b.ts; });
    if (events.front().action != Action::OpenTopic) {
      throw ParseError(source, events.front().line,
                       "after sorting by timestamp, the timeline of assessor " + key.first + ", topic " + key.second +
                           " does not start with open_topic");
    }
  }
  return out;
}

inline Timelines parse_activity_log_file(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
  auto in = io::open_input(path);
  return parse_activity_log(in, path.string(), warnings);
}

struct EfficiencyStats {
  std::optional<double> tj1d;   // seconds
  std::optional<double> tf1rh;
  std::optional<double> tf1h;
  std::optional<double> atbj;   // NA when no gap survives the outlier rule
  int nrej = 0;
  std::size_t judgments = 0;
};

inline EfficiencyStats efficiency_stats(std::span<const ActivityEvent> timeline) {
  EfficiencyStats s;
  auto open = std::find_if(timeline.begin(), timeline.end(),
                           [](const ActivityEvent& e) { return e.action == Action::OpenTopic; });
  if (open == timeline.end()) throw DataError("timeline without open_topic");
  const auto t0 = open->ts;
  auto secs = [t0](std::int64_t ts) { return static_cast<double>(ts - t0) / 1000.0; };

  std::map<std::string, RawLabel> current;
  std::optional<std::int64_t> prev_judge;
  double gap_sum = 0.0;
  std::size_t gaps = 0;
  for (const auto& e : timeline) {
    if (e.action != Action::Judge) continue;
    ++s.judgments;
    const double since_open = secs(e.ts);
    if (!s.tj1d) s.tj1d = since_open;
    if (!s.tf1rh && is_relevant(*e.label)) s.tf1rh = since_open;
    if (!s.tf1h && *e.label == RawLabel::HRel) s.tf1h = since_open;
    if (prev_judge) {
      const double gap = static_cast<double>(e.ts - *prev_judge) / 1000.0;
      if (gap <= kJudgeOutlierSeconds) {
        gap_sum += gap;
        ++gaps;
      }
    }
    prev_judge = e.ts;
    auto [it, inserted] = current.emplace(*e.doc, *e.label);
    if (!inserted) {
      if (it->second != *e.label) ++s.nrej;
      it->second = *e.label;
    }
  }
  if (s.tj1d && *s.tj1d > kJudgeOutlierSeconds) s.tj1d.reset();
  if (s.tf1rh && *s.tf1rh > kFindNASeconds) s.tf1rh.reset();
  if (s.tf1h && *s.tf1h > kFindNASeconds) s.tf1h.reset();
  if (gaps > 0) s.atbj = gap_sum / static_cast<double>(gaps);
  return s;
}

enum class Criterion { TJ1D, TF1RH, TF1H, ATBJ, NREJ };

inline constexpr std::array<Criterion, 5> kAllCriteria{Criterion::TJ1D, Criterion::TF1RH, Criterion::TF1H,
                                                       Criterion::ATBJ, Criterion::NREJ};

inline constexpr std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::TJ1D:
      return "TJ1D";
    case Criterion::TF1RH:
      return "TF1RH";
    case Criterion::TF1H:
      return "TF1H";
    case Criterion::ATBJ:
      return "ATBJ";
    case Criterion::NREJ:
      return "NREJ";
  }
  return "?";
}

inline std::optional<double> criterion_value(const EfficiencyStats& s, Criterion c) {
  switch (c) {
    case Criterion::TJ1D:
      return s.tj1d;
    case Criterion::TF1RH:
      return s.tf1rh;
    case Criterion::TF1H:
      return s.tf1h;
    case Criterion::ATBJ:
      return s.atbj;
    case Criterion::NREJ:
      return static_cast<double>(s.nrej);
  }
  return std::nullopt;
}

/// Topic x version table for one criterion. A topic row gets NA in a version
/// column when no timeline exists for it or the value is NA.
struct CriterionTable {
  Criterion criterion = Criterion::TJ1D;
  std::vector<std::string> topics;
  std::vector<std::string> versions;
  std::vector<std::vector<std::optional<double>>> cells;  // [topic][version]

  std::size_t complete_rows() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& row) {
      return std::all_of(row.begin(), row.end(), [](const auto& c) { return c.has_value(); });
    }));
  }
};

inline CriterionTable criterion_table(const std::map<TimelineKey, EfficiencyStats>& stats, const Assignments& assignments,
                                      const std::vector<std::string>& versions, const std::vector<std::string>& topics,
                                      Criterion c) {
  CriterionTable t{c, topics, versions, {}};
  for (const auto& topic : topics) {
    std::vector<std::optional<double>> row;
    for (const auto& v : versions) {
      std::optional<double> value;
      if (auto assessor = assignments.assessor_for(topic, v)) {
        auto it = stats.find({*assessor, topic});
        if (it != stats.end()) value = criterion_value(it->second, c);
      }
      row.push_back(value);
    }
    t.cells.push_back(std::move(row));
  }
  return t;
}

inline std::map<TimelineKey, EfficiencyStats> efficiency_stats(const Timelines& timelines) {
  std::map<TimelineKey, EfficiencyStats> out;
  for (const auto& [key, events] : timelines) out.emplace(key, efficiency_stats(events));
  return out;
}

/// `assessor topic TJ1D TF1RH TF1H ATBJ NREJ`, NA for missing values.
inline std::string serialize_efficiency(const std::map<TimelineKey, EfficiencyStats>& stats) {
  auto cell = [](const std::optional<double>& v) { return v ? io::format_double(*v, 3) : std::string("NA"); };
  std::string s = "assessor\ttopic\tTJ1D\tTF1RH\tTF1H\tATBJ\tNREJ\n";
  for (const auto& [key, st] : stats) {
    s += key.first + "\t" + key.second + "\t" + cell(st.tj1d) + "\t" + cell(st.tf1rh) + "\t" + cell(st.tf1h) + "\t" +
         cell(st.atbj) + "\t" + std::to_string(st.nrej) + "\n";
  }
  return s;
}

}  // namespace poolbench
