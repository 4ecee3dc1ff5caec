#pragma once

// Assessor activity events, one JSON object per line:
//   {"ts": 1700000000000, "assessor": "A01", "topic": "0001", "doc": "d1", "action": "judge", "label": "REL"}
// `doc` is absent for open_topic; `label` appears on judge events only.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "poolbench/error.hpp"
#include "poolbench/labels.hpp"

namespace poolbench {

enum class Action { OpenTopic, ViewDoc, Judge };

inline constexpr std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::OpenTopic:
      return "open_topic";
    case Action::ViewDoc:
      return "view_doc";
    case Action::Judge:
      return "judge";
  }
  return "?";
}

inline std::optional<Action> parse_action(std::string_view s) noexcept {
  if (s == "open_topic") return Action::OpenTopic;
  if (s == "view_doc") return Action::ViewDoc;
  if (s == "judge") return Action::Judge;
  return std::nullopt;
}

struct ActivityEvent {
  std::int64_t ts = 0;  // milliseconds since epoch
  std::string assessor;
  std::string topic;
  std::optional<std::string> doc;
  Action action = Action::OpenTopic;
  std::optional<RawLabel> label;
  std::size_t line = 0;  // source line, 0 when not read from a file

  friend bool operator==(const ActivityEvent& a, const ActivityEvent& b) {
    return a.ts == b.ts && a.assessor == b.assessor && a.topic == b.topic && a.doc == b.doc &&
           a.action == b.action && a.label == b.label;
  }
};

inline nlohmann::ordered_json to_json(const ActivityEvent& e) {
  nlohmann::ordered_json j;
  j["ts"] = e.ts;
  j["assessor"] = e.assessor;
  j["topic"] = e.topic;
  if (e.doc) j["doc"] = *e.doc;
  j["action"] = std::string(to_string(e.action));
  if (e.label) j["label"] = std::string(to_string(*e.label));
  return j;
}

/// Compact single-line JSON without a trailing newline.
inline std::string to_json_line(const ActivityEvent& e) { return to_json(e).dump(); }

/// Parses one event object; `where` prefixes error messages.
inline ActivityEvent event_from_json(const nlohmann::json& j, const std::string& source, std::size_t line) {
  auto fail = [&](const std::string& what) { return ParseError(source, line, what); };
  if (!j.is_object()) throw fail("event is not a JSON object");
  ActivityEvent e;
  e.line = line;
  try {
    if (!j.contains("ts") || !j["ts"].is_number_integer()) throw fail("missing or non-integer 'ts'");
    e.ts = j["ts"].get<std::int64_t>();
    if (!j.contains("assessor") || !j["assessor"].is_string()) throw fail("missing 'assessor'");
    e.assessor = j["assessor"].get<std::string>();
    if (!j.contains("topic") || !j["topic"].is_string()) throw fail("missing 'topic'");
    e.topic = j["topic"].get<std::string>();
    if (!j.contains("action") || !j["action"].is_string()) throw fail("missing 'action'");
    auto action = parse_action(j["action"].get<std::string>());
    if (!action) throw fail("unknown action '" + j["action"].get<std::string>() + "'");
    e.action = *action;
    if (j.contains("doc") && !j["doc"].is_null()) e.doc = j["doc"].get<std::string>();
    if (e.action != Action::OpenTopic && !e.doc) throw fail(std::string(to_string(e.action)) + " event without 'doc'");
    if (e.action == Action::Judge) {
      if (!j.contains("label") || !j["label"].is_string()) throw fail("judge event without 'label'");
      auto label = parse_raw_label(j["label"].get<std::string>());
      if (!label) throw fail("unknown label '" + j["label"].get<std::string>() + "'");
      e.label = label;
    }
  } catch (const nlohmann::json::exception& ex) {
    throw fail(ex.what());
  }
  return e;
}

inline ActivityEvent event_from_json_line(std::string_view text, const std::string& source, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(source, line, std::string("malformed JSON: ") + ex.what());
  }
  return event_from_json(j, source, line);
}

}  // namespace poolbench
