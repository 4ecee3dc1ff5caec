#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "poolbench/error.hpp"

namespace poolbench {

/// The four buttons an assessor can press.
enum class RawLabel { HRel, Rel, NonRel, Error };

/// Number of graded levels (0, 1, 2).
inline constexpr int kLevels = 3;
inline constexpr int kMaxLevel = kLevels - 1;

/// H.REL -> 2, REL -> 1, NONREL and ERROR -> 0.
constexpr int level_of(RawLabel raw) noexcept {
  switch (raw) {
    case RawLabel::HRel:
      return 2;
    case RawLabel::Rel:
      return 1;
    case RawLabel::NonRel:
    case RawLabel::Error:
      return 0;
  }
  return 0;
}

constexpr std::string_view to_string(RawLabel raw) noexcept {
  switch (raw) {
    case RawLabel::HRel:
      return "H.REL";
    case RawLabel::Rel:
      return "REL";
    case RawLabel::NonRel:
      return "NONREL";
    case RawLabel::Error:
      return "ERROR";
  }
  return "ERROR";
}

inline std::optional<RawLabel> parse_raw_label(std::string_view text) noexcept {
  static constexpr std::array<RawLabel, 4> all{RawLabel::HRel, RawLabel::Rel, RawLabel::NonRel,
                                               RawLabel::Error};
  for (RawLabel raw : all) {
    if (to_string(raw) == text) return raw;
  }
  return std::nullopt;
}

constexpr bool is_relevant(RawLabel raw) noexcept { return level_of(raw) >= 1; }

/// Strategy a qrels version was built under; read from the version id prefix.
enum class Strategy { PRI, RND };

constexpr std::string_view to_string(Strategy s) noexcept { return s == Strategy::PRI ? "PRI" : "RND"; }

inline Strategy strategy_of(std::string_view version_id) {
  if (version_id.substr(0, 3) == "PRI" || version_id.substr(0, 3) == "pri") return Strategy::PRI;
  if (version_id.substr(0, 3) == "RND" || version_id.substr(0, 3) == "rnd") return Strategy::RND;
  throw DataError("qrels version '" + std::string(version_id) + "' does not start with PRI or RND");
}

}  // namespace poolbench
