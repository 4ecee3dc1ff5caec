#pragma once

#include <array>
#include <string>

#include "poolbench/types.hpp"

namespace poolbench {

/// One qrels entry per labelled cell in the assessor's column. Matrix cells are
/// levels; raw ERROR labels were folded into 0 when the matrix was read.
inline Qrels assemble_qrels(const LabelMatrix& matrix, const std::string& assessor_id) {
  const std::size_t a = matrix.assessor_index(assessor_id);
  Qrels out(assessor_id);
  for (std::size_t u = 0; u < matrix.unit_count(); ++u) {
    if (auto level = matrix.at(u, a)) out.add(matrix.units()[u].topic, matrix.units()[u].doc, *level);
  }
  return out;
}

/// Qrels for one version, taking each topic's labels from the assessor assigned to it.
inline Qrels assemble_version_qrels(const LabelMatrix& matrix, const Assignments& assignments,
                                    const std::string& version) {
  Qrels out(version);
  for (std::size_t u = 0; u < matrix.unit_count(); ++u) {
    const auto& unit = matrix.units()[u];
    auto assessor = assignments.assessor_for(unit.topic, version);
    if (!assessor) continue;
    auto idx = matrix.find_assessor(*assessor);
    if (!idx) throw NotFound("assignment names assessor " + *assessor + " absent from the label matrix");
    if (auto level = matrix.at(u, *idx)) out.add(unit.topic, unit.doc, *level);
  }
  return out;
}

/// Per-level counts of a qrels file: index = level.
inline std::array<std::size_t, kLevels> level_histogram(const Qrels& q) {
  std::array<std::size_t, kLevels> h{};
  for (const auto& [t, docs] : q.entries()) {
    for (const auto& [d, level] : docs) ++h[static_cast<std::size_t>(level)];
  }
  return h;
}

/// Per-level counts over one assessor column of the matrix.
inline std::array<std::size_t, kLevels> column_histogram(const LabelMatrix& matrix, const std::string& assessor_id) {
  const std::size_t a = matrix.assessor_index(assessor_id);
  std::array<std::size_t, kLevels> h{};
  for (std::size_t u = 0; u < matrix.unit_count(); ++u) {
    if (auto level = matrix.at(u, a)) ++h[static_cast<std::size_t>(*level)];
  }
  return h;
}

}  // namespace poolbench
