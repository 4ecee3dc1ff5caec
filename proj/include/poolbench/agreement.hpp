#pragma once

// Ordinal Krippendorff's alpha and quadratic weighted kappa over 0..2 levels.

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/labels.hpp"
#include "poolbench/types.hpp"

namespace poolbench {

struct CoincidenceMatrix {
  std::array<std::array<double, kLevels>, kLevels> o{};  // o[c][k], symmetric
  std::array<double, kLevels> marginal{};                // n_c
  double total = 0.0;                                    // n
  std::size_t pairable_units = 0;
};

struct AgreementResult {
  double alpha = 1.0;
  double observed = 0.0;  // D_o
  double expected = 0.0;  // D_e
  std::size_t unit_count = 0;
};

/// Units with m >= 2 labels add each ordered pair of their labels with weight 1/(m-1).
inline CoincidenceMatrix coincidence_matrix(const LabelMatrix& matrix) {
  CoincidenceMatrix cm;
  std::array<int, kLevels> counts{};
  for (std::size_t u = 0; u < matrix.unit_count(); ++u) {
    counts.fill(0);
    int m = 0;
    for (std::size_t a = 0; a < matrix.assessor_count(); ++a) {
      if (auto l = matrix.at(u, a)) {
        ++counts[static_cast<std::size_t>(*l)];
        ++m;
      }
    }
    if (m < 2) continue;
    ++cm.pairable_units;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t c = 0; c < kLevels; ++c) {
      for (std::size_t k = 0; k < kLevels; ++k) {
        const double pairs = c == k ? counts[c] * (counts[c] - 1.0) : static_cast<double>(counts[c]) * counts[k];
        cm.o[c][k] += pairs * w;
      }
    }
  }
  for (std::size_t c = 0; c < kLevels; ++c) {
    cm.marginal[c] = std::accumulate(cm.o[c].begin(), cm.o[c].end(), 0.0);
    cm.total += cm.marginal[c];
  }
  return cm;
}

/// Ordinal metric: (sum_{g=c..k} n_g - (n_c + n_k)/2)^2.
inline double ordinal_delta2(const CoincidenceMatrix& cm, std::size_t c, std::size_t k) {
  if (c > k) std::swap(c, k);
  double s = 0.0;
  for (std::size_t g = c; g <= k; ++g) s += cm.marginal[g];
  s -= 0.5 * (cm.marginal[c] + cm.marginal[k]);
  return s * s;
}

inline AgreementResult alpha_from_coincidences(const CoincidenceMatrix& cm) {
  if (cm.pairable_units == 0) throw StatsError("alpha undefined: no unit carries two or more labels");
  AgreementResult r;
  r.unit_count = cm.pairable_units;
  const double n = cm.total;
  for (std::size_t c = 0; c < kLevels; ++c) {
    for (std::size_t k = 0; k < kLevels; ++k) {
      if (c == k) continue;
      const double d2 = ordinal_delta2(cm, c, k);
      r.observed += cm.o[c][k] * d2;
      r.expected += cm.marginal[c] * cm.marginal[k] * d2;
    }
  }
  r.observed /= n;
  r.expected /= n * (n - 1.0);
  r.alpha = r.expected > 0.0 ? 1.0 - r.observed / r.expected : 1.0;
  return r;
}

inline AgreementResult krippendorff_alpha_ordinal(const LabelMatrix& matrix) {
  return alpha_from_coincidences(coincidence_matrix(matrix));
}

/// Alpha with one assessor's column blanked.
inline AgreementResult leave_one_out_alpha(const LabelMatrix& matrix, const std::string& assessor_id) {
  const std::size_t drop = matrix.assessor_index(assessor_id);
  return krippendorff_alpha_ordinal(matrix.masked([drop](std::size_t, std::size_t a) { return a != drop; }));
}

// ---------------------------------------------------------------- projections

enum class Projection { All, RND, PRI };

inline std::string_view to_string(Projection p) noexcept {
  switch (p) {
    case Projection::All:
      return "ALL";
    case Projection::RND:
      return "RND";
    case Projection::PRI:
      return "PRI";
  }
  return "?";
}

inline Projection parse_projection(std::string_view s) {
  if (s == "all" || s == "ALL") return Projection::All;
  if (s == "rnd" || s == "RND") return Projection::RND;
  if (s == "pri" || s == "PRI") return Projection::PRI;
  throw DataError("unknown projection '" + std::string(s) + "' (expected all, rnd or pri)");
}

/// Blanks every cell whose assessor did not produce a version of the projected
/// strategy for that unit's topic. ALL keeps the matrix unchanged.
inline LabelMatrix project(const LabelMatrix& matrix, const Assignments& assignments, Projection p) {
  if (p == Projection::All) return matrix;
  const Strategy want = p == Projection::RND ? Strategy::RND : Strategy::PRI;
  return matrix.masked([&](std::size_t u, std::size_t a) {
    auto v = assignments.version(matrix.units()[u].topic, matrix.assessors()[a]);
    return v && strategy_of(*v) == want;
  });
}

struct TopicAlpha {
  std::string topic;
  std::optional<AgreementResult> result;
  std::string failure;  // set when result is empty
};

struct PerTopicAlpha {
  std::vector<TopicAlpha> topics;
  double mean = 0.0;        // over topics with a result
  std::size_t defined = 0;
};

inline PerTopicAlpha mean_per_topic_alpha(const LabelMatrix& matrix, const Assignments& assignments,
                                          const std::vector<std::string>& topics, Projection p) {
  if (topics.empty()) throw StatsError("per-topic alpha over an empty topic set");
  const LabelMatrix projected = project(matrix, assignments, p);
  PerTopicAlpha out;
  double sum = 0.0;
  for (const auto& t : topics) {
    TopicAlpha ta{t, std::nullopt, {}};
    try {
      const auto slice = projected.topic_slice(t);
      if (slice.unit_count() == 0) throw StatsError("topic " + t + " has no units in the label matrix");
      ta.result = krippendorff_alpha_ordinal(slice);
      sum += ta.result->alpha;
      ++out.defined;
    } catch (const StatsError& e) {
      ta.failure = e.what();
    }
    out.topics.push_back(std::move(ta));
  }
  if (out.defined == 0) throw StatsError("alpha undefined for every requested topic");
  out.mean = sum / static_cast<double>(out.defined);
  return out;
}

// ---------------------------------------------------------------- kappa

/// kappa = 1 - sum(w O) / sum(w E), w_ij = (i-j)^2 / (K-1)^2.
inline double quadratic_weighted_kappa(std::span<const int> a, std::span<const int> b, int categories = kLevels) {
  if (a.size() != b.size()) throw StatsError("kappa: label vectors differ in length");
  if (a.empty()) throw StatsError("kappa: no units");
  if (categories < 2) throw StatsError("kappa: need at least two categories");
  const auto K = static_cast<std::size_t>(categories);
  std::vector<double> obs(K * K, 0.0), ma(K, 0.0), mb(K, 0.0);
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0 || a[i] >= categories || b[i] >= categories) {
      throw StatsError("kappa: label outside 0.." + std::to_string(categories - 1));
    }
    obs[static_cast<std::size_t>(a[i]) * K + static_cast<std::size_t>(b[i])] += 1.0 / n;
    ma[static_cast<std::size_t>(a[i])] += 1.0 / n;
    mb[static_cast<std::size_t>(b[i])] += 1.0 / n;
  }
  const double norm = static_cast<double>((K - 1) * (K - 1));
  double wo = 0.0, we = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      const double w = d * d / norm;
      wo += w * obs[i * K + j];
      we += w * ma[i] * mb[j];
    }
  }
  if (we == 0.0) throw StatsError("kappa undefined: expected disagreement is zero");
  return 1.0 - wo / we;
}

inline double quadratic_weighted_kappa(const std::vector<int>& a, const std::vector<int>& b, int categories = kLevels) {
  return quadratic_weighted_kappa(std::span<const int>(a), std::span<const int>(b), categories);
}

struct TopicKappa {
  std::string topic;
  std::optional<double> kappa;
  std::string failure;
};

struct PerTopicKappa {
  std::vector<TopicKappa> topics;
  double mean = 0.0;
  std::size_t defined = 0;
};

/// Kappa between two qrels versions per topic, over units both versions labelled,
/// macro-averaged over the topics where it is defined.
inline PerTopicKappa mean_per_topic_kappa(const LabelMatrix& matrix, const Assignments& assignments,
                                          const std::string& version_a, const std::string& version_b,
                                          const std::vector<std::string>& topics) {
  if (topics.empty()) throw StatsError("per-topic kappa over an empty topic set");
  PerTopicKappa out;
  double sum = 0.0;
  for (const auto& t : topics) {
    TopicKappa tk{t, std::nullopt, {}};
    auto ra = assignments.assessor_for(t, version_a);
    auto rb = assignments.assessor_for(t, version_b);
    if (!ra || !rb) {
      tk.failure = "topic " + t + " lacks an assessor for " + (!ra ? version_a : version_b);
    } else {
      const auto ia = matrix.assessor_index(*ra), ib = matrix.assessor_index(*rb);
      std::vector<int> la, lb;
      for (std::size_t u = 0; u < matrix.unit_count(); ++u) {
        if (matrix.units()[u].topic != t) continue;
        auto x = matrix.at(u, ia), y = matrix.at(u, ib);
        if (x && y) {
          la.push_back(*x);
          lb.push_back(*y);
        }
      }
      try {
        tk.kappa = quadratic_weighted_kappa(la, lb);
        sum += *tk.kappa;
        ++out.defined;
      } catch (const StatsError& e) {
        tk.failure = "topic " + t + ": " + e.what();
      }
    }
    out.topics.push_back(std::move(tk));
  }
  if (out.defined == 0) throw StatsError("kappa undefined for every requested topic");
  out.mean = sum / static_cast<double>(out.defined);
  return out;
}

}  // namespace poolbench
