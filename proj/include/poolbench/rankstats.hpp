#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/labels.hpp"
#include "poolbench/special.hpp"
#include "poolbench/types.hpp"

namespace poolbench {

// ---------------------------------------------------------------- Kendall's tau

struct TauResult {
  double tau = 0.0;
  std::size_t n = 0;
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::size_t tied = 0;  // pairs tied in either vector
  std::optional<double> ci_low;
  std::optional<double> ci_high;
};

/// Tau-a between two score vectors over the same systems: (C - D) / (n(n-1)/2).
/// Pairs tied in either vector add nothing to the numerator.
template <typename T>
TauResult kendall_tau(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw StatsError("kendall_tau: vectors differ in length");
  if (a.size() < 2) throw StatsError("kendall_tau: need at least two systems");
  TauResult r;
  r.n = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const auto da = a[i] < a[j] ? -1 : (a[j] < a[i] ? 1 : 0);
      const auto db = b[i] < b[j] ? -1 : (b[j] < b[i] ? 1 : 0);
      if (da == 0 || db == 0) {
        ++r.tied;
      } else if (da == db) {
        ++r.concordant;
      } else {
        ++r.discordant;
      }
    }
  }
  const double pairs = 0.5 * static_cast<double>(r.n) * static_cast<double>(r.n - 1);
  r.tau = (static_cast<double>(r.concordant) - static_cast<double>(r.discordant)) / pairs;
  return r;
}

inline TauResult kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  return kendall_tau(std::span<const double>(a), std::span<const double>(b));
}

/// Tau between the run rankings (by mean score) of two score matrices with the same run set.
inline TauResult kendall_tau(const ScoreMatrix& a, const ScoreMatrix& b) {
  if (a.runs() != b.runs()) throw StatsError("score matrices rank different run sets");
  return kendall_tau(a.run_means(), b.run_means());
}

/// Fisher-z interval: z = atanh(tau), se = sqrt(0.437 / (n - 4)).
/// |tau| = 1 yields the point interval [tau, tau].
inline std::pair<double, double> tau_fisher_ci(double tau, std::size_t n, double level = 0.95) {
  if (n < 5) throw StatsError("tau confidence interval needs n >= 5");
  if (!(tau >= -1.0 && tau <= 1.0)) throw StatsError("tau outside [-1, 1]");
  if (std::abs(tau) == 1.0) return {tau, tau};
  const double z = std::atanh(tau);
  const double se = std::sqrt(0.437 / static_cast<double>(n - 4));
  const double crit = special::normal_quantile(0.5 + 0.5 * level);
  return {std::tanh(z - crit * se), std::tanh(z + crit * se)};
}

inline TauResult with_ci(TauResult r, double level = 0.95) {
  auto [lo, hi] = tau_fisher_ci(r.tau, r.n, level);
  r.ci_low = lo;
  r.ci_high = hi;
  return r;
}

// ---------------------------------------------------------------- Tukey HSD

enum class Design { Paired, Unpaired };

struct TukeyPair {
  std::size_t a = 0, b = 0;  // group indices, a < b
  double mean_diff = 0.0;    // mean[a] - mean[b]
  double q = 0.0;
  double p = 1.0;
  double effect_size = 0.0;  // mean_diff / sqrt(residual_variance)
};

struct TukeyResult {
  Design design = Design::Paired;
  std::vector<std::string> groups;
  std::vector<double> means;
  std::vector<std::size_t> sizes;
  double residual_variance = 0.0;  // V_E2 (paired) or V_E1 (unpaired)
  double df = 0.0;
  std::size_t blocks_used = 0;     // paired: blocks left after listwise deletion
  std::vector<TukeyPair> pairwise;
};

/// p-value of a Tukey HSD statistic q with k groups and df error degrees of freedom.
inline double tukey_p_value(double q, int k, double df) { return special::studentized_range_sf(q, k, df); }

namespace detail {

inline TukeyPair tukey_pair(std::size_t a, std::size_t b, double diff, double se, double v, int k, double df) {
  TukeyPair pr{a, b, diff, 0.0, 1.0, 0.0};
  if (diff == 0.0) return pr;
  if (v <= 0.0) throw StatsError("Tukey HSD: zero residual variance with unequal means");
  pr.q = std::abs(diff) / se;
  pr.p = tukey_p_value(pr.q, k, df);
  pr.effect_size = diff / std::sqrt(v);
  return pr;
}

inline std::vector<std::string> default_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("G" + std::to_string(i + 1));
  return names;
}

}  // namespace detail

/// Randomised-block Tukey HSD. `table[i][j]` is block i under treatment j; blocks
/// with any missing cell are dropped listwise. V_E2 is the two-way ANOVA residual
/// mean square with (k-1)(n-1) df; q = |diff| / sqrt(V_E2 / n).
inline TukeyResult tukey_hsd_paired(const std::vector<std::vector<std::optional<double>>>& table,
                                    std::vector<std::string> names = {}) {
  if (table.empty()) throw StatsError("Tukey HSD (paired): empty table");
  const std::size_t k = table.front().size();
  if (names.empty()) names = detail::default_names(k);
  if (names.size() != k) throw StatsError("Tukey HSD (paired): treatment names do not match columns");
  std::vector<std::vector<double>> rows;
  for (const auto& row : table) {
    if (row.size() != k) throw StatsError("Tukey HSD (paired): ragged table");
    if (std::all_of(row.begin(), row.end(), [](const auto& c) { return c.has_value(); })) {
      std::vector<double> r;
      for (const auto& c : row) r.push_back(*c);
      rows.push_back(std::move(r));
    }
  }
  const std::size_t n = rows.size();
  if (k < 2 || n < 2) throw StatsError("Tukey HSD (paired): need k >= 2 treatments and n >= 2 complete blocks");

  std::vector<double> col_mean(k, 0.0), row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      col_mean[j] += rows[i][j];
      row_mean[i] += rows[i][j];
      grand += rows[i][j];
    }
  }
  for (auto& m : col_mean) m /= static_cast<double>(n);
  for (auto& m : row_mean) m /= static_cast<double>(k);
  grand /= static_cast<double>(n * k);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double e = rows[i][j] - row_mean[i] - col_mean[j] + grand;
      ss += e * e;
    }
  }
  TukeyResult out;
  out.design = Design::Paired;
  out.groups = std::move(names);
  out.means = col_mean;
  out.sizes.assign(k, n);
  out.df = static_cast<double>((k - 1) * (n - 1));
  out.residual_variance = ss / out.df;
  out.blocks_used = n;
  const double se = std::sqrt(out.residual_variance / static_cast<double>(n));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      out.pairwise.push_back(detail::tukey_pair(a, b, col_mean[a] - col_mean[b], se, out.residual_variance,
                                                static_cast<int>(k), out.df));
    }
  }
  return out;
}

/// One-way Tukey-Kramer HSD. V_E1 is the one-way ANOVA residual mean square with
/// N-k df; q = |diff| / sqrt(V_E1 (1/n_a + 1/n_b) / 2).
inline TukeyResult tukey_hsd_unpaired(const std::vector<std::vector<double>>& groups,
                                      std::vector<std::string> names = {}) {
  const std::size_t k = groups.size();
  if (k < 2) throw StatsError("Tukey HSD (unpaired): need at least two groups");
  if (names.empty()) names = detail::default_names(k);
  if (names.size() != k) throw StatsError("Tukey HSD (unpaired): group names do not match groups");
  std::size_t total = 0;
  std::vector<double> means;
  std::vector<std::size_t> sizes;
  double ss = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].size() < 2) throw StatsError("Tukey HSD (unpaired): group " + names[g] + " has fewer than two observations");
    const double m = std::accumulate(groups[g].begin(), groups[g].end(), 0.0) / static_cast<double>(groups[g].size());
    for (double x : groups[g]) ss += (x - m) * (x - m);
    means.push_back(m);
    sizes.push_back(groups[g].size());
    total += groups[g].size();
  }
  TukeyResult out;
  out.design = Design::Unpaired;
  out.groups = std::move(names);
  out.means = means;
  out.sizes = sizes;
  out.df = static_cast<double>(total - k);
  out.residual_variance = ss / out.df;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double se = std::sqrt(out.residual_variance * (1.0 / static_cast<double>(sizes[a]) + 1.0 / static_cast<double>(sizes[b])) / 2.0);
      out.pairwise.push_back(detail::tukey_pair(a, b, means[a] - means[b], se, out.residual_variance,
                                                static_cast<int>(k), out.df));
    }
  }
  return out;
}

/// Reconstructs one paired-design comparison from a published summary
/// (mean difference, V_E2, k treatments, n blocks).
inline TukeyPair tukey_paired_from_summary(double diff, double residual_variance, int k, std::size_t n) {
  const double df = static_cast<double>((k - 1) * (static_cast<int>(n) - 1));
  return detail::tukey_pair(0, 1, diff, std::sqrt(residual_variance / static_cast<double>(n)), residual_variance, k, df);
}

/// Reconstructs one unpaired comparison from (mean difference, V_E1, group sizes, total N, k).
inline TukeyPair tukey_unpaired_from_summary(double diff, double residual_variance, std::size_t n_a, std::size_t n_b,
                                             std::size_t total, int k) {
  const double se = std::sqrt(residual_variance * (1.0 / static_cast<double>(n_a) + 1.0 / static_cast<double>(n_b)) / 2.0);
  return detail::tukey_pair(0, 1, diff, se, residual_variance, k, static_cast<double>(total) - k);
}

// ---------------------------------------------------------------- paired t

struct PairedTResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;            // two-sided
  double mean_diff = 0.0;    // mean(a) - mean(b)
  double glass_delta = 0.0;  // mean_diff / sd(a)
};

inline double sample_sd(std::span<const double> x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline PairedTResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StatsError("paired t: samples differ in length");
  if (a.size() < 2) throw StatsError("paired t: need n >= 2");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  PairedTResult r;
  r.df = static_cast<double>(n - 1);
  r.mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  const double sd_d = sample_sd(d);
  if (sd_d == 0.0) {
    if (r.mean_diff != 0.0) throw StatsError("paired t: differences have zero variance");
    return r;  // a == b
  }
  r.t = r.mean_diff / (sd_d / std::sqrt(static_cast<double>(n)));
  r.p = 2.0 * special::t_cdf(-std::abs(r.t), r.df);
  const double sd_a = sample_sd(a);
  r.glass_delta = sd_a > 0.0 ? r.mean_diff / sd_a : 0.0;
  return r;
}

inline PairedTResult paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  return paired_t(std::span<const double>(a), std::span<const double>(b));
}

// ---------------------------------------------------------------- power

struct PowerResult {
  double pilot_t = 0.0;
  std::size_t pilot_n = 0;
  double alpha = 0.05;
  double effect_size = 0.0;  // t / sqrt(n)
  double achieved_power = 0.0;
  double target_power = 0.70;
  std::size_t required_n = 0;
};

/// Two-sided power of a paired t-test with n pairs and standardised effect d.
inline double paired_t_power(double d, std::size_t n, double alpha = 0.05) {
  if (n < 2) throw StatsError("power: need n >= 2");
  const double df = static_cast<double>(n - 1);
  const double ncp = d * std::sqrt(static_cast<double>(n));
  const double crit = special::t_quantile(1.0 - alpha / 2.0, df);
  return (1.0 - special::noncentral_t_cdf(crit, df, ncp)) + special::noncentral_t_cdf(-crit, df, ncp);
}

/// Achieved power of a pilot paired t-test and the smallest n reaching the target power.
inline PowerResult power_pairedt(double pilot_t, std::size_t pilot_n, double alpha = 0.05, double target_power = 0.70) {
  if (pilot_n < 2) throw StatsError("power: pilot n must be >= 2");
  if (!(target_power > 0.0 && target_power < 1.0)) throw StatsError("power: target power must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw StatsError("power: alpha must lie in (0,1)");
  PowerResult r;
  r.pilot_t = pilot_t;
  r.pilot_n = pilot_n;
  r.alpha = alpha;
  r.target_power = target_power;
  r.effect_size = pilot_t / std::sqrt(static_cast<double>(pilot_n));
  r.achieved_power = paired_t_power(r.effect_size, pilot_n, alpha);
  const double d = std::abs(r.effect_size);
  if (d == 0.0) throw StatsError("power: zero effect size never reaches the target power");

  // Linear upward scan. Far-away answers start a little below the normal
  // approximation; small ones scan from 2.
  const double z = special::normal_quantile(1.0 - alpha / 2.0) + special::normal_quantile(target_power);
  const double approx = (z / d) * (z / d);
  std::size_t n = 2;
  if (approx > 200.0) {
    n = static_cast<std::size_t>(0.9 * approx);
    if (paired_t_power(d, n, alpha) >= target_power) n = 2;
  }
  constexpr std::size_t kLimit = 100'000'000;
  for (;; ++n) {
    if (n > kLimit) throw StatsError("power: required n exceeds search limit");
    if (paired_t_power(d, n, alpha) < target_power) continue;
    bool stable = true;
    for (std::size_t m = n + 1; m <= n + 3; ++m) {
      if (paired_t_power(d, m, alpha) < target_power) {
        stable = false;
        break;
      }
    }
    if (stable) break;
  }
  r.required_n = n;
  return r;
}

// ---------------------------------------------------------------- tau partition

struct TauPartition {
  std::vector<double> rnd_rnd, pri_pri, rnd_pri;
  double mean_rnd_rnd = 0.0, mean_pri_pri = 0.0, mean_rnd_pri = 0.0;
};

/// Splits the upper triangle of a version x version tau table into RND-RND,
/// PRI-PRI and RND-PRI groups and averages each. `taus` is keyed by unordered
/// version pairs (either orientation is accepted).
inline TauPartition mean_tau_partition(const std::vector<std::string>& versions,
                                       const std::map<std::pair<std::string, std::string>, double>& taus) {
  TauPartition out;
  for (std::size_t i = 0; i < versions.size(); ++i) {
    for (std::size_t j = i + 1; j < versions.size(); ++j) {
      auto it = taus.find({versions[i], versions[j]});
      if (it == taus.end()) it = taus.find({versions[j], versions[i]});
      if (it == taus.end()) throw StatsError("tau table misses " + versions[i] + " vs " + versions[j]);
      const Strategy si = strategy_of(versions[i]), sj = strategy_of(versions[j]);
      if (si != sj) {
        out.rnd_pri.push_back(it->second);
      } else if (si == Strategy::RND) {
        out.rnd_rnd.push_back(it->second);
      } else {
        out.pri_pri.push_back(it->second);
      }
    }
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  if (out.rnd_rnd.empty() || out.pri_pri.empty() || out.rnd_pri.empty()) {
    throw StatsError("tau partition needs at least two RND and two PRI versions");
  }
  out.mean_rnd_rnd = mean(out.rnd_rnd);
  out.mean_pri_pri = mean(out.pri_pri);
  out.mean_rnd_pri = mean(out.rnd_pri);
  return out;
}

}  // namespace poolbench
