#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/io.hpp"
#include "poolbench/labels.hpp"
#include "poolbench/types.hpp"

namespace poolbench {

struct PoolConfig {
  int depth = 15;
  Strategy strategy = Strategy::PRI;
  std::uint64_t seed = 0;  // RND only
};

struct PooledDoc {
  std::string docid;
  int run_count = 0;  // runs that returned the doc at rank <= depth
  long rank_sum = 0;  // sum of its ranks over those runs

  friend bool operator==(const PooledDoc&, const PooledDoc&) = default;
};

struct PooledTopic {
  std::string topic;
  std::vector<PooledDoc> documents;  // docid order
  std::vector<std::string> presentation_order;

  const PooledDoc* find(std::string_view docid) const {
    auto it = std::lower_bound(documents.begin(), documents.end(), docid,
                               [](const PooledDoc& d, std::string_view id) { return d.docid < id; });
    return it != documents.end() && it->docid == docid ? &*it : nullptr;
  }
};

/// Union of every run's top-`depth` documents for `topic`, with per-document
/// run counts and rank sums. The presentation order is left empty.
inline PooledTopic build_pool(std::span<const RankedRun> runs, const std::string& topic, int depth) {
  if (depth < 1) throw DataError("pool depth must be >= 1");
  std::map<std::string, PooledDoc> docs;
  bool covered = false;
  for (const auto& run : runs) {
    const auto* ranking = run.ranking(topic);
    if (!ranking) continue;
    covered = true;
    const std::size_t cut = std::min(ranking->size(), static_cast<std::size_t>(depth));
    for (std::size_t i = 0; i < cut; ++i) {
      auto& d = docs[(*ranking)[i]];
      d.docid = (*ranking)[i];
      d.run_count += 1;
      d.rank_sum += static_cast<long>(i + 1);
    }
  }
  if (!covered) throw DataError("no run covers topic " + topic);
  PooledTopic pool{topic, {}, {}};
  pool.documents.reserve(docs.size());
  for (auto& [id, d] : docs) pool.documents.push_back(std::move(d));
  return pool;
}

/// Every topic that at least one run covers, in lexicographic order.
inline std::vector<std::string> covered_topics(std::span<const RankedRun> runs) {
  std::set<std::string> s;
  for (const auto& run : runs) {
    for (const auto& [t, list] : run.rankings) s.insert(t);
  }
  return {s.begin(), s.end()};
}

/// Pseudorelevance order: more runs first, then smaller rank sum, then docid.
inline std::vector<std::string> order_pri(const PooledTopic& pool) {
  std::vector<const PooledDoc*> docs;
  for (const auto& d : pool.documents) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(), [](const PooledDoc* a, const PooledDoc* b) {
    if (a->run_count != b->run_count) return a->run_count > b->run_count;
    if (a->rank_sum != b->rank_sum) return a->rank_sum < b->rank_sum;
    return a->docid < b->docid;
  });
  std::vector<std::string> order;
  order.reserve(docs.size());
  for (const auto* d : docs) order.push_back(d->docid);
  return order;
}

inline constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seeded shuffle of the docid-sorted pool. The generator starts at
/// seed ^ fnv1a64(topic); for i = n-1 .. 1, j = next() % (i + 1) and a[i] <-> a[j].
/// Output is bit-exact across platforms.
inline std::vector<std::string> order_rnd(const PooledTopic& pool, std::uint64_t seed) {
  std::vector<std::string> order;
  order.reserve(pool.documents.size());
  for (const auto& d : pool.documents) order.push_back(d.docid);
  std::sort(order.begin(), order.end());
  SplitMix64 rng(seed ^ fnv1a64(pool.topic));
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

inline void apply_order(PooledTopic& pool, const PoolConfig& config) {
  pool.presentation_order = config.strategy == Strategy::PRI ? order_pri(pool) : order_rnd(pool, config.seed);
}

/// Builds and orders pools for the given topics.
inline std::vector<PooledTopic> build_pools(std::span<const RankedRun> runs, const std::vector<std::string>& topics,
                                            const PoolConfig& config) {
  std::vector<PooledTopic> pools;
  pools.reserve(topics.size());
  for (const auto& t : topics) {
    pools.push_back(build_pool(runs, t, config.depth));
    apply_order(pools.back(), config);
  }
  return pools;
}

// ---------------------------------------------------------------- pool files

/// One line per document in presentation order: `qid docid run_count rank_sum position`.
inline std::string serialize_pools(std::span<const PooledTopic> pools) {
  std::string out;
  for (const auto& pool : pools) {
    for (std::size_t i = 0; i < pool.presentation_order.size(); ++i) {
      const auto* d = pool.find(pool.presentation_order[i]);
      if (!d) throw DataError("presentation order of topic " + pool.topic + " names unpooled doc " + pool.presentation_order[i]);
      out += pool.topic + " " + d->docid + " " + std::to_string(d->run_count) + " " + std::to_string(d->rank_sum) + " " +
             std::to_string(i + 1) + "\n";
    }
  }
  return out;
}

inline std::map<std::string, PooledTopic> parse_pools(std::istream& in, const std::string& source) {
  std::map<std::string, PooledTopic> pools;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_blank_or_comment(line)) continue;
    auto f = io::split_ws(line);
    if (f.size() != 5) throw ParseError(source, lineno, "expected 5 fields (qid docid run_count rank_sum position)");
    PooledDoc d{std::string(f[1]), 0, 0};
    std::size_t position = 0;
    if (!io::parse_number(f[2], d.run_count) || d.run_count < 1) throw ParseError(source, lineno, "bad run_count");
    if (!io::parse_number(f[3], d.rank_sum) || d.rank_sum < d.run_count) throw ParseError(source, lineno, "bad rank_sum");
    if (!io::parse_number(f[4], position)) throw ParseError(source, lineno, "bad position");
    auto& pool = pools[std::string(f[0])];
    pool.topic = std::string(f[0]);
    if (position != pool.presentation_order.size() + 1) {
      throw ParseError(source, lineno, "position " + std::to_string(position) + " out of sequence for topic " + pool.topic);
    }
    pool.presentation_order.push_back(d.docid);
    pool.documents.push_back(std::move(d));
  }
  for (auto& [t, pool] : pools) {
    std::sort(pool.documents.begin(), pool.documents.end(),
              [](const PooledDoc& a, const PooledDoc& b) { return a.docid < b.docid; });
    for (std::size_t i = 1; i < pool.documents.size(); ++i) {
      if (pool.documents[i].docid == pool.documents[i - 1].docid) {
        throw DataError(source + ": topic " + t + " lists " + pool.documents[i].docid + " twice");
      }
    }
  }
  return pools;
}

inline std::map<std::string, PooledTopic> parse_pools_file(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_pools(in, path.string());
}

}  // namespace poolbench
