#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "poolbench/agreement.hpp"
#include "poolbench/io.hpp"

using namespace poolbench;

namespace {

using Table = std::vector<std::vector<std::optional<int>>>;

LabelMatrix to_matrix(const Table& t, const std::vector<std::string>& topics = {}) {
  std::vector<TopicDoc> units;
  for (std::size_t u = 0; u < t.size(); ++u) units.push_back({topics.empty() ? "1" : topics[u], "d" + std::to_string(u)});
  std::vector<std::string> coders;
  for (std::size_t a = 0; a < t.front().size(); ++a) coders.push_back("A" + std::to_string(a));
  LabelMatrix m(units, coders);
  for (std::size_t u = 0; u < t.size(); ++u) {
    for (std::size_t a = 0; a < t[u].size(); ++a) m.set(u, a, t[u][a]);
  }
  return m;
}

Table random_table(std::mt19937& g, std::size_t units, std::size_t coders, double na_rate) {
  std::uniform_int_distribution<int> lv(0, 2);
  std::bernoulli_distribution na(na_rate);
  Table t(units, std::vector<std::optional<int>>(coders));
  for (auto& row : t) {
    for (auto& c : row) {
      if (!na(g)) c = lv(g);
    }
  }
  return t;
}

}  // namespace

TEST(Alpha, WorkedExample) {
  const Table t{{0, 0}, {1, 2}, {2, 2}};
  auto r = krippendorff_alpha_ordinal(to_matrix(t));
  EXPECT_NEAR(r.observed, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.expected, 6.0, 1e-12);
  EXPECT_NEAR(r.alpha, 7.0 / 9.0, 1e-12);
  EXPECT_EQ(r.unit_count, 3u);
}

TEST(Alpha, PerfectAgreementIsOne) {
  const Table t{{0, 0, 0}, {1, 1, std::nullopt}, {2, 2, 2}, {1, 1, 1}};
  EXPECT_DOUBLE_EQ(krippendorff_alpha_ordinal(to_matrix(t)).alpha, 1.0);
}

TEST(Alpha, SingleDistinctLabelIsOneByConvention) {
  const Table t{{1, 1}, {1, 1}};
  auto r = krippendorff_alpha_ordinal(to_matrix(t));
  EXPECT_EQ(r.expected, 0.0);
  EXPECT_EQ(r.alpha, 1.0);
}

TEST(Alpha, NoPairableUnits) {
  const Table t{{1, std::nullopt}, {std::nullopt, 2}};
  EXPECT_THROW(krippendorff_alpha_ordinal(to_matrix(t)), StatsError);
}

TEST(Alpha, MatchesOracleOnRandomMatrices) {
  std::mt19937 g(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_table(g, 2 + trial % 40, 2 + trial % 7, 0.3);
    auto expected = oracle::alpha_ordinal(t);
    if (!expected) {
      EXPECT_THROW(krippendorff_alpha_ordinal(to_matrix(t)), StatsError);
      continue;
    }
    EXPECT_NEAR(krippendorff_alpha_ordinal(to_matrix(t)).alpha, *expected, 1e-12);
  }
}

TEST(Alpha, CoincidenceMatrixIsSymmetric) {
  std::mt19937 g(8);
  auto cm = coincidence_matrix(to_matrix(random_table(g, 30, 5, 0.2)));
  double total = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(cm.o[c][k], cm.o[k][c], 1e-12);
    total += cm.marginal[c];
  }
  EXPECT_NEAR(total, cm.total, 1e-12);
}

TEST(Alpha, InvariantUnderCoderAndUnitOrder) {
  std::mt19937 g(21);
  auto t = random_table(g, 25, 4, 0.2);
  const double base = krippendorff_alpha_ordinal(to_matrix(t)).alpha;
  auto shuffled = t;
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  for (auto& row : shuffled) std::reverse(row.begin(), row.end());
  EXPECT_NEAR(krippendorff_alpha_ordinal(to_matrix(shuffled)).alpha, base, 1e-12);
}

TEST(Alpha, NoiseDoesNotIncreaseAgreementOnAverage) {
  std::mt19937 g(99);
  std::uniform_int_distribution<int> lv(0, 2);
  int not_higher = 0;
  const int trials = 200;
  for (int s = 0; s < trials; ++s) {
    Table t(40, std::vector<std::optional<int>>(4));
    for (auto& row : t) {
      const int v = lv(g);
      for (auto& c : row) c = v;
    }
    const double perfect = krippendorff_alpha_ordinal(to_matrix(t)).alpha;
    std::bernoulli_distribution flip(0.2);
    for (auto& row : t) {
      for (auto& c : row) {
        if (flip(g)) c = lv(g);
      }
    }
    not_higher += krippendorff_alpha_ordinal(to_matrix(t)).alpha <= perfect + 1e-12;
  }
  EXPECT_EQ(not_higher, trials);
}

TEST(LeaveOneOut, BlanksOneColumn) {
  const Table t{{0, 0, 1}, {1, 2, 2}, {2, 2, 0}, {1, 1, 1}};
  const auto m = to_matrix(t);
  const Table without{{0, 0}, {1, 2}, {2, 2}, {1, 1}};
  EXPECT_NEAR(leave_one_out_alpha(m, "A2").alpha, krippendorff_alpha_ordinal(to_matrix(without)).alpha, 1e-12);
  EXPECT_THROW(leave_one_out_alpha(m, "A9"), NotFound);
}

TEST(LeaveOneOut, AllNaColumnLeavesAlphaUnchanged) {
  const Table t{{0, 0, std::nullopt}, {1, 2, std::nullopt}, {2, 2, std::nullopt}};
  const auto m = to_matrix(t);
  EXPECT_DOUBLE_EQ(leave_one_out_alpha(m, "A2").alpha, krippendorff_alpha_ordinal(m).alpha);
}

TEST(LeaveOneOut, TwoCodersMinusOneHasNoPairs) {
  const Table t{{0, 1}, {2, 2}};
  EXPECT_THROW(leave_one_out_alpha(to_matrix(t), "A0"), StatsError);
}

TEST(LeaveOneOut, DroppingADuplicateNeverRaisesAlpha) {
  std::mt19937 g(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_table(g, 30, 3, 0.0);
    for (auto& row : t) row.push_back(row[0]);  // A3 duplicates A0
    const auto m = to_matrix(t);
    EXPECT_GE(krippendorff_alpha_ordinal(m).alpha + 1e-12, leave_one_out_alpha(m, "A3").alpha);
  }
}

TEST(Projection, SplitsByStrategy) {
  std::istringstream in(
      "topic\tdoc\tA\tB\tC\tD\n"
      "1\td1\t2\t2\t0\t1\n"
      "1\td2\t0\t0\t2\t2\n"
      "2\td1\t1\t1\t1\t1\n");
  auto m = io::parse_label_matrix(in, "m");
  Assignments asg;
  asg.add("1", "A", "RND1");
  asg.add("1", "B", "RND2");
  asg.add("1", "C", "PRI1");
  asg.add("1", "D", "PRI2");
  asg.add("2", "A", "PRI1");
  asg.add("2", "B", "PRI2");
  asg.add("2", "C", "RND1");
  asg.add("2", "D", "RND2");
  auto rnd = project(m, asg, Projection::RND);
  EXPECT_EQ(rnd.at(0, 0), 2);
  EXPECT_FALSE(rnd.at(0, 2).has_value());
  EXPECT_FALSE(rnd.at(2, 0).has_value());
  EXPECT_EQ(rnd.at(2, 2), 1);

  auto pt = mean_per_topic_alpha(m, asg, {"1", "2"}, Projection::RND);
  ASSERT_EQ(pt.topics.size(), 2u);
  EXPECT_DOUBLE_EQ(pt.topics[0].result->alpha, 1.0);
  EXPECT_DOUBLE_EQ(pt.topics[1].result->alpha, 1.0);
  EXPECT_DOUBLE_EQ(pt.mean, 1.0);

  auto single = mean_per_topic_alpha(m, asg, {"1"}, Projection::All);
  EXPECT_DOUBLE_EQ(single.mean, krippendorff_alpha_ordinal(m.topic_slice("1")).alpha);
  EXPECT_THROW(mean_per_topic_alpha(m, asg, {}, Projection::All), StatsError);
}

TEST(Projection, FailingTopicsAreReported) {
  std::istringstream in("A\tB\n1\td1\t1\t2\n2\td1\t1\tNA\n");
  auto m = io::parse_label_matrix(in, "m");
  auto pt = mean_per_topic_alpha(m, Assignments{}, {"1", "2", "3"}, Projection::All);
  EXPECT_EQ(pt.defined, 1u);
  EXPECT_TRUE(pt.topics[0].result.has_value());
  EXPECT_FALSE(pt.topics[1].result.has_value());
  EXPECT_FALSE(pt.topics[1].failure.empty());
  EXPECT_FALSE(pt.topics[2].result.has_value());
}

TEST(Kappa, WorkedExample) {
  EXPECT_NEAR(quadratic_weighted_kappa({0, 1, 2, 2}, {0, 2, 2, 1}), 7.0 / 11.0, 1e-12);
  EXPECT_NEAR(quadratic_weighted_kappa({0, 1, 2, 2}, {0, 2, 2, 1}), 0.636, 1e-3);
}

TEST(Kappa, IdenticalIsOneAndDegenerateThrows) {
  EXPECT_DOUBLE_EQ(quadratic_weighted_kappa({0, 1, 2, 1}, {0, 1, 2, 1}), 1.0);
  EXPECT_THROW(quadratic_weighted_kappa({1, 1}, {1, 1}), StatsError);
  EXPECT_THROW(quadratic_weighted_kappa({1}, {1, 2}), StatsError);
  EXPECT_THROW(quadratic_weighted_kappa(std::vector<int>{}, std::vector<int>{}), StatsError);
}

TEST(Kappa, MatchesOracleAndIsOrderInvariant) {
  std::mt19937 g(12);
  std::uniform_int_distribution<int> lv(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> a(5 + trial % 30), b(a.size());
    for (auto& x : a) x = lv(g);
    for (auto& x : b) x = lv(g);
    a[0] = 0;
    a[1] = 2;
    const double k = quadratic_weighted_kappa(a, b);
    EXPECT_NEAR(k, oracle::kappa_quadratic(a, b), 1e-12);
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), g);
    std::vector<int> a2, b2;
    for (auto i : idx) {
      a2.push_back(a[i]);
      b2.push_back(b[i]);
    }
    EXPECT_NEAR(quadratic_weighted_kappa(a2, b2), k, 1e-12);
    EXPECT_NEAR(quadratic_weighted_kappa(b, a), k, 1e-12);
  }
}

TEST(Kappa, PerTopicMean) {
  std::istringstream in(
      "topic\tdoc\tA\tB\n"
      "1\td1\t0\t0\n1\td2\t1\t2\n1\td3\t2\t2\n1\td4\t2\t1\n"
      "2\td1\t0\t0\n2\td2\t2\t2\n");
  auto m = io::parse_label_matrix(in, "m");
  Assignments asg;
  for (auto t : {"1", "2"}) {
    asg.add(t, "A", "RND1");
    asg.add(t, "B", "RND4");
  }
  auto r = mean_per_topic_kappa(m, asg, "RND1", "RND4", {"1", "2"});
  EXPECT_EQ(r.defined, 2u);
  EXPECT_NEAR(r.mean, (7.0 / 11.0 + 1.0) / 2, 1e-12);
  auto missing = mean_per_topic_kappa(m, asg, "RND1", "RND4", {"1", "3"});
  EXPECT_EQ(missing.defined, 1u);
  EXPECT_FALSE(missing.topics[1].failure.empty());
}
