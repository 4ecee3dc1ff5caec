#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "poolbench/efficiency.hpp"

using namespace poolbench;

namespace {

ActivityEvent open(std::int64_t s) { return {s * 1000, "as1", "t1", std::nullopt, Action::OpenTopic, std::nullopt}; }

ActivityEvent view(std::int64_t s, std::string doc) {
  return {s * 1000, "as1", "t1", std::move(doc), Action::ViewDoc, std::nullopt};
}

ActivityEvent judge(std::int64_t s, std::string doc, RawLabel l) {
  return {s * 1000, "as1", "t1", std::move(doc), Action::Judge, l};
}

EfficiencyStats stats(const std::vector<ActivityEvent>& t) { return efficiency_stats(std::span<const ActivityEvent>(t)); }

}  // namespace

TEST(Efficiency, WorkedTimeline) {
  auto s = stats({open(0), judge(10, "a", RawLabel::NonRel), judge(30, "b", RawLabel::HRel)});
  EXPECT_EQ(s.tj1d, 10.0);
  EXPECT_EQ(s.tf1rh, 30.0);
  EXPECT_EQ(s.tf1h, 30.0);
  EXPECT_EQ(s.atbj, 20.0);
  EXPECT_EQ(s.nrej, 0);
  EXPECT_EQ(s.judgments, 2u);
}

TEST(Efficiency, AtbjDropsOutlierGaps) {
  // gaps 10, 20, 200, 30
  auto s = stats({open(0), judge(5, "a", RawLabel::Rel), judge(15, "b", RawLabel::Rel), judge(35, "c", RawLabel::Rel),
                  judge(235, "d", RawLabel::Rel), judge(265, "e", RawLabel::Rel)});
  EXPECT_EQ(s.atbj, 20.0);
}

TEST(Efficiency, AtbjBoundaryIsInclusive) {
  auto s = stats({open(0), judge(1, "a", RawLabel::Rel), judge(181, "b", RawLabel::Rel)});
  EXPECT_EQ(s.atbj, 180.0);
}

TEST(Efficiency, AtbjIsNaWithoutSurvivingGap) {
  EXPECT_FALSE(stats({open(0), judge(3, "a", RawLabel::Rel)}).atbj);
  EXPECT_FALSE(stats({open(0), judge(3, "a", RawLabel::Rel), judge(400, "b", RawLabel::Rel)}).atbj);
}

TEST(Efficiency, NaRules) {
  auto s = stats({open(0), judge(181, "a", RawLabel::NonRel), judge(1801, "b", RawLabel::HRel)});
  EXPECT_FALSE(s.tj1d);
  EXPECT_FALSE(s.tf1rh);
  EXPECT_FALSE(s.tf1h);
  auto edge = stats({open(0), judge(180, "a", RawLabel::Rel), judge(1800, "b", RawLabel::HRel)});
  EXPECT_EQ(edge.tj1d, 180.0);
  EXPECT_EQ(edge.tf1rh, 180.0);
  EXPECT_EQ(edge.tf1h, 1800.0);
  auto none = stats({open(0), judge(5, "a", RawLabel::NonRel)});
  EXPECT_FALSE(none.tf1rh);
  EXPECT_FALSE(none.tf1h);
  EXPECT_FALSE(stats({open(0)}).tj1d);
}

TEST(Efficiency, FindingIsMeasuredAtTheJudgeEvent) {
  auto s = stats({open(0), view(2, "a"), judge(9, "a", RawLabel::Rel)});
  EXPECT_EQ(s.tf1rh, 9.0);
}

TEST(Efficiency, ErrorLabelIsNotRelevant) {
  auto s = stats({open(0), judge(4, "a", RawLabel::Error), judge(8, "b", RawLabel::Rel)});
  EXPECT_EQ(s.tj1d, 4.0);
  EXPECT_EQ(s.tf1rh, 8.0);
}

TEST(Efficiency, Nrej) {
  auto twice = stats({open(0), judge(1, "a", RawLabel::Rel), judge(2, "a", RawLabel::HRel), judge(3, "a", RawLabel::Rel)});
  EXPECT_EQ(twice.nrej, 2);
  auto same = stats({open(0), judge(1, "a", RawLabel::Rel), judge(2, "a", RawLabel::Rel), judge(3, "b", RawLabel::Rel)});
  EXPECT_EQ(same.nrej, 0);
}

TEST(Efficiency, TimelineWithoutOpenIsAnError) {
  EXPECT_THROW(stats({judge(1, "a", RawLabel::Rel)}), DataError);
}

TEST(EfficiencyProperties, OrderingAndInvariance) {
  std::mt19937 g(8);
  std::uniform_int_distribution<int> gap(1, 300), lab(0, 3), doc(0, 6), coin(0, 2);
  const RawLabel labels[] = {RawLabel::HRel, RawLabel::Rel, RawLabel::NonRel, RawLabel::Error};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ActivityEvent> t{open(0)}, with_views{open(0)};
    std::int64_t now = 0;
    for (int i = 0; i < 1 + trial % 15; ++i) {
      now += gap(g);
      const auto d = "d" + std::to_string(doc(g));
      if (coin(g) == 0) with_views.push_back(view(now, d));
      now += gap(g) / 10;
      auto j = judge(now, d, labels[lab(g)]);
      t.push_back(j);
      with_views.push_back(j);
    }
    const auto s = stats(t);
    const auto v = stats(with_views);
    if (s.tj1d && s.tf1rh && s.tf1h) {
      EXPECT_LE(*s.tj1d, *s.tf1rh);
      EXPECT_LE(*s.tf1rh, *s.tf1h);
    }
    for (const auto& x : {s.tj1d, s.tf1rh, s.tf1h, s.atbj}) {
      if (x) {
        EXPECT_GE(*x, 0.0);
      }
    }
    EXPECT_GE(s.nrej, 0);
    EXPECT_EQ(s.atbj, v.atbj);
    EXPECT_EQ(s.nrej, v.nrej);
    EXPECT_EQ(s.tf1h, v.tf1h);
  }
}

TEST(ActivityLog, ParsesAndGroups) {
  std::istringstream in(
      "{\"ts\":0,\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"open_topic\"}\n"
      "# comment\n"
      "{\"ts\":0,\"assessor\":\"y\",\"topic\":\"1\",\"action\":\"open_topic\"}\n"
      "{\"ts\":5000,\"assessor\":\"x\",\"topic\":\"1\",\"doc\":\"a\",\"action\":\"view_doc\"}\n"
      "{\"ts\":7000,\"assessor\":\"x\",\"topic\":\"1\",\"doc\":\"a\",\"action\":\"judge\",\"label\":\"H.REL\"}\n"
      "{\"ts\":9000,\"assessor\":\"y\",\"topic\":\"1\",\"doc\":\"a\",\"action\":\"judge\",\"label\":\"NONREL\"}\n");
  auto tl = parse_activity_log(in, "log");
  ASSERT_EQ(tl.size(), 2u);
  EXPECT_EQ(tl.at({"x", "1"}).size(), 3u);
  auto all = efficiency_stats(tl);
  EXPECT_EQ(all.at({"x", "1"}).tf1h, 7.0);
  EXPECT_EQ(all.at({"y", "1"}).tj1d, 9.0);
  EXPECT_FALSE(all.at({"y", "1"}).tf1rh);
  const auto tsv = serialize_efficiency(all);
  EXPECT_NE(tsv.find("y\t1\t9.000\tNA\tNA\tNA\t0"), std::string::npos) << tsv;
}

TEST(ActivityLog, EventBeforeOpenIsRejectedWithLine) {
  std::istringstream in(
      "{\"ts\":0,\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"open_topic\"}\n"
      "{\"ts\":1,\"assessor\":\"x\",\"topic\":\"2\",\"doc\":\"a\",\"action\":\"view_doc\"}\n");
  try {
    parse_activity_log(in, "log");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ActivityLog, OutOfOrderTimestampsAreSortedWithWarning) {
  std::istringstream in(
      "{\"ts\":0,\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"open_topic\"}\n"
      "{\"ts\":9000,\"assessor\":\"x\",\"topic\":\"1\",\"doc\":\"b\",\"action\":\"judge\",\"label\":\"REL\"}\n"
      "{\"ts\":4000,\"assessor\":\"x\",\"topic\":\"1\",\"doc\":\"a\",\"action\":\"judge\",\"label\":\"NONREL\"}\n");
  std::vector<std::string> warnings;
  auto tl = parse_activity_log(in, "log", &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(efficiency_stats(tl).at({"x", "1"}).tj1d, 4.0);
}

TEST(ActivityLog, MalformedLines) {
  for (const char* bad : {"not json", "{\"ts\":\"0\",\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"open_topic\"}",
                          "{\"ts\":0,\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"dance\"}",
                          "{\"ts\":0,\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"judge\",\"doc\":\"a\"}",
                          "{\"ts\":0,\"assessor\":\"x\",\"topic\":\"1\",\"action\":\"judge\",\"doc\":\"a\",\"label\":\"MAYBE\"}"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_activity_log(in, "log"), ParseError) << bad;
  }
}

TEST(ActivityEvent, JsonRoundTrip) {
  const auto e = judge(12, "doc-1", RawLabel::Error);
  const auto line = to_json_line(e);
  EXPECT_EQ(line, "{\"ts\":12000,\"assessor\":\"as1\",\"topic\":\"t1\",\"doc\":\"doc-1\",\"action\":\"judge\",\"label\":\"ERROR\"}");
  EXPECT_EQ(event_from_json_line(line, "x", 1), e);
}

TEST(CriterionTable, CellsFollowAssignments) {
  std::map<TimelineKey, EfficiencyStats> st;
  st[{"x", "1"}].tj1d = 3.0;
  st[{"y", "1"}].tj1d = 5.0;
  st[{"x", "2"}].nrej = 4;
  Assignments a;
  a.add("1", "x", "RND1");
  a.add("1", "y", "PRI1");
  a.add("2", "x", "PRI1");
  a.add("2", "y", "RND1");
  auto t = criterion_table(st, a, {"RND1", "PRI1"}, {"1", "2"}, Criterion::TJ1D);
  EXPECT_EQ(t.cells[0][0], 3.0);
  EXPECT_EQ(t.cells[0][1], 5.0);
  EXPECT_FALSE(t.cells[1][0]);
  EXPECT_FALSE(t.cells[1][1]);
  EXPECT_EQ(t.complete_rows(), 1u);
  auto n = criterion_table(st, a, {"RND1", "PRI1"}, {"2"}, Criterion::NREJ);
  EXPECT_EQ(n.cells[0][1], 4.0);
  EXPECT_FALSE(n.cells[0][0]);
}
