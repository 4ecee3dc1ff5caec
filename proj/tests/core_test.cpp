#include <gtest/gtest.h>

#include <sstream>

#include "poolbench/assemble.hpp"
#include "poolbench/io.hpp"

using namespace poolbench;

namespace {

RankedRun run_from(const std::string& text, const std::string& src = "run.txt") {
  std::istringstream in(text);
  return io::parse_run(in, src);
}

Qrels qrels_from(const std::string& text, const std::string& version = "V") {
  std::istringstream in(text);
  return io::parse_qrels(in, "q.txt", version);
}

LabelMatrix matrix_from(const std::string& text) {
  std::istringstream in(text);
  return io::parse_label_matrix(in, "m.tsv");
}

}  // namespace

TEST(RunIo, ParsesAndOrdersByRank) {
  auto run = run_from(
      "001 Q0 d3 3 7.0 sysA\n"
      "001 Q0 d1 1 9.5 sysA\n"
      "001 Q0 d2 2 8.0 sysA\n"
      "002 Q0 x 1 1 sysA\n");
  EXPECT_EQ(run.run_tag, "sysA");
  ASSERT_NE(run.ranking("001"), nullptr);
  EXPECT_EQ(*run.ranking("001"), (std::vector<std::string>{"d1", "d2", "d3"}));
  EXPECT_EQ(run.ranking("003"), nullptr);
}

TEST(RunIo, RankNotScoreDeterminesOrder) {
  auto run = run_from("1 Q0 a 1 0.1 s\n1 Q0 b 2 0.9 s\n");
  EXPECT_EQ(*run.ranking("1"), (std::vector<std::string>{"a", "b"}));
}

TEST(RunIo, CanonicalRoundTrip) {
  const std::string canonical = "001 Q0 d1 1 9.5 sysA\n001 Q0 d2 2 8.0 sysA\n002 Q0 x 1 1 sysA\n";
  auto run = run_from("002  Q0\tx 1 1 sysA\n001 Q0 d2 2 8.0 sysA\n001 Q0 d1 1 9.5 sysA\n");
  EXPECT_EQ(io::serialize_run(run), canonical);
  EXPECT_EQ(io::serialize_run(run_from(canonical)), canonical);
}

TEST(RunIo, ErrorsNameTheLine) {
  try {
    run_from("1 Q0 a 1 1 s\n1 Q0 b 2 x s\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("run.txt:2"), std::string::npos);
  }
  EXPECT_THROW(run_from("1 Q1 a 1 1 s\n"), ParseError);
  EXPECT_THROW(run_from("1 Q0 a 1 1\n"), ParseError);
  EXPECT_THROW(run_from("1 Q0 a 0 1 s\n"), ParseError);
  EXPECT_THROW(run_from("1 Q0 a 1 1 s\n1 Q0 a 2 1 s\n"), ParseError);
  EXPECT_THROW(run_from("1 Q0 a 1 1 s\n1 Q0 b 2 1 t\n"), ParseError);
  EXPECT_THROW(run_from("1 Q0 a 1 1 s\n1 Q0 b 3 1 s\n"), DataError);
}

TEST(QrelsIo, ParseSerializeRoundTrip) {
  auto q = qrels_from("# header\n002 0 b 2\n001 0 a 1\n001 0 c 0\n");
  EXPECT_EQ(q.size(), 3u);
  EXPECT_EQ(q.level("001", "a"), 1);
  EXPECT_FALSE(q.level("001", "zz").has_value());
  EXPECT_EQ(q.level_or_zero("001", "zz"), 0);
  EXPECT_EQ(q.relevant_count("001"), 1u);
  const auto text = io::serialize_qrels(q);
  EXPECT_EQ(text, "001 0 a 1\n001 0 c 0\n002 0 b 2\n");
  EXPECT_EQ(qrels_from(text), q);
}

TEST(QrelsIo, RejectsBadRows) {
  EXPECT_THROW(qrels_from("1 0 a 3\n"), ParseError);
  EXPECT_THROW(qrels_from("1 0 a -1\n"), ParseError);
  EXPECT_THROW(qrels_from("1 1 a 1\n"), ParseError);
  EXPECT_THROW(qrels_from("1 0 a 1\n1 0 a 2\n"), ParseError);
  EXPECT_THROW(qrels_from("1 0 a\n"), ParseError);
}

TEST(QrelsIo, RestrictAndTopics) {
  auto q = qrels_from("1 0 a 1\n2 0 b 0\n3 0 c 2\n");
  EXPECT_EQ(q.topics(), (std::vector<std::string>{"1", "2", "3"}));
  auto r = q.restricted_to({"1", "3"});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.version_id(), "V");
}

TEST(LabelMatrixIo, HeaderWithOrWithoutLeadingColumns) {
  auto a = matrix_from("A01\tA02\n1\td1\t2\tNA\n1\td2\tH.REL\tERROR\n");
  auto b = matrix_from("topic\tdoc\tA01\tA02\n1\td1\t2\tNA\n1\td2\t2\t0\n");
  EXPECT_EQ(a.assessors(), (std::vector<std::string>{"A01", "A02"}));
  EXPECT_EQ(io::serialize_label_matrix(a), io::serialize_label_matrix(b));
  EXPECT_EQ(a.at(0, 0), 2);
  EXPECT_FALSE(a.at(0, 1).has_value());
  EXPECT_EQ(a.at(1, 1), 0);  // ERROR folds to 0
}

TEST(LabelMatrixIo, RoundTripAndErrors) {
  const std::string text = "topic\tdoc\tA\tB\tC\n1\td1\t0\t1\tNA\n2\td9\tNA\tNA\t2\n";
  EXPECT_EQ(io::serialize_label_matrix(matrix_from(text)), text);
  EXPECT_THROW(matrix_from("A\n1\td1\t5\n"), ParseError);
  EXPECT_THROW(matrix_from("A\n1\td1\t1\n1\td1\t0\n"), ParseError);
  EXPECT_THROW(matrix_from("A\tB\n1\td1\t1\n"), ParseError);
  EXPECT_THROW(matrix_from("A\tA\n1\td1\t1\t1\n"), DataError);
}

TEST(LabelMatrix, SliceAndMask) {
  auto m = matrix_from("A\tB\n1\td1\t1\t2\n2\td1\t0\t0\n1\td2\t2\t2\n");
  auto s = m.topic_slice("1");
  ASSERT_EQ(s.unit_count(), 2u);
  EXPECT_EQ(s.units()[1].doc, "d2");
  EXPECT_EQ(s.at(1, 1), 2);
  auto masked = m.masked([](std::size_t, std::size_t a) { return a == 0; });
  EXPECT_FALSE(masked.at(0, 1).has_value());
  EXPECT_EQ(masked.at(0, 0), 1);
  EXPECT_EQ(m.topics(), (std::vector<std::string>{"1", "2"}));
  EXPECT_THROW(m.assessor_index("Z"), NotFound);
}

TEST(Assemble, QrelsFromColumnAndVersion) {
  auto m = matrix_from("A\tB\n1\td1\t1\tNA\n1\td2\t2\t0\n2\td1\tNA\t2\n");
  auto qa = assemble_qrels(m, "A");
  EXPECT_EQ(qa.size(), 2u);
  EXPECT_EQ(qa.level("1", "d2"), 2);

  Assignments asg;
  asg.add("1", "A", "RND1");
  asg.add("2", "B", "RND1");
  asg.add("1", "B", "PRI1");
  auto v = assemble_version_qrels(m, asg, "RND1");
  EXPECT_EQ(io::serialize_qrels(v), "1 0 d1 1\n1 0 d2 2\n2 0 d1 2\n");
  auto p = assemble_version_qrels(m, asg, "PRI1");
  EXPECT_EQ(io::serialize_qrels(p), "1 0 d2 0\n");

  EXPECT_EQ(level_histogram(v), (std::array<std::size_t, 3>{0, 1, 2}));
  EXPECT_EQ(column_histogram(m, "B"), (std::array<std::size_t, 3>{1, 0, 1}));
}

TEST(Assignments, LookupsAndDuplicates) {
  std::istringstream in("# topic assessor version\n1 A RND1\n1 B PRI1\n2 A PRI1\n");
  auto a = io::parse_assignments(in, "asg");
  EXPECT_EQ(a.version("1", "B"), "PRI1");
  EXPECT_EQ(a.assessor_for("2", "PRI1"), "A");
  EXPECT_FALSE(a.assessor_for("2", "RND1").has_value());
  EXPECT_EQ(a.versions(), (std::vector<std::string>{"PRI1", "RND1"}));
  std::istringstream dup("1 A RND1\n1 A PRI1\n");
  EXPECT_THROW(io::parse_assignments(dup, "asg"), ParseError);
}

TEST(TopicSelection, IncludeExclude) {
  std::istringstream in("# comment\n!0003\n-0004\n");
  auto sel = io::parse_topic_selection(in);
  EXPECT_EQ(sel.apply({"0001", "0003", "0004", "0005"}), (std::set<std::string>{"0001", "0005"}));
  std::istringstream in2("0001 0003\n!0003\n");
  EXPECT_EQ(io::parse_topic_selection(in2).apply({"0001", "0002", "0003"}), (std::set<std::string>{"0001"}));
}

TEST(ScoreMatrixIo, RoundTripKeepsValues) {
  ScoreMatrix m("nDCG", "RND1", 10, {"1", "2"}, {"a", "b"});
  m.set(0, 0, 0.5);
  m.set(0, 1, 0.25);
  m.set(1, 0, 1.0 / 3.0);
  m.set(1, 1, 0.0);
  const auto text = io::serialize_score_matrix(m);
  std::istringstream in(text);
  auto back = io::parse_score_matrix(in, "sm");
  EXPECT_EQ(back.measure_id(), "nDCG");
  EXPECT_EQ(back.qrels_version(), "RND1");
  EXPECT_EQ(back.cutoff(), 10);
  EXPECT_EQ(back.runs(), m.runs());
  EXPECT_NEAR(back.at(1, 0), 1.0 / 3.0, 1e-10);
  // cells survive a second round trip unchanged; the mean row is recomputed from rounded cells
  const auto again = io::serialize_score_matrix(back);
  EXPECT_EQ(again.substr(0, again.find("mean")), text.substr(0, text.find("mean")));
  EXPECT_NEAR(back.run_means()[0], (0.5 + 1.0 / 3.0) / 2, 1e-10);
}

TEST(TopicsIo, LenientQueryBlocks) {
  std::istringstream in(
      "<queries>\n<query>\n<qid>0001</qid>\n<content>  air  quality\n index </content>\n"
      "<description>What is the\n AQI?</description></query>\n"
      "<query><qid>0002</qid><content>x</content></query>");
  auto t = io::parse_topics(in, "topics.xml");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].qid, "0001");
  EXPECT_EQ(t[0].content, "air quality index");
  EXPECT_EQ(t[0].description, "What is the AQI?");
  EXPECT_EQ(t[1].description, "");
  std::istringstream dup("<query><qid>1</qid></query><query><qid>1</qid></query>");
  EXPECT_THROW(io::parse_topics(dup, "t"), DataError);
}

TEST(TeamMapIo, Parses) {
  std::istringstream in("runA t1\nrunB t1\nrunC t2\n");
  auto tm = io::parse_team_map(in, "teams");
  EXPECT_EQ(tm.at("runC"), "t2");
  std::istringstream dup("runA t1\nrunA t2\n");
  EXPECT_THROW(io::parse_team_map(dup, "teams"), ParseError);
}

TEST(Labels, MappingAndStrategy) {
  EXPECT_EQ(level_of(RawLabel::HRel), 2);
  EXPECT_EQ(level_of(RawLabel::Rel), 1);
  EXPECT_EQ(level_of(RawLabel::NonRel), 0);
  EXPECT_EQ(level_of(RawLabel::Error), 0);
  EXPECT_EQ(parse_raw_label("H.REL"), RawLabel::HRel);
  EXPECT_FALSE(parse_raw_label("rel").has_value());
  EXPECT_EQ(strategy_of("PRI3"), Strategy::PRI);
  EXPECT_EQ(strategy_of("rnd2"), Strategy::RND);
  EXPECT_THROW(strategy_of("X1"), DataError);
}
