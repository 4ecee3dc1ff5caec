#pragma once

// Readers and writers for the plain-text formats the workbench exchanges:
//
//   run file      qid Q0 docid rank score tag
//   qrels file    qid 0 docid level          ('#' lines are comments)
//   label matrix  TSV; header names the assessor columns; cells 0/1/2/NA
//                 (raw H.REL/REL/NONREL/ERROR cells are folded to levels)
//   assignments   topic assessor version
//   team map      run_tag team
//   topic list    one qid per line; '!' or '-' prefix excludes
//   score matrix  TSV; rows topics, columns runs, trailing mean row
//   topics        <query><qid/><content/><description/></query> fragments
//
// Every reader takes a `source` name that is used in error messages.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "poolbench/error.hpp"
#include "poolbench/types.hpp"

namespace poolbench::io {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

inline bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

/// Fixed-point text with `precision` decimals.
inline std::string format_double(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// ---------------------------------------------------------------- runs

/// Parses a run file. Per topic, documents come back in ascending rank order.
inline RankedRun parse_run(std::istream& in, const std::string& source) {
  struct Row {
    long rank;
    std::string doc;
    std::string score;
  };
  std::map<std::string, std::vector<Row>> rows;
  RankedRun run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto f = split_ws(line);
    if (f.size() != 6) throw ParseError(source, lineno, "expected 6 fields (qid Q0 docid rank score tag)");
    if (f[1] != "Q0") throw ParseError(source, lineno, "second field must be Q0");
    long rank = 0;
    if (!parse_number(f[3], rank) || rank < 1) throw ParseError(source, lineno, "bad rank '" + std::string(f[3]) + "'");
    double score = 0;
    if (!parse_number(f[4], score)) throw ParseError(source, lineno, "bad score '" + std::string(f[4]) + "'");
    if (run.run_tag.empty()) {
      run.run_tag = std::string(f[5]);
    } else if (run.run_tag != f[5]) {
      throw ParseError(source, lineno, "run tag '" + std::string(f[5]) + "' differs from '" + run.run_tag + "'");
    }
    auto& topic_rows = rows[std::string(f[0])];
    for (const auto& r : topic_rows) {
      if (r.doc == f[2]) {
        throw ParseError(source, lineno, "duplicate document " + std::string(f[2]) + " in topic " + std::string(f[0]));
      }
    }
    topic_rows.push_back({rank, std::string(f[2]), std::string(f[4])});
  }
  for (auto& [topic, list] : rows) {
    std::stable_sort(list.begin(), list.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
    auto& ranking = run.rankings[topic];
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].rank != static_cast<long>(i + 1)) {
        throw DataError(source + ": topic " + topic + ": ranks not contiguous, expected rank " + std::to_string(i + 1) +
                        " but found " + std::to_string(list[i].rank));
      }
      ranking.push_back(std::move(list[i].doc));
    }
  }
  // Scores are informational only; keep their text for canonical rewriting.
  for (auto& [topic, list] : rows) {
    auto& s = run.score_text[topic];
    for (auto& r : list) s.push_back(std::move(r.score));
  }
  return run;
}

inline RankedRun parse_run_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_run(in, path.string());
}

/// Canonical run text: topics in lexicographic order, rank order within a topic, single spaces.
inline std::string serialize_run(const RankedRun& run) {
  std::string out;
  for (const auto& [topic, docs] : run.rankings) {
    const std::vector<std::string>* scores = nullptr;
    if (auto it = run.score_text.find(topic); it != run.score_text.end()) scores = &it->second;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::string score = scores && i < scores->size() ? (*scores)[i] : format_double(-static_cast<double>(i + 1), 4);
      out += topic + " Q0 " + docs[i] + " " + std::to_string(i + 1) + " " + score + " " + run.run_tag + "\n";
    }
  }
  return out;
}

/// Loads every regular file in `dir` as a run, ordered by run tag.
inline std::vector<RankedRun> load_runs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RankedRun> runs;
  for (const auto& f : files) {
    runs.push_back(parse_run_file(f));
    if (runs.back().run_tag.empty()) runs.back().run_tag = f.filename().string();
  }
  std::sort(runs.begin(), runs.end(), [](const RankedRun& a, const RankedRun& b) { return a.run_tag < b.run_tag; });
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].run_tag == runs[i - 1].run_tag) throw DataError("duplicate run tag " + runs[i].run_tag + " in " + dir.string());
  }
  return runs;
}

// ---------------------------------------------------------------- qrels

inline Qrels parse_qrels(std::istream& in, const std::string& source, std::string version_id = {}) {
  Qrels q(std::move(version_id));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto f = split_ws(line);
    if (f.size() != 4) throw ParseError(source, lineno, "expected 4 fields (qid 0 docid level)");
    if (f[1] != "0") throw ParseError(source, lineno, "second field must be 0");
    int level = 0;
    if (!parse_number(f[3], level)) throw ParseError(source, lineno, "bad level '" + std::string(f[3]) + "'");
    if (level < 0 || level > kMaxLevel) {
      throw ParseError(source, lineno, "invalid level " + std::to_string(level) + " (expected 0, 1 or 2)");
    }
    std::string topic(f[0]), doc(f[2]);
    if (q.level(topic, doc)) throw ParseError(source, lineno, "duplicate entry " + topic + " " + doc);
    q.add(topic, doc, level);
  }
  return q;
}

/// The version id defaults to the file stem (".../RND1.qrels" -> "RND1").
inline Qrels parse_qrels_file(const std::filesystem::path& path, std::string version_id = {}) {
  auto in = open_input(path);
  if (version_id.empty()) version_id = path.stem().string();
  return parse_qrels(in, path.string(), std::move(version_id));
}

inline std::string serialize_qrels(const Qrels& q, const std::string& header_comment = {}) {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  for (const auto& [topic, docs] : q.entries()) {
    for (const auto& [doc, level] : docs) out += topic + " 0 " + doc + " " + std::to_string(level) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- label matrix

/// Reads the TSV label matrix. The header either lists only assessor ids, or
/// carries two leading column names for the topic and doc columns. Rows may come in any order.
inline LabelMatrix parse_label_matrix(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    for (auto f : split_tabs(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw ParseError(source, lineno, "missing header row");

  std::vector<std::vector<std::string>> raw_rows;
  std::vector<std::size_t> row_lines;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto f = split_tabs(line);
    if (!width) width = f.size();
    if (f.size() != *width) throw ParseError(source, lineno, "row has " + std::to_string(f.size()) + " columns, expected " + std::to_string(*width));
    raw_rows.emplace_back(f.begin(), f.end());
    row_lines.push_back(lineno);
  }
  std::size_t n_assessors = width ? *width - 2 : header.size();
  if (width && header.size() == *width) {
    header.erase(header.begin(), header.begin() + 2);
  } else if (width && header.size() != n_assessors) {
    throw ParseError(source, 1, "header has " + std::to_string(header.size()) + " columns, rows have " + std::to_string(*width));
  }
  std::vector<TopicDoc> units;
  std::set<TopicDoc> seen;
  for (std::size_t i = 0; i < raw_rows.size(); ++i) {
    TopicDoc td{raw_rows[i][0], raw_rows[i][1]};
    if (!seen.insert(td).second) throw ParseError(source, row_lines[i], "duplicate unit " + td.topic + " " + td.doc);
    units.push_back(std::move(td));
  }
  LabelMatrix m(std::move(units), header);
  for (std::size_t i = 0; i < raw_rows.size(); ++i) {
    for (std::size_t a = 0; a < n_assessors; ++a) {
      const std::string& cell = raw_rows[i][a + 2];
      if (cell == "NA") continue;
      int level = -1;
      if (auto raw = parse_raw_label(cell)) {
        level = level_of(*raw);
      } else if (!parse_number(std::string_view(cell), level) || level < 0 || level > kMaxLevel) {
        throw ParseError(source, row_lines[i], "bad cell '" + cell + "' (expected 0, 1, 2, NA or a raw label)");
      }
      m.set(i, a, level);
    }
  }
  return m;
}

inline LabelMatrix parse_label_matrix_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_label_matrix(in, path.string());
}

inline std::string serialize_label_matrix(const LabelMatrix& m) {
  std::string out = "topic\tdoc";
  for (const auto& a : m.assessors()) out += "\t" + a;
  out += "\n";
  for (std::size_t u = 0; u < m.unit_count(); ++u) {
    out += m.units()[u].topic + "\t" + m.units()[u].doc;
    for (std::size_t a = 0; a < m.assessor_count(); ++a) {
      auto v = m.at(u, a);
      out += "\t";
      out += v ? std::to_string(*v) : "NA";
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------- small tables

inline Assignments parse_assignments(std::istream& in, const std::string& source) {
  Assignments out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto f = split_ws(line);
    if (f.size() != 3) throw ParseError(source, lineno, "expected 3 fields (topic assessor version)");
    try {
      out.add(std::string(f[0]), std::string(f[1]), std::string(f[2]));
    } catch (const DataError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return out;
}

inline Assignments parse_assignments_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_assignments(in, path.string());
}

inline std::string serialize_assignments(const Assignments& a) {
  std::string out;
  for (const auto& [key, version] : a.entries()) out += key.first + "\t" + key.second + "\t" + version + "\n";
  return out;
}

using TeamMap = std::map<std::string, std::string>;

inline TeamMap parse_team_map(std::istream& in, const std::string& source) {
  TeamMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto f = split_ws(line);
    if (f.size() != 2) throw ParseError(source, lineno, "expected 2 fields (run_tag team)");
    if (!out.emplace(std::string(f[0]), std::string(f[1])).second) {
      throw ParseError(source, lineno, "run " + std::string(f[0]) + " mapped twice");
    }
  }
  return out;
}

inline TeamMap parse_team_map_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_team_map(in, path.string());
}

/// Inclusion/exclusion list. A file with no plain entries includes everything not excluded.
struct TopicSelection {
  std::set<std::string> include;
  std::set<std::string> exclude;

  std::set<std::string> apply(const std::vector<std::string>& universe) const {
    std::set<std::string> out;
    for (const auto& t : universe) {
      if ((include.empty() || include.count(t)) && !exclude.count(t)) out.insert(t);
    }
    return out;
  }
};

inline TopicSelection parse_topic_selection(std::istream& in) {
  TopicSelection sel;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    for (auto tok : split_ws(line)) {
      if (tok.front() == '!' || tok.front() == '-') {
        sel.exclude.emplace(tok.substr(1));
      } else {
        sel.include.emplace(tok);
      }
    }
  }
  return sel;
}

inline TopicSelection parse_topic_selection_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_topic_selection(in);
}

inline std::vector<std::string> parse_name_list_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    for (auto tok : split_ws(line)) out.emplace_back(tok);
  }
  return out;
}

// ---------------------------------------------------------------- score matrix

inline std::string serialize_score_matrix(const ScoreMatrix& m) {
  std::string out = "# measure=" + m.measure_id() + " qrels=" + m.qrels_version() + " cutoff=" + std::to_string(m.cutoff()) + "\n";
  out += "topic";
  for (const auto& r : m.runs()) out += "\t" + r;
  out += "\n";
  for (std::size_t t = 0; t < m.topics().size(); ++t) {
    out += m.topics()[t];
    for (std::size_t r = 0; r < m.runs().size(); ++r) out += "\t" + format_double(m.at(t, r), 10);
    out += "\n";
  }
  out += "mean";
  for (double v : m.run_means()) out += "\t" + format_double(v, 10);
  out += "\n";
  return out;
}

/// Reads a score matrix; the trailing mean row is ignored and recomputed on demand.
inline ScoreMatrix parse_score_matrix(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::string measure, version;
  int cutoff = 0;
  std::vector<std::string> runs;
  std::vector<std::string> topics;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') {
      for (auto tok : split_ws(std::string_view(line).substr(1))) {
        auto eq = tok.find('=');
        if (eq == std::string_view::npos) continue;
        auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "measure") measure = std::string(val);
        if (key == "qrels") version = std::string(val);
        if (key == "cutoff") parse_number(val, cutoff);
      }
      continue;
    }
    if (is_blank_or_comment(line)) continue;
    auto f = split_tabs(line);
    if (runs.empty() && topics.empty() && rows.empty() && f.size() >= 1 && f[0] == "topic") {
      for (std::size_t i = 1; i < f.size(); ++i) runs.emplace_back(f[i]);
      continue;
    }
    if (runs.empty()) throw ParseError(source, lineno, "missing header row");
    if (f.size() != runs.size() + 1) throw ParseError(source, lineno, "expected " + std::to_string(runs.size() + 1) + " columns");
    if (f[0] == "mean") continue;
    std::vector<double> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v = 0;
      if (!parse_number(f[i], v)) throw ParseError(source, lineno, "bad score '" + std::string(f[i]) + "'");
      row.push_back(v);
    }
    topics.emplace_back(f[0]);
    rows.push_back(std::move(row));
  }
  ScoreMatrix m(measure, version, cutoff, topics, runs);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t r = 0; r < runs.size(); ++r) m.set(t, r, rows[t][r]);
  }
  return m;
}

inline ScoreMatrix parse_score_matrix_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_score_matrix(in, path.string());
}

// ---------------------------------------------------------------- topics

/// Lenient reader for <query> fragments; no single root element is required.
inline std::vector<Topic> parse_topics(std::istream& in, const std::string& source) {
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  static const std::regex query_re(R"(<query>([\s\S]*?)</query>)");
  auto field = [](const std::string& block, const char* tag) {
    std::regex re(std::string("<") + tag + R"(>([\s\S]*?)</)" + tag + ">");
    std::smatch m;
    if (!std::regex_search(block, m, re)) return std::string{};
    std::string v = m[1];
    auto b = v.find_first_not_of(" \t\r\n");
    auto e = v.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string{};
    v = v.substr(b, e - b + 1);
    // collapse internal runs of whitespace left by line wrapping
    std::string out;
    bool space = false;
    for (char c : v) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        space = true;
      } else {
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
      }
    }
    return out;
  };
  std::vector<Topic> topics;
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), query_re); it != std::sregex_iterator(); ++it) {
    std::string block = (*it)[1];
    Topic t{field(block, "qid"), field(block, "content"), field(block, "description")};
    if (t.qid.empty()) throw DataError(source + ": <query> without <qid>");
    if (!seen.insert(t.qid).second) throw DataError(source + ": duplicate topic " + t.qid);
    topics.push_back(std::move(t));
  }
  return topics;
}

inline std::vector<Topic> parse_topics_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_topics(in, path.string());
}

}  // namespace poolbench::io
