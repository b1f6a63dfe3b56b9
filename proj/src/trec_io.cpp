#include "eclipse/trec_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Tracks per-query rank/score progression shared by validation and parsing.
struct RunChecker {
  struct State {
    std::size_t last_rank = 0;
    double last_score = 0.0;
  };
  std::unordered_map<std::string, State> states;

  // Returns an empty string when the entry is consistent, else the reason.
  std::string check(const RunEntry& e, ParseErrorKind& kind) {
    auto& st = states[e.query_id];
    if (e.rank != st.last_rank + 1) {
      kind = ParseErrorKind::kRankOrder;
      return "query " + e.query_id + ": expected rank " +
             std::to_string(st.last_rank + 1) + ", got " +
             std::to_string(e.rank);
    }
    if (st.last_rank > 0 && e.score > st.last_score) {
      kind = ParseErrorKind::kScoreOrder;
      return "query " + e.query_id + ": score increases at rank " +
             std::to_string(e.rank);
    }
    st.last_rank = e.rank;
    st.last_score = e.score;
    return {};
  }
};

bool has_space(std::string_view s) {
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

}  // namespace

void Qrels::add(std::string query_id, std::string doc_id, int grade) {
  if (grade < 0) {
    throw InvalidArgument("negative relevance grade for " + query_id + "/" +
                          doc_id);
  }
  auto& judged = by_query_[query_id];
  if (!judged.emplace(std::move(doc_id), grade).second) {
    throw InvalidArgument("duplicate judgment for query " + query_id);
  }
  ++size_;
}

int Qrels::grade(std::string_view query_id, std::string_view doc_id) const {
  const auto* judged = this->judged(query_id);
  if (judged == nullptr) return 0;
  auto it = judged->find(doc_id);
  return it == judged->end() ? 0 : it->second;
}

const Qrels::Judgments* Qrels::judged(std::string_view query_id) const {
  auto it = by_query_.find(query_id);
  return it == by_query_.end() ? nullptr : &it->second;
}

bool Qrels::has_query(std::string_view query_id) const {
  return by_query_.find(query_id) != by_query_.end();
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> out;
  out.reserve(by_query_.size());
  for (const auto& [qid, _] : by_query_) out.push_back(qid);
  return out;
}

std::size_t Qrels::relevant_count(std::string_view query_id,
                                  int threshold) const {
  const auto* judged = this->judged(query_id);
  if (judged == nullptr) return 0;
  std::size_t count = 0;
  for (const auto& [_, g] : *judged) count += g >= threshold ? 1 : 0;
  return count;
}

Qrels parse_qrels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open qrels " + path.string());
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 4) {
      throw ParseError(ParseErrorKind::kFieldCount, path.string(), lineno,
                       "expected 4 fields, got " +
                           std::to_string(fields.size()));
    }
    int grade = 0;
    if (!parse_number(fields[3], grade)) {
      throw ParseError(ParseErrorKind::kBadInteger, path.string(), lineno,
                       std::string(fields[3]));
    }
    if (grade < 0) {
      throw ParseError(ParseErrorKind::kBadInteger, path.string(), lineno,
                       "negative grade " + std::string(fields[3]));
    }
    if (const auto* judged = qrels.judged(fields[0]);
        judged != nullptr && judged->contains(fields[2])) {
      throw ParseError(ParseErrorKind::kDuplicateJudgment, path.string(),
                       lineno,
                       std::string(fields[0]) + " " + std::string(fields[2]));
    }
    qrels.add(std::string(fields[0]), std::string(fields[2]), grade);
  }
  return qrels;
}

void write_qrels(const Qrels& qrels, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& qid : qrels.query_ids()) {
    for (const auto& [doc, grade] : *qrels.judged(qid)) {
      out << qid << " 0 " << doc << ' ' << grade << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void validate_run(const std::vector<RunEntry>& entries) {
  RunChecker checker;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.query_id.empty() || e.doc_id.empty() || e.tag.empty() ||
        has_space(e.query_id) || has_space(e.doc_id) || has_space(e.tag)) {
      throw InvalidArgument("run entry " + std::to_string(i) +
                            ": fields must be non-empty without whitespace");
    }
    if (!std::isfinite(e.score)) {
      throw InvalidArgument("run entry " + std::to_string(i) +
                            ": non-finite score");
    }
    ParseErrorKind kind{};
    if (auto why = checker.check(e, kind); !why.empty()) {
      throw InvalidArgument("run entry " + std::to_string(i) + ": " + why);
    }
  }
}

std::string format_run_line(const RunEntry& e) {
  char score[64];
  std::snprintf(score, sizeof score, "%.6f", e.score);
  std::string line;
  line.reserve(e.query_id.size() + e.doc_id.size() + e.tag.size() + 40);
  line += e.query_id;
  line += " Q0 ";
  line += e.doc_id;
  line += ' ';
  line += std::to_string(e.rank);
  line += ' ';
  line += score;
  line += ' ';
  line += e.tag;
  return line;
}

void write_run(const std::vector<RunEntry>& entries, const fs::path& path) {
  validate_run(entries);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : entries) out << format_run_line(e) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<RunEntry> parse_run(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run " + path.string());
  std::vector<RunEntry> entries;
  RunChecker checker;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 6) {
      throw ParseError(ParseErrorKind::kFieldCount, path.string(), lineno,
                       "expected 6 fields, got " +
                           std::to_string(fields.size()));
    }
    RunEntry e;
    e.query_id = fields[0];
    e.doc_id = fields[2];
    e.tag = fields[5];
    if (!parse_number(fields[3], e.rank) || e.rank == 0) {
      throw ParseError(ParseErrorKind::kBadInteger, path.string(), lineno,
                       std::string(fields[3]));
    }
    if (!parse_number(fields[4], e.score) || !std::isfinite(e.score)) {
      throw ParseError(ParseErrorKind::kBadNumber, path.string(), lineno,
                       std::string(fields[4]));
    }
    ParseErrorKind kind{};
    if (auto why = checker.check(e, kind); !why.empty()) {
      throw ParseError(kind, path.string(), lineno, why);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<RunEntry> to_run_entries(const CandidatePool& pool,
                                     const std::string& tag) {
  std::vector<RunEntry> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.push_back({pool.query_id, pool.entries[i].doc_id, i + 1,
                   pool.entries[i].score, tag});
  }
  return out;
}

std::vector<CandidatePool> to_pools(const std::vector<RunEntry>& entries) {
  std::vector<CandidatePool> pools;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& e : entries) {
    auto [it, inserted] = slot.emplace(e.query_id, pools.size());
    if (inserted) pools.push_back(CandidatePool{e.query_id, {}});
    pools[it->second].entries.push_back({e.doc_id, e.score});
  }
  return pools;
}

}  // namespace eclipse
