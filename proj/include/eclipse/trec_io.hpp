#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eclipse/retrieval.hpp"

namespace eclipse {

/// Graded relevance judgments. Unjudged pairs read as grade 0.
class Qrels {
 public:
  using Judgments = std::map<std::string, int, std::less<>>;

  /// Throws InvalidArgument on a duplicate (query, doc) pair or negative grade.
  void add(std::string query_id, std::string doc_id, int grade);

  int grade(std::string_view query_id, std::string_view doc_id) const;
  /// Judged documents for a query, or nullptr when the query has none.
  const Judgments* judged(std::string_view query_id) const;
  bool has_query(std::string_view query_id) const;
  std::vector<std::string> query_ids() const;
  /// Number of judged documents with grade >= threshold.
  std::size_t relevant_count(std::string_view query_id, int threshold) const;

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  friend bool operator==(const Qrels&, const Qrels&) = default;

 private:
  std::map<std::string, Judgments, std::less<>> by_query_;
  std::size_t size_ = 0;
};

struct RunEntry {
  std::string query_id;
  std::string doc_id;
  std::size_t rank = 0;
  double score = 0.0;
  std::string tag;

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// Reads "qid iter docid rel" lines; the iteration field is ignored.
Qrels parse_qrels(const std::filesystem::path& path);
void write_qrels(const Qrels& qrels, const std::filesystem::path& path);

/// Checks, per query, that ranks are 1..n in order of appearance and that
/// scores do not increase. Throws InvalidArgument naming the offending entry.
void validate_run(const std::vector<RunEntry>& entries);

/// One line "qid Q0 docid rank score tag" with the score printed to exactly
/// six decimals.
std::string format_run_line(const RunEntry& entry);

/// Validates first, so a bad run never produces a partial file.
void write_run(const std::vector<RunEntry>& entries,
               const std::filesystem::path& path);
std::vector<RunEntry> parse_run(const std::filesystem::path& path);

/// Run entries for a ranked pool, ranks starting at 1.
std::vector<RunEntry> to_run_entries(const CandidatePool& pool,
                                     const std::string& tag);

/// Inverse of to_run_entries, one pool per query in first-appearance order.
std::vector<CandidatePool> to_pools(const std::vector<RunEntry>& entries);

}  // namespace eclipse
