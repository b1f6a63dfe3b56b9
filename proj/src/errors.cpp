#include "eclipse/errors.hpp"

namespace eclipse {

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMalformedHeader: return "malformed header";
    case ParseErrorKind::kMalformedRecord: return "malformed record";
    case ParseErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ParseErrorKind::kDuplicateId: return "duplicate id";
    case ParseErrorKind::kNonFinite: return "non-finite value";
    case ParseErrorKind::kFieldCount: return "wrong field count";
    case ParseErrorKind::kBadInteger: return "bad integer";
    case ParseErrorKind::kBadNumber: return "bad number";
    case ParseErrorKind::kDuplicateJudgment: return "duplicate judgment";
    case ParseErrorKind::kRankOrder: return "rank order violation";
    case ParseErrorKind::kScoreOrder: return "score order violation";
  }
  return "parse error";
}

namespace {

std::string describe(ParseErrorKind kind, const std::string& path,
                     std::size_t line, const std::string& detail) {
  std::string msg = path;
  if (line > 0) msg += ":" + std::to_string(line);
  msg += ": ";
  msg += to_string(kind);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::string path, std::size_t line,
                       const std::string& detail)
    : Error(describe(kind, path, line, detail)),
      kind_(kind),
      path_(std::move(path)),
      line_(line) {}

}  // namespace eclipse
