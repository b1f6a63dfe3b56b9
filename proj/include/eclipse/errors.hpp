#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eclipse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad dimensions, bad grid, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given input (zero variance, no nonzero
/// differences, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  kMalformedHeader,
  kMalformedRecord,
  kDimensionMismatch,
  kDuplicateId,
  kNonFinite,
  kFieldCount,
  kBadInteger,
  kBadNumber,
  kDuplicateJudgment,
  kRankOrder,
  kScoreOrder,
};

std::string_view to_string(ParseErrorKind kind);

/// Raised while reading any on-disk format. `line()` is 1-based, 0 when the
/// error is not tied to a line (binary header, sidecar size).
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::string path, std::size_t line,
             const std::string& detail);

  ParseErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::string path_;
  std::size_t line_;
};

}  // namespace eclipse
