#pragma once

#include <stdexcept>
#include <string>

namespace lyricgenre {

/// Failure categories. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
  usage = 1,
  data = 2,
  numeric = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad flags, bad configuration values, unknown names.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Schema violations, malformed files, invariant violations in input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Non-finite features, degenerate training sets, solver failures.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Rethrows `e` as the same kind with `context` prepended to the message.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::usage: throw UsageError(msg);
    case ErrorKind::data: throw DataError(msg);
    case ErrorKind::numeric: throw NumericError(msg);
  }
  throw Error(e.kind(), msg);
}

inline const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::data: return "data";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

}  // namespace lyricgenre
