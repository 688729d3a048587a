#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lyricgenre::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the row starts
};

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// line breaks. Both LF and CRLF endings are accepted.
class Reader {
 public:
  explicit Reader(std::istream& in, char sep = ',') : in_(in), sep_(sep) {}

  /// Returns nullopt at end of input. Throws DataError on an unterminated
  /// quoted field.
  std::optional<Row> next();

 private:
  std::istream& in_;
  char sep_;
  std::size_t line_ = 1;
};

std::string quote(std::string_view field, char sep = ',');
std::string join(const std::vector<std::string>& fields, char sep = ',');

}  // namespace lyricgenre::csv
