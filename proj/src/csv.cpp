#include "lyricgenre/csv.hpp"

#include "lyricgenre/error.hpp"

namespace lyricgenre::csv {

std::optional<Row> Reader::next() {
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return std::nullopt;

  Row row;
  row.line = line_;
  std::string field;
  bool quoted = false;
  bool after_quote = false;

  while (true) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) {
        throw DataError("line " + std::to_string(row.line) + ": unterminated quoted field");
      }
      row.fields.push_back(std::move(field));
      return row;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else if (ch == sep_) {
      row.fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // swallowed; the '\n' ends the row
    } else if (ch == '\n') {
      ++line_;
      row.fields.push_back(std::move(field));
      return row;
    } else {
      field.push_back(ch);
    }
    c = in_.get();
  }
}

std::string quote(std::string_view field, char sep) {
  const bool needs = field.find_first_of(std::string{sep, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(sep);
    out += quote(fields[i], sep);
  }
  return out;
}

}  // namespace lyricgenre::csv
