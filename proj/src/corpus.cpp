#include "lyricgenre/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "lyricgenre/csv.hpp"
#include "lyricgenre/error.hpp"
#include "lyricgenre/text.hpp"

namespace lyricgenre {

namespace {

using json = nlohmann::json;

std::string normalize_language(std::string_view code) {
  return text::fold_case(text::trim(code));
}

std::string upper_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
  }
  return s;
}

std::string lower_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return s;
}

std::string display_genre(std::string_view raw, GenreCase genre_case) {
  std::string g = text::collapse_whitespace(raw);
  if (genre_case == GenreCase::lower) g = text::fold_case(g);
  return g;
}

// Validates and completes a parsed record; throws DataError describing the
// first violated invariant.
void finish_record(LyricRecord& r, std::size_t line) {
  if (text::trim(r.lyrics).empty()) throw DataError("empty lyrics");
  if (r.declared_language.empty()) throw DataError("empty language");
  if (r.genres.empty()) throw DataError("no genres after normalization");
  if (r.id.empty()) r.id = "row-" + std::to_string(line);
  if (r.source_id.empty()) r.source_id = r.id;
}

template <typename Parse>
IngestResult ingest_rows(Parse&& parse_next, const IngestOptions& options) {
  IngestResult result;
  while (true) {
    std::size_t line = 0;
    std::optional<LyricRecord> record;
    try {
      if (!parse_next(record, line)) break;
    } catch (const DataError& e) {
      const std::string msg = e.what();
      if (options.strict || msg.rfind("schema:", 0) == 0) {
        throw DataError("line " + std::to_string(line) + ": " + msg);
      }
      result.skipped.push_back({line, msg});
      continue;
    }
    if (record) result.records.push_back(std::move(*record));
  }
  return result;
}

void fill_genres(LyricRecord& r, const std::vector<std::string>& raw, const IngestOptions& options) {
  for (const auto& g : raw) add_genre(r, display_genre(g, options.genre_case));
}

}  // namespace

std::string CorpusVariant::to_string() const {
  return translated_from ? "translated-from:" + *translated_from : std::string("native");
}

CorpusVariant CorpusVariant::parse(std::string_view text) {
  const std::string t = text::trim(text);
  if (t.empty() || t == "native") return {};
  constexpr std::string_view prefix = "translated-from:";
  if (t.rfind(prefix, 0) == 0 && t.size() > prefix.size()) {
    return {normalize_language(std::string_view(t).substr(prefix.size()))};
  }
  throw DataError("invalid corpus variant '" + t + "'");
}

bool LyricRecord::has_genre_key(std::string_view key) const {
  return std::any_of(genres.begin(), genres.end(),
                     [&](const std::string& g) { return genre_key(g) == key; });
}

std::string genre_key(std::string_view genre) {
  return text::fold_case(text::collapse_whitespace(genre));
}

bool add_genre(LyricRecord& record, std::string_view genre) {
  std::string display = text::collapse_whitespace(genre);
  if (display.empty()) return false;
  if (record.has_genre_key(genre_key(display))) return false;
  record.genres.push_back(std::move(display));
  return true;
}

std::string variant_tag(const LyricRecord& record) {
  std::string tag = upper_ascii(record.declared_language);
  if (record.variant.translated_from) tag += "<-" + upper_ascii(*record.variant.translated_from);
  return tag;
}

std::string canonical_variant_tag(std::string_view tag) {
  std::string s(tag);
  const std::string arrow = "\xE2\x86\x90";  // U+2190
  for (auto pos = s.find(arrow); pos != std::string::npos; pos = s.find(arrow)) {
    s.replace(pos, arrow.size(), "<-");
  }
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
  s = upper_ascii(s);
  const auto pos = s.find("<-");
  if (s.empty() || pos == 0 || (pos != std::string::npos && pos + 2 == s.size())) {
    throw UsageError("invalid language variant tag '" + std::string(tag) + "'");
  }
  return s;
}

std::string display_variant_tag(std::string_view tag) {
  std::string s = canonical_variant_tag(tag);
  const auto pos = s.find("<-");
  if (pos != std::string::npos) s.replace(pos, 2, " \xE2\x86\x90 ");
  return s;
}

bool variant_tag_less(const std::string& a, const std::string& b) {
  static const std::vector<std::string> order = {"PT", "PT<-EN", "EN", "EN<-PT"};
  const auto ia = std::find(order.begin(), order.end(), a) - order.begin();
  const auto ib = std::find(order.begin(), order.end(), b) - order.begin();
  if (ia != ib) return ia < ib;
  return a < b;
}

InputFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower_ascii(path.extension().string());
  if (ext == ".csv") return InputFormat::csv;
  if (ext == ".jsonl" || ext == ".ndjson") return InputFormat::jsonl;
  throw UsageError("cannot infer input format from '" + path.string() + "' (use .csv or .jsonl)");
}

IngestResult ingest(const std::filesystem::path& path, InputFormat format, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return format == InputFormat::csv ? ingest_csv(in, options) : ingest_jsonl(in, options);
}

IngestResult ingest_csv(std::istream& in, const IngestOptions& options) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("schema: empty CSV input (missing header row)");

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header->fields.size(); ++i) {
    std::string name = lower_ascii(text::trim(header->fields[i]));
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
    column.emplace(name, i);
  }
  for (const char* required : {"lyrics", "language", "genres"}) {
    if (!column.contains(required)) {
      throw DataError(std::string("schema: missing required column '") + required + "'");
    }
  }
  auto col = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = column.find(name);
    return it == column.end() ? std::nullopt : std::optional(it->second);
  };
  const auto id_col = col("id"), artist_col = col("artist"), title_col = col("title"),
             source_col = col("source_id"), variant_col = col("corpus_variant"),
             detected_col = col("detected_language");
  const std::size_t lyrics_col = column["lyrics"], language_col = column["language"],
                    genres_col = column["genres"];

  auto parse = [&](std::optional<LyricRecord>& out, std::size_t& line) -> bool {
    auto row = reader.next();
    if (!row) return false;
    line = row->line;
    const auto& f = row->fields;
    if (f.size() == 1 && text::trim(f[0]).empty()) return true;  // blank line
    if (f.size() != header->fields.size()) {
      throw DataError("expected " + std::to_string(header->fields.size()) + " fields, got " +
                      std::to_string(f.size()));
    }
    auto get = [&](std::optional<std::size_t> c) { return c ? f[*c] : std::string(); };
    LyricRecord r;
    r.id = text::trim(get(id_col));
    r.source_id = text::trim(get(source_col));
    r.artist = text::trim(get(artist_col));
    r.title = text::trim(get(title_col));
    r.lyrics = f[lyrics_col];
    r.declared_language = normalize_language(f[language_col]);
    if (const auto d = normalize_language(get(detected_col)); !d.empty()) r.detected_language = d;
    r.variant = options.variant ? *options.variant : CorpusVariant::parse(get(variant_col));
    fill_genres(r, text::split(f[genres_col], options.genre_delimiter), options);
    finish_record(r, line);
    out = std::move(r);
    return true;
  };
  return ingest_rows(parse, options);
}

IngestResult ingest_jsonl(std::istream& in, const IngestOptions& options) {
  std::size_t line_no = 0;
  std::string line;
  auto parse = [&](std::optional<LyricRecord>& out, std::size_t& line_out) -> bool {
    if (!std::getline(in, line)) return false;
    line_out = ++line_no;
    if (text::trim(line).empty()) return true;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw DataError("expected a JSON object");
    for (const char* required : {"lyrics", "language", "genres"}) {
      if (!j.contains(required)) {
        throw DataError(std::string("missing required field '") + required + "'");
      }
    }
    auto str = [&](const char* key) -> std::string {
      if (!j.contains(key) || j[key].is_null()) return {};
      if (j[key].is_string()) return j[key].get<std::string>();
      if (j[key].is_number()) return j[key].dump();
      throw DataError(std::string("field '") + key + "' must be a string");
    };
    LyricRecord r;
    r.id = text::trim(str("id"));
    r.source_id = text::trim(str("source_id"));
    r.artist = text::trim(str("artist"));
    r.title = text::trim(str("title"));
    r.lyrics = str("lyrics");
    r.declared_language = normalize_language(str("language"));
    if (const auto d = normalize_language(str("detected_language")); !d.empty()) r.detected_language = d;
    r.variant = options.variant ? *options.variant : CorpusVariant::parse(str("corpus_variant"));
    std::vector<std::string> genres;
    const auto& g = j["genres"];
    if (g.is_array()) {
      for (const auto& item : g) {
        if (!item.is_string()) throw DataError("genres must contain strings");
        genres.push_back(item.get<std::string>());
      }
    } else if (g.is_string()) {
      genres = text::split(g.get<std::string>(), options.genre_delimiter);
    } else {
      throw DataError("genres must be a list");
    }
    fill_genres(r, genres, options);
    finish_record(r, line_no);
    out = std::move(r);
    return true;
  };
  return ingest_rows(parse, options);
}

void write_corpus_jsonl(std::ostream& out, std::span<const LyricRecord> records) {
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["source_id"] = r.source_id;
    j["artist"] = r.artist;
    j["title"] = r.title;
    j["lyrics"] = r.lyrics;
    j["language"] = r.declared_language;
    j["detected_language"] = r.detected_language ? json(*r.detected_language) : json(nullptr);
    j["genres"] = r.genres;
    j["corpus_variant"] = r.variant.to_string();
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void write_corpus_jsonl(const std::filesystem::path& path, std::span<const LyricRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_corpus_jsonl(out, records);
}

std::vector<LyricRecord> read_corpus_jsonl(const std::filesystem::path& path) {
  return ingest(path, InputFormat::jsonl).records;
}

Partition filter_mislabeled(std::span<const LyricRecord> records) {
  Partition p;
  for (const auto& r : records) {
    if (!r.detected_language) {
      throw DataError("record '" + r.id + "' has no detected language; run detection first");
    }
    (*r.detected_language == r.declared_language ? p.kept : p.discarded).push_back(r);
  }
  return p;
}

bool GenreSelection::contains(std::string_view genre) const {
  const std::string key = genre_key(genre);
  return std::any_of(shared.begin(), shared.end(),
                     [&](const std::string& g) { return genre_key(g) == key; });
}

namespace {

// Display name per key: the lexicographically smallest spelling seen, so the
// choice does not depend on record order.
std::map<std::string, std::string> display_names(std::span<const LyricRecord> records) {
  std::map<std::string, std::string> names;
  for (const auto& r : records) {
    for (const auto& g : r.genres) {
      auto [it, inserted] = names.emplace(genre_key(g), g);
      if (!inserted && g < it->second) it->second = g;
    }
  }
  return names;
}

}  // namespace

GenreSelection select_genres(std::span<const LyricRecord> records, int k) {
  if (k < 1) throw UsageError("k must be at least 1");
  std::map<std::string, std::map<std::string, std::size_t>> counts;  // lang -> key -> n
  for (const auto& r : records) {
    auto& per_lang = counts[r.declared_language];
    for (const auto& g : r.genres) ++per_lang[genre_key(g)];
  }
  if (counts.size() < 2) {
    throw DataError("genre selection needs records in at least two languages, found " +
                    std::to_string(counts.size()));
  }
  const auto names = display_names(records);

  GenreSelection sel;
  sel.k = k;
  std::map<std::string, std::size_t> membership;  // key -> number of languages ranking it
  for (const auto& [lang, per_genre] : counts) {
    std::vector<std::pair<std::string, std::size_t>> ranked(per_genre.begin(), per_genre.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(k);
    auto& top = sel.per_language_top[lang];
    for (const auto& [key, n] : ranked) {
      top.push_back(names.at(key));
      ++membership[key];
    }
  }
  for (const auto& [key, n] : membership) {
    if (n == counts.size()) sel.shared.push_back(names.at(key));
  }
  return sel;
}

GenreCountTable genre_counts(std::span<const LyricRecord> records, const GenreSelection& selection) {
  if (selection.shared.empty()) throw DataError("genre selection is empty");
  GenreCountTable table;
  std::set<std::string> langs;
  for (const auto& r : records) langs.insert(r.declared_language);
  table.languages.assign(langs.begin(), langs.end());
  std::sort(table.languages.begin(), table.languages.end(), [](const auto& a, const auto& b) {
    return variant_tag_less(upper_ascii(a), upper_ascii(b));
  });
  auto lang_index = [&](const std::string& l) {
    return static_cast<std::size_t>(std::find(table.languages.begin(), table.languages.end(), l) -
                                    table.languages.begin());
  };

  std::vector<std::string> keys;
  for (const auto& g : selection.shared) {
    keys.push_back(genre_key(g));
    table.rows.push_back({g, std::vector<std::size_t>(table.languages.size(), 0), 0});
  }
  table.songs_per_language.assign(table.languages.size(), 0);

  for (const auto& r : records) {
    const std::size_t li = lang_index(r.declared_language);
    bool any = false;
    for (std::size_t gi = 0; gi < keys.size(); ++gi) {
      if (r.has_genre_key(keys[gi])) {
        ++table.rows[gi].per_language[li];
        any = true;
      }
    }
    if (any) ++table.songs_per_language[li];
  }
  for (auto& row : table.rows) {
    for (auto n : row.per_language) row.total += n;
  }
  for (auto n : table.songs_per_language) table.songs_total += n;
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    return a.total != b.total ? a.total > b.total : genre_key(a.genre) < genre_key(b.genre);
  });
  return table;
}

namespace {

std::string thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string render_count_table(const GenreCountTable& table) {
  std::ostringstream out;
  out << "| Genre |";
  for (const auto& l : table.languages) out << ' ' << upper_ascii(l) << " |";
  out << " Total |\n|---|";
  for (std::size_t i = 0; i < table.languages.size(); ++i) out << "---:|";
  out << "---:|\n";
  for (const auto& row : table.rows) {
    out << "| " << row.genre << " |";
    for (auto n : row.per_language) out << ' ' << thousands(n) << " |";
    out << ' ' << thousands(row.total) << " |\n";
  }
  out << "| Total |";
  for (auto n : table.songs_per_language) out << ' ' << thousands(n) << " |";
  out << ' ' << thousands(table.songs_total) << " |\n";
  return out.str();
}

std::size_t BinaryDataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

BinaryDataset label_view(std::span<const LyricRecord> records, std::string_view genre,
                         const GenreSelection& selection) {
  if (!selection.contains(genre)) {
    throw UsageError("genre '" + std::string(genre) + "' is not in the shared genre selection");
  }
  return label_view(records, genre);
}

BinaryDataset label_view(std::span<const LyricRecord> records, std::string_view genre) {
  const std::string key = genre_key(genre);
  BinaryDataset view;
  view.genre = std::string(genre);
  view.rows.reserve(records.size());
  view.labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    view.rows.push_back(i);
    view.labels.push_back(records[i].has_genre_key(key) ? 1 : -1);
  }
  return view;
}

}  // namespace lyricgenre
