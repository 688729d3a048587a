#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lyricgenre {

/// Where a record's text came from: the original lyric, or a machine
/// translation out of another language.
struct CorpusVariant {
  std::optional<std::string> translated_from;

  bool is_native() const { return !translated_from.has_value(); }
  /// "native" or "translated-from:<lang>".
  std::string to_string() const;
  static CorpusVariant parse(std::string_view text);

  friend bool operator==(const CorpusVariant&, const CorpusVariant&) = default;
};

struct LyricRecord {
  std::string id;
  /// Shared by a song and its translations.
  std::string source_id;
  std::string artist;
  std::string title;
  std::string lyrics;
  std::string declared_language;
  std::optional<std::string> detected_language;
  /// Display names, unique under genre_key().
  std::vector<std::string> genres;
  CorpusVariant variant;

  bool has_genre_key(std::string_view key) const;
};

/// Matching key for a genre label: whitespace collapsed, case folded.
std::string genre_key(std::string_view genre);

/// Appends a genre unless one with the same key is already present.
/// Returns false for duplicates and for labels that are blank after trimming.
bool add_genre(LyricRecord& record, std::string_view genre);

/// Protocol tag of a record's corpus: "PT", "EN", "PT<-EN", "EN<-PT", ...
std::string variant_tag(const LyricRecord& record);
/// Accepts "PT←EN", "pt <- en", "PT<-EN" and returns the canonical ASCII form.
std::string canonical_variant_tag(std::string_view tag);
/// "PT<-EN" -> "PT ← EN" for human-facing tables.
std::string display_variant_tag(std::string_view tag);
/// Ordering used by report tables: PT, PT<-EN, EN, EN<-PT, then the rest by name.
bool variant_tag_less(const std::string& a, const std::string& b);

enum class InputFormat { csv, jsonl };
enum class GenreCase { preserve, lower };

InputFormat format_from_path(const std::filesystem::path& path);

struct IngestOptions {
  /// Strict mode aborts on the first bad row; lenient mode skips and reports it.
  bool strict = true;
  GenreCase genre_case = GenreCase::preserve;
  char genre_delimiter = ';';
  /// Overrides any per-row variant column.
  std::optional<CorpusVariant> variant;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<LyricRecord> records;
  std::vector<RowError> skipped;
};

IngestResult ingest(const std::filesystem::path& path, InputFormat format,
                    const IngestOptions& options = {});
IngestResult ingest_csv(std::istream& in, const IngestOptions& options = {});
IngestResult ingest_jsonl(std::istream& in, const IngestOptions& options = {});

/// The JSONL corpus schema read back by ingest_jsonl.
void write_corpus_jsonl(std::ostream& out, std::span<const LyricRecord> records);
void write_corpus_jsonl(const std::filesystem::path& path, std::span<const LyricRecord> records);
std::vector<LyricRecord> read_corpus_jsonl(const std::filesystem::path& path);

struct Partition {
  std::vector<LyricRecord> kept;
  std::vector<LyricRecord> discarded;
};

/// Keeps records whose declared language equals the detected one.
Partition filter_mislabeled(std::span<const LyricRecord> records);

struct GenreSelection {
  int k = 0;
  /// language -> top-k genre display names, most frequent first
  std::map<std::string, std::vector<std::string>> per_language_top;
  /// intersection of the per-language lists, sorted by genre key
  std::vector<std::string> shared;

  bool contains(std::string_view genre) const;
};

/// Ranks genres per declared language by song count (ties by genre key) and
/// intersects the top-k lists. Needs at least two languages.
GenreSelection select_genres(std::span<const LyricRecord> records, int k);

struct GenreCountTable {
  std::vector<std::string> languages;
  struct Row {
    std::string genre;
    std::vector<std::size_t> per_language;
    std::size_t total = 0;
  };
  /// ordered by total descending, then genre key
  std::vector<Row> rows;
  /// distinct songs per language carrying at least one listed genre
  std::vector<std::size_t> songs_per_language;
  std::size_t songs_total = 0;
};

GenreCountTable genre_counts(std::span<const LyricRecord> records, const GenreSelection& selection);
std::string render_count_table(const GenreCountTable& table);

/// One-vs-all view of a record set: rows index into the source span.
struct BinaryDataset {
  std::string genre;
  std::vector<std::size_t> rows;
  std::vector<int> labels;  // +1 / -1

  std::size_t positives() const;
  std::size_t negatives() const { return labels.size() - positives(); }
};

BinaryDataset label_view(std::span<const LyricRecord> records, std::string_view genre,
                         const GenreSelection& selection);
/// Same, without checking membership in a selection.
BinaryDataset label_view(std::span<const LyricRecord> records, std::string_view genre);

}  // namespace lyricgenre
