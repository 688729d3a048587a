#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyricgenre/corpus.hpp"
#include "lyricgenre/features.hpp"

namespace lyricgenre {

/// Case-folded runs of letters; tokens shorter than two characters are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Default list of transcription artifacts (chorus, intro, ...).
const std::set<std::string>& default_musical_terms();

/// One term per line, '#' starts a comment. Terms are case-folded.
std::set<std::string> load_term_list(const std::filesystem::path& path);

struct BowConfig {
  double min_df = 0.01;
  double max_df = 0.3;
  std::set<std::string> excluded_terms = default_musical_terms();
  std::set<std::string> excluded_name_parts;

  void validate() const;
};

struct TfidfVocabulary {
  static constexpr int kFormatVersion = 1;

  /// term -> column; columns follow the byte order of the terms
  std::map<std::string, std::size_t> terms;
  std::map<std::string, std::size_t> df;
  std::map<std::string, double> idf;
  std::size_t n_docs = 0;
  double min_df = 0.0;
  double max_df = 1.0;

  std::size_t size() const { return terms.size(); }
  /// idf indexed by column
  std::vector<double> idf_by_column() const;
};

/// df counts documents containing a term. Terms are retained when
/// min_df <= df/n <= max_df and they are in neither exclusion set;
/// idf = ln((1 + n) / (1 + df)) + 1. Throws DataError when nothing survives.
TfidfVocabulary fit_vocabulary(std::span<const std::string> docs, const BowConfig& config);

struct SparseDocVector {
  std::vector<SparseEntry> entries;
  /// L2 length before normalization
  double norm = 0.0;
};

/// raw count x idf, L2-normalized; out-of-vocabulary terms are ignored.
SparseDocVector transform(std::string_view doc, const TfidfVocabulary& vocabulary);
SparseMatrix transform_all(std::span<const std::string> docs, const TfidfVocabulary& vocabulary);

/// Tokens of artist names, minus the `common_rank` most frequent lyric tokens.
std::set<std::string> build_exclusions(std::span<const LyricRecord> records, std::size_t common_rank = 1000);

void save_vocabulary(const std::filesystem::path& path, const TfidfVocabulary& vocabulary);
TfidfVocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace lyricgenre
