#include "lyricgenre/bow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "json.hpp"
#include "lyricgenre/error.hpp"
#include "lyricgenre/text.hpp"

namespace lyricgenre {

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t length = 0;
  auto flush = [&] {
    if (length >= 2) tokens.push_back(std::move(current));
    current.clear();
    length = 0;
  };
  for (char32_t cp : text::decode_utf8(input)) {
    if (text::is_letter(cp)) {
      text::append_utf8(current, text::fold_case(cp));
      ++length;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

const std::set<std::string>& default_musical_terms() {
  static const std::set<std::string> terms = {
      "chorus", "intro", "outro", "verse", "bridge", "refrain",
      "solo",   "repeat", "bis",  "refr\xC3\xA3o", "instrumental",
  };
  return terms;
}

std::set<std::string> load_term_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string term = text::fold_case(text::trim(line));
    if (!term.empty()) terms.insert(term);
  }
  return terms;
}

void BowConfig::validate() const {
  if (!(min_df >= 0.0 && max_df <= 1.0 && min_df < max_df)) {
    throw UsageError("document frequency thresholds need 0 <= min_df < max_df <= 1");
  }
}

std::vector<double> TfidfVocabulary::idf_by_column() const {
  std::vector<double> out(terms.size());
  for (const auto& [term, col] : terms) out[col] = idf.at(term);
  return out;
}

TfidfVocabulary fit_vocabulary(std::span<const std::string> docs, const BowConfig& config) {
  config.validate();
  if (docs.empty()) throw DataError("cannot fit a vocabulary on zero documents");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    auto tokens = tokenize(doc);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[std::move(t)];
  }

  TfidfVocabulary vocab;
  vocab.n_docs = docs.size();
  vocab.min_df = config.min_df;
  vocab.max_df = config.max_df;
  const double n = static_cast<double>(docs.size());
  for (const auto& [term, count] : df) {
    const double ratio = static_cast<double>(count) / n;
    if (ratio < config.min_df || ratio > config.max_df) continue;
    if (config.excluded_terms.contains(term) || config.excluded_name_parts.contains(term)) continue;
    vocab.terms.emplace(term, vocab.terms.size());
    vocab.df.emplace(term, count);
    vocab.idf.emplace(term, std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  if (vocab.terms.empty()) {
    throw DataError("vocabulary is empty after document-frequency filtering and exclusions");
  }
  return vocab;
}

SparseDocVector transform(std::string_view doc, const TfidfVocabulary& vocabulary) {
  std::map<std::size_t, double> counts;
  for (const auto& t : tokenize(doc)) {
    const auto it = vocabulary.terms.find(t);
    if (it != vocabulary.terms.end()) counts[it->second] += 1.0;
  }
  const auto idf = vocabulary.idf_by_column();
  SparseDocVector out;
  double sq = 0;
  for (const auto& [col, c] : counts) {
    const double w = c * idf[col];
    out.entries.push_back({col, w});
    sq += w * w;
  }
  out.norm = std::sqrt(sq);
  if (out.norm > 0) {
    for (auto& e : out.entries) e.value /= out.norm;
  }
  return out;
}

SparseMatrix transform_all(std::span<const std::string> docs, const TfidfVocabulary& vocabulary) {
  SparseMatrix m(vocabulary.size());
  for (const auto& d : docs) m.append_row(transform(d, vocabulary).entries);
  return m;
}

std::set<std::string> build_exclusions(std::span<const LyricRecord> records, std::size_t common_rank) {
  std::unordered_map<std::string, std::size_t> freq;
  std::set<std::string> name_parts;
  for (const auto& r : records) {
    for (auto& t : tokenize(r.lyrics)) ++freq[std::move(t)];
    for (auto& t : tokenize(r.artist)) name_parts.insert(std::move(t));
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  const std::size_t keep = std::min(common_rank, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  for (std::size_t i = 0; i < keep; ++i) name_parts.erase(ranked[i].first);
  return name_parts;
}

void save_vocabulary(const std::filesystem::path& path, const TfidfVocabulary& vocabulary) {
  nlohmann::json j;
  j["format"] = "lyricgenre-tfidf-vocabulary";
  j["version"] = TfidfVocabulary::kFormatVersion;
  j["n_docs"] = vocabulary.n_docs;
  j["min_df"] = vocabulary.min_df;
  j["max_df"] = vocabulary.max_df;
  auto& rows = j["terms"] = nlohmann::json::array();
  for (const auto& [term, col] : vocabulary.terms) {
    rows.push_back({{"term", term}, {"df", vocabulary.df.at(term)}, {"idf", vocabulary.idf.at(term)},
                    {"index", col}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(1) << '\n';
}

TfidfVocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("version").get<int>() != TfidfVocabulary::kFormatVersion) {
      throw DataError("unsupported vocabulary version");
    }
    TfidfVocabulary v;
    v.n_docs = j.at("n_docs").get<std::size_t>();
    v.min_df = j.at("min_df").get<double>();
    v.max_df = j.at("max_df").get<double>();
    for (const auto& row : j.at("terms")) {
      const auto term = row.at("term").get<std::string>();
      v.terms[term] = row.at("index").get<std::size_t>();
      v.df[term] = row.at("df").get<std::size_t>();
      v.idf[term] = row.at("idf").get<double>();
    }
    std::vector<bool> seen(v.terms.size(), false);
    for (const auto& [term, col] : v.terms) {
      if (col >= seen.size() || seen[col]) throw DataError("vocabulary column indices are not a permutation");
      seen[col] = true;
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed vocabulary: " + e.what());
  }
}

}  // namespace lyricgenre
