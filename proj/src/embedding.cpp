#include "lyricgenre/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lyricgenre/embedding_file.hpp"
#include "lyricgenre/error.hpp"
#include "lyricgenre/parallel.hpp"
#include "lyricgenre/random.hpp"
#include "lyricgenre/text.hpp"

namespace lyricgenre {

namespace {

bool is_break(char32_t cp) { return cp == U'\n' || cp == U'\r' || cp == 0x2028 || cp == 0x2029; }

bool is_terminal(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == U';' || cp == U':';
}

std::vector<std::string> whitespace_words(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) words.push_back(std::move(w));
  return words;
}

std::string join_words(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += words[i];
  }
  return out;
}

void emit_piece(std::u32string& piece, std::size_t budget, const TokenCounter& count,
                std::vector<SentenceChunk>& out) {
  std::string chunk = text::collapse_whitespace(text::encode_utf8(piece));
  piece.clear();
  bool has_word = false;
  for (char32_t cp : text::decode_utf8(chunk)) has_word = has_word || text::is_word_char(cp);
  if (!has_word) return;

  const std::size_t tokens = count(chunk);
  if (tokens <= budget) {
    out.push_back({std::move(chunk), tokens});
    return;
  }
  const auto words = whitespace_words(chunk);
  std::size_t begin = 0;
  while (begin < words.size()) {
    std::size_t end = begin + 1;
    std::string best = words[begin];
    std::size_t best_tokens = count(best);
    while (end < words.size()) {
      std::string candidate = join_words(words, begin, end + 1);
      const std::size_t t = count(candidate);
      if (t > budget) break;
      best = std::move(candidate);
      best_tokens = t;
      ++end;
    }
    out.push_back({std::move(best), best_tokens});
    begin = end;
  }
}

class MockProvider final : public EmbeddingProvider {
 public:
  MockProvider(std::uint64_t seed, std::size_t dimension) : seed_(seed), dimension_(dimension) {}

  std::size_t dimension() const override { return dimension_; }
  bool bounded() const override { return true; }
  std::string tag() const override {
    return "mock:" + std::to_string(seed_) + ":" + std::to_string(dimension_);
  }
  std::vector<float> embed(std::string_view sentence) const override {
    std::uint64_t state = SeedHasher(seed_).add(sentence).value();
    std::vector<float> v(dimension_);
    for (auto& x : v) {
      state = splitmix64(state);
      // 24 random bits -> exactly representable floats in [-1, 1)
      x = static_cast<float>(static_cast<double>(state >> 40) * 0x1.0p-23 - 1.0);
    }
    return v;
  }

 private:
  std::uint64_t seed_;
  std::size_t dimension_;
};

class NormalizingProvider final : public EmbeddingProvider {
 public:
  explicit NormalizingProvider(ProviderPtr inner) : inner_(std::move(inner)) {}

  std::size_t dimension() const override { return inner_->dimension(); }
  bool bounded() const override { return true; }
  std::string tag() const override { return inner_->tag() + "+l2"; }
  std::size_t count_tokens(std::string_view s) const override { return inner_->count_tokens(s); }
  std::vector<float> embed(std::string_view sentence) const override {
    return normalize(inner_->embed(sentence));
  }
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> sentences) const override {
    auto rows = inner_->embed_batch(sentences);
    for (auto& r : rows) r = normalize(std::move(r));
    return rows;
  }

 private:
  static std::vector<float> normalize(std::vector<float> v) {
    double sq = 0;
    for (float x : v) sq += static_cast<double>(x) * x;
    if (!std::isfinite(sq)) throw DataError("provider returned a non-finite embedding");
    if (sq > 0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& x : v) x = static_cast<float>(std::clamp(x * inv, -1.0, 1.0));
    }
    return v;
  }

  ProviderPtr inner_;
};

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(std::string(s), &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
}

}  // namespace

std::size_t approx_token_count(std::string_view chunk) {
  const std::size_t words = whitespace_words(chunk).size();
  return (13 * words + 9) / 10;
}

std::size_t word_token_count(std::string_view chunk) { return whitespace_words(chunk).size(); }

std::vector<SentenceChunk> segment(std::string_view input, std::size_t token_budget,
                                   const TokenCounter& count_tokens) {
  if (token_budget < 1) throw UsageError("token budget must be at least 1");
  std::vector<SentenceChunk> out;
  const std::u32string cps = text::decode_utf8(input);
  std::u32string piece;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (is_break(cp)) {
      emit_piece(piece, token_budget, count_tokens, out);
    } else if (is_terminal(cp)) {
      piece.push_back(cp);
      while (i + 1 < cps.size() && is_terminal(cps[i + 1])) piece.push_back(cps[++i]);
      emit_piece(piece, token_budget, count_tokens, out);
    } else {
      piece.push_back(cp);
    }
  }
  emit_piece(piece, token_budget, count_tokens, out);
  return out;
}

std::vector<float> pool(std::span<const std::vector<float>> sentence_embeddings) {
  if (sentence_embeddings.empty()) throw DataError("cannot pool an empty list of embeddings");
  const std::size_t d = sentence_embeddings.front().size();
  std::vector<double> sum(d, 0.0);
  for (const auto& v : sentence_embeddings) {
    if (v.size() != d) {
      throw DataError("embedding dimension mismatch in pooling: " + std::to_string(v.size()) + " vs " +
                      std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) sum[j] += v[j];
  }
  std::vector<float> mean(d);
  const double n = static_cast<double>(sentence_embeddings.size());
  for (std::size_t j = 0; j < d; ++j) mean[j] = static_cast<float>(sum[j] / n);
  return mean;
}

std::vector<std::vector<float>> EmbeddingProvider::embed_batch(std::span<const std::string> sentences) const {
  std::vector<std::vector<float>> rows;
  rows.reserve(sentences.size());
  for (const auto& s : sentences) rows.push_back(embed(s));
  return rows;
}

ProviderPtr mock_provider(std::uint64_t seed, std::size_t dimension) {
  if (dimension < 1) throw UsageError("embedding dimension must be at least 1");
  return std::make_shared<MockProvider>(seed, dimension);
}

ProviderPtr ensure_bounded(ProviderPtr provider) {
  if (provider->bounded()) return provider;
  return std::make_shared<NormalizingProvider>(std::move(provider));
}

std::optional<SongEmbedding> embed_song(const EmbeddingProvider& provider, const LyricRecord& record,
                                        std::size_t token_budget) {
  const auto chunks = segment(record.lyrics, token_budget,
                              [&](std::string_view s) { return provider.count_tokens(s); });
  if (chunks.empty()) return std::nullopt;
  std::vector<std::string> sentences;
  sentences.reserve(chunks.size());
  for (const auto& c : chunks) sentences.push_back(c.text);
  const auto rows = provider.embed_batch(sentences);
  if (rows.size() != sentences.size()) {
    throw DataError("provider '" + provider.tag() + "' returned " + std::to_string(rows.size()) +
                    " vectors for " + std::to_string(sentences.size()) + " sentences");
  }
  for (const auto& r : rows) {
    if (r.size() != provider.dimension()) {
      throw DataError("provider '" + provider.tag() + "' returned dimension " + std::to_string(r.size()) +
                      ", declared " + std::to_string(provider.dimension()));
    }
    if (provider.bounded()) {
      for (float x : r) {
        if (!(x >= -1.0f && x <= 1.0f)) {
          throw DataError("provider contract violated: '" + provider.tag() + "' is bounded but emitted " +
                          std::to_string(x) + " for record '" + record.id + "'");
        }
      }
    }
  }
  return SongEmbedding{record.id, pool(rows), provider.tag()};
}

std::optional<SongEmbedding> PrecomputedEmbedder::embed(const LyricRecord& record) const {
  const auto it = table_.find(record.id);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::unique_ptr<SongEmbedder> make_song_embedder(std::string_view selection, std::size_t token_budget) {
  const auto colon = selection.find(':');
  if (colon == std::string_view::npos) {
    throw UsageError("provider must be mock:<seed>[:<dim>], file:<path> or extern:<url>, got '" +
                     std::string(selection) + "'");
  }
  const std::string_view kind = selection.substr(0, colon);
  const std::string_view rest = selection.substr(colon + 1);
  if (kind == "mock") {
    const auto sep = rest.find(':');
    const auto seed = parse_u64(rest.substr(0, sep), "mock seed");
    const std::size_t dim = sep == std::string_view::npos ? kDefaultEmbeddingDimension
                                                          : parse_u64(rest.substr(sep + 1), "mock dimension");
    return std::make_unique<PooledEmbedder>(mock_provider(seed, dim), token_budget);
  }
  if (kind == "file") {
    auto table = load_embedding_file(std::string(rest));
    return std::make_unique<PrecomputedEmbedder>(std::move(table.by_id), table.dimension,
                                                 "file:" + std::string(rest));
  }
  if (kind == "extern") {
    return std::make_unique<PooledEmbedder>(extern_provider(rest), token_budget);
  }
  throw UsageError("unknown provider kind '" + std::string(kind) + "'");
}

EmbeddedCorpus embed_corpus(const SongEmbedder& embedder, std::span<const LyricRecord> records,
                            unsigned jobs) {
  std::vector<std::optional<SongEmbedding>> slots(records.size());
  parallel_for(records.size(), jobs, [&](std::size_t i) { slots[i] = embedder.embed(records[i]); });
  EmbeddedCorpus out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (slots[i]) {
      if (slots[i]->values.size() != embedder.dimension()) {
        throw DataError("embedding for '" + records[i].id + "' has dimension " +
                        std::to_string(slots[i]->values.size()) + ", expected " +
                        std::to_string(embedder.dimension()));
      }
      out.embeddings.push_back(std::move(*slots[i]));
    } else {
      out.excluded.push_back(records[i].id);
    }
  }
  return out;
}

void CentroidTransform::apply(std::span<double> x) const {
  if (x.size() != mean.size()) throw DataError("centroid dimension mismatch");
  for (std::size_t j = 0; j < x.size(); ++j) x[j] -= mean[j];
}

void CentroidTransform::apply(DenseMatrix& m) const {
  for (std::size_t i = 0; i < m.rows(); ++i) apply(m.row(i));
}

CentroidTransform compute_centroid(const DenseMatrix& points, CentroidSource source) {
  if (points.rows() == 0) throw DataError("cannot compute the centroid of an empty set");
  CentroidTransform t;
  t.source = source;
  t.mean.assign(points.cols(), 0.0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto r = points.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) t.mean[j] += r[j];
  }
  for (auto& m : t.mean) m /= static_cast<double>(points.rows());
  return t;
}

DenseMatrix to_matrix(std::span<const SongEmbedding> embeddings) {
  DenseMatrix m;
  for (const auto& e : embeddings) m.append_row(std::span<const float>(e.values));
  return m;
}

CenteredSet centralize(DenseMatrix points, CentroidSource source) {
  CenteredSet out{std::move(points), {}};
  out.transform = compute_centroid(out.points, source);
  out.transform.apply(out.points);
  return out;
}

CenteredSet centralize(std::span<const SongEmbedding> embeddings, CentroidSource source) {
  return centralize(to_matrix(embeddings), source);
}

}  // namespace lyricgenre
