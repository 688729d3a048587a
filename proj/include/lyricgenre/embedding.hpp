#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyricgenre/corpus.hpp"
#include "lyricgenre/features.hpp"

namespace lyricgenre {

inline constexpr std::size_t kDefaultTokenBudget = 128;
inline constexpr std::size_t kDefaultEmbeddingDimension = 768;

struct SentenceChunk {
  std::string text;
  std::size_t approx_tokens = 0;

  friend bool operator==(const SentenceChunk&, const SentenceChunk&) = default;
};

using TokenCounter = std::function<std::size_t(std::string_view)>;

/// ceil(1.3 * whitespace-delimited words).
std::size_t approx_token_count(std::string_view chunk);
/// One token per whitespace-delimited word.
std::size_t word_token_count(std::string_view chunk);

/// Splits lyrics into sentence chunks.
///
/// Pieces end at line breaks (dropped) and after runs of . ! ? ; : (kept with
/// the preceding text). Whitespace inside a piece collapses to single spaces
/// and pieces without any letter or digit are dropped. A piece whose token
/// count exceeds the budget is cut at word boundaries into greedy maximal
/// runs that fit; a single word over budget becomes a chunk of its own.
std::vector<SentenceChunk> segment(std::string_view text, std::size_t token_budget,
                                   const TokenCounter& count_tokens = approx_token_count);

/// Component-wise mean, accumulated in double.
std::vector<float> pool(std::span<const std::vector<float>> sentence_embeddings);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;
  /// True when every component is guaranteed to lie in [-1, 1].
  virtual bool bounded() const = 0;
  virtual std::string tag() const = 0;
  virtual std::vector<float> embed(std::string_view sentence) const = 0;
  virtual std::vector<std::vector<float>> embed_batch(std::span<const std::string> sentences) const;
  virtual std::size_t count_tokens(std::string_view sentence) const { return approx_token_count(sentence); }
};

using ProviderPtr = std::shared_ptr<const EmbeddingProvider>;

/// Seeded hash of the sentence text expanded into [-1, 1]^d. Thread-safe.
ProviderPtr mock_provider(std::uint64_t seed, std::size_t dimension = kDefaultEmbeddingDimension);

/// Adapter for an external inference service. Sentences are POSTed one per
/// line; the response carries one space-separated float row per sentence.
/// The dimension is probed with a single request at construction.
ProviderPtr extern_provider(std::string_view endpoint);

/// Returns bounded providers unchanged; wraps the rest with per-sentence L2
/// normalization.
ProviderPtr ensure_bounded(ProviderPtr provider);

struct SongEmbedding {
  std::string record_id;
  std::vector<float> values;
  std::string provider_tag;
};

/// Mean of provider embeddings over segment(lyrics). Returns nullopt when the
/// lyric has no embeddable chunk. Throws DataError when a bounded provider
/// emits a component outside [-1, 1] or the wrong dimension.
std::optional<SongEmbedding> embed_song(const EmbeddingProvider& provider, const LyricRecord& record,
                                        std::size_t token_budget = kDefaultTokenBudget);

/// Song-level source of embeddings: either pooled sentence embeddings from a
/// provider, or vectors loaded from an embedding file.
class SongEmbedder {
 public:
  virtual ~SongEmbedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::string tag() const = 0;
  virtual std::optional<SongEmbedding> embed(const LyricRecord& record) const = 0;
};

class PooledEmbedder final : public SongEmbedder {
 public:
  PooledEmbedder(ProviderPtr provider, std::size_t token_budget = kDefaultTokenBudget)
      : provider_(ensure_bounded(std::move(provider))), budget_(token_budget) {}

  std::size_t dimension() const override { return provider_->dimension(); }
  std::string tag() const override { return provider_->tag(); }
  std::optional<SongEmbedding> embed(const LyricRecord& record) const override {
    return embed_song(*provider_, record, budget_);
  }

 private:
  ProviderPtr provider_;
  std::size_t budget_;
};

class PrecomputedEmbedder final : public SongEmbedder {
 public:
  PrecomputedEmbedder(std::map<std::string, SongEmbedding> table, std::size_t dimension, std::string tag)
      : table_(std::move(table)), dimension_(dimension), tag_(std::move(tag)) {}

  std::size_t dimension() const override { return dimension_; }
  std::string tag() const override { return tag_; }
  std::optional<SongEmbedding> embed(const LyricRecord& record) const override;

 private:
  std::map<std::string, SongEmbedding> table_;
  std::size_t dimension_;
  std::string tag_;
};

/// Parses `mock:<seed>[:<dim>]`, `file:<path>` or `extern:<url>`.
std::unique_ptr<SongEmbedder> make_song_embedder(std::string_view selection,
                                                 std::size_t token_budget = kDefaultTokenBudget);

struct EmbeddedCorpus {
  /// in record order, failures omitted
  std::vector<SongEmbedding> embeddings;
  /// ids of records without an embeddable chunk
  std::vector<std::string> excluded;
};

EmbeddedCorpus embed_corpus(const SongEmbedder& embedder, std::span<const LyricRecord> records,
                            unsigned jobs = 1);

enum class CentroidSource { train_set, test_corpus };

struct CentroidTransform {
  std::vector<double> mean;
  CentroidSource source = CentroidSource::train_set;

  void apply(std::span<double> x) const;
  void apply(DenseMatrix& m) const;
};

CentroidTransform compute_centroid(const DenseMatrix& points, CentroidSource source);

struct CenteredSet {
  DenseMatrix points;
  CentroidTransform transform;
};

/// Subtracts the set's own mean from every element.
CenteredSet centralize(std::span<const SongEmbedding> embeddings,
                       CentroidSource source = CentroidSource::train_set);
CenteredSet centralize(DenseMatrix points, CentroidSource source = CentroidSource::train_set);

DenseMatrix to_matrix(std::span<const SongEmbedding> embeddings);

}  // namespace lyricgenre
