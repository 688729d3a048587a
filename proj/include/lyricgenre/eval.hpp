#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyricgenre/bow.hpp"
#include "lyricgenre/corpus.hpp"
#include "lyricgenre/embedding.hpp"
#include "lyricgenre/metrics.hpp"
#include "lyricgenre/svm.hpp"

namespace lyricgenre {

enum class Representation { embedding, bow };
enum class TestCentering { full_corpus, sampled_set };

const char* to_string(Representation r);
Representation parse_representation(std::string_view s);
const char* to_string(TestCentering c);
TestCentering parse_test_centering(std::string_view s);

struct RunSpec {
  std::string genre;
  /// canonical variant tags, e.g. "PT", "EN<-PT"
  std::string train_language;
  std::string test_language;
  Representation representation = Representation::embedding;
  bool centralized = false;
  int repeats = 10;
  std::uint64_t master_seed = 0;
  TestCentering test_centering_source = TestCentering::full_corpus;
  bool allow_source_overlap = false;
};

/// Labeled records grouped by variant tag, with song embeddings attached for
/// the embedding representation.
class EvalCorpus {
 public:
  EvalCorpus() = default;
  /// Groups records by variant_tag().
  explicit EvalCorpus(std::span<const LyricRecord> records);

  void add_records(std::span<const LyricRecord> records);

  /// Embeds every record of every variant. Records that cannot be embedded
  /// are dropped from embedding runs and returned.
  std::vector<std::string> attach_embeddings(const SongEmbedder& embedder, unsigned jobs = 1);
  /// Embeddings for one variant, keyed by record id.
  std::vector<std::string> attach_embeddings(const std::string& tag, const std::map<std::string, SongEmbedding>& table);

  bool has_variant(const std::string& tag) const;
  std::vector<std::string> variants() const;
  std::size_t dimension() const { return dimension_; }

  /// Records usable for a representation: all of them for bow, only the
  /// embedded ones otherwise.
  const std::vector<LyricRecord>& records(const std::string& tag, Representation r) const;
  /// Embedding rows aligned with records(tag, Representation::embedding).
  const DenseMatrix& embeddings(const std::string& tag) const;
  /// Mean embedding of the whole variant corpus.
  const CentroidTransform& corpus_centroid(const std::string& tag) const;

 private:
  struct Variant {
    std::vector<LyricRecord> all;
    std::vector<LyricRecord> embedded;
    DenseMatrix vectors;
    std::optional<CentroidTransform> centroid;
  };
  const Variant& variant(const std::string& tag) const;

  std::map<std::string, Variant> variants_;
  std::size_t dimension_ = 0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Uniform shuffle of [0, n); the first floor(0.8 n) go to train.
Split split_80_20(std::size_t n, std::uint64_t seed);

struct Resample {
  /// positions in the input label span; n positives followed by n negatives
  std::vector<std::size_t> items;
  std::vector<int> labels;
};

/// n = min(#pos, #neg) draws with replacement from each class.
Resample balanced_resample(std::span<const int> labels, std::uint64_t seed);

double f1(std::span<const int> truth, std::span<const int> predicted);

/// hash(master_seed, repeat, genre, train_language, test_language)
std::uint64_t run_seed(const RunSpec& spec, int repeat_index);

struct EvalSettings {
  TrainConfig svm;
  /// base exclusion lists; artist-name parts are rebuilt from each train sample
  BowConfig bow;
};

struct RunOutcome {
  double f1 = 0.0;
  double chosen_c = 0.0;
  /// indices into records(train_language) / records(test_language)
  std::vector<std::size_t> train_sample;
  std::vector<int> train_labels;
  std::vector<std::size_t> test_sample;
  std::vector<int> test_labels;
  std::vector<int> test_predictions;
  std::size_t test_candidates_removed = 0;
};

/// One pass of the protocol: split, balanced resample, features (with
/// optional centering), C selection, final fit, test F1.
RunOutcome run_once(const RunSpec& spec, int repeat_index, const EvalCorpus& corpus,
                    const EvalSettings& settings = {});

struct BootstrapResult {
  RunSpec spec;
  std::vector<double> f1_values;
  double mean = 0.0;
  /// sample standard deviation (n - 1); 0 for a single value
  double std = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};
Summary summarize(std::span<const double> values);

BootstrapResult bootstrap(const RunSpec& spec, const EvalCorpus& corpus, const EvalSettings& settings = {});

/// Runs every (spec, repeat) pair on up to `jobs` threads. Output order
/// follows `specs` and does not depend on `jobs`.
std::vector<BootstrapResult> run_bootstraps(std::span<const RunSpec> specs, const EvalCorpus& corpus,
                                            const EvalSettings& settings = {}, unsigned jobs = 1);

}  // namespace lyricgenre
