#include "lyricgenre/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lyricgenre/error.hpp"
#include "lyricgenre/parallel.hpp"
#include "lyricgenre/random.hpp"

namespace lyricgenre {

const char* to_string(Representation r) { return r == Representation::embedding ? "embedding" : "bow"; }

Representation parse_representation(std::string_view s) {
  if (s == "embedding") return Representation::embedding;
  if (s == "bow") return Representation::bow;
  throw UsageError("representation must be 'embedding' or 'bow', got '" + std::string(s) + "'");
}

const char* to_string(TestCentering c) { return c == TestCentering::full_corpus ? "full-corpus" : "sampled-set"; }

TestCentering parse_test_centering(std::string_view s) {
  if (s == "full-corpus") return TestCentering::full_corpus;
  if (s == "sampled-set") return TestCentering::sampled_set;
  throw UsageError("test centering source must be 'full-corpus' or 'sampled-set', got '" + std::string(s) + "'");
}

EvalCorpus::EvalCorpus(std::span<const LyricRecord> records) { add_records(records); }

void EvalCorpus::add_records(std::span<const LyricRecord> records) {
  for (const auto& r : records) variants_[variant_tag(r)].all.push_back(r);
}

std::vector<std::string> EvalCorpus::attach_embeddings(const SongEmbedder& embedder, unsigned jobs) {
  std::vector<std::string> excluded;
  for (auto& [tag, v] : variants_) {
    std::map<std::string, SongEmbedding> table;
    auto batch = embed_corpus(embedder, v.all, jobs);
    for (auto& e : batch.embeddings) {
      std::string id = e.record_id;
      table.emplace(std::move(id), std::move(e));
    }
    auto missing = attach_embeddings(tag, table);
    excluded.insert(excluded.end(), missing.begin(), missing.end());
  }
  return excluded;
}

std::vector<std::string> EvalCorpus::attach_embeddings(const std::string& tag,
                                                       const std::map<std::string, SongEmbedding>& table) {
  const auto it = variants_.find(tag);
  if (it == variants_.end()) throw UsageError("no records for language variant '" + tag + "'");
  Variant& v = it->second;
  v.embedded.clear();
  v.vectors = DenseMatrix();
  v.centroid.reset();
  std::vector<std::string> missing;
  for (const auto& r : v.all) {
    const auto e = table.find(r.id);
    if (e == table.end()) {
      missing.push_back(r.id);
      continue;
    }
    if (dimension_ == 0) dimension_ = e->second.values.size();
    if (e->second.values.size() != dimension_) {
      throw DataError("embedding for '" + r.id + "' has dimension " + std::to_string(e->second.values.size()) +
                      ", expected " + std::to_string(dimension_));
    }
    v.embedded.push_back(r);
    v.vectors.append_row(std::span<const float>(e->second.values));
  }
  if (v.vectors.rows() > 0) v.centroid = compute_centroid(v.vectors, CentroidSource::test_corpus);
  return missing;
}

bool EvalCorpus::has_variant(const std::string& tag) const { return variants_.contains(tag); }

std::vector<std::string> EvalCorpus::variants() const {
  std::vector<std::string> tags;
  for (const auto& [tag, v] : variants_) tags.push_back(tag);
  std::sort(tags.begin(), tags.end(), variant_tag_less);
  return tags;
}

const EvalCorpus::Variant& EvalCorpus::variant(const std::string& tag) const {
  const auto it = variants_.find(tag);
  if (it == variants_.end()) throw DataError("corpus has no records for language variant '" + tag + "'");
  return it->second;
}

const std::vector<LyricRecord>& EvalCorpus::records(const std::string& tag, Representation r) const {
  const Variant& v = variant(tag);
  return r == Representation::bow ? v.all : v.embedded;
}

const DenseMatrix& EvalCorpus::embeddings(const std::string& tag) const { return variant(tag).vectors; }

const CentroidTransform& EvalCorpus::corpus_centroid(const std::string& tag) const {
  const Variant& v = variant(tag);
  if (!v.centroid) throw DataError("no embeddings attached for language variant '" + tag + "'");
  return *v.centroid;
}

Split split_80_20(std::size_t n, std::uint64_t seed) {
  if (n < 5) throw DataError("80/20 split needs at least 5 records, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const std::size_t n_train = n * 4 / 5;
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

Resample balanced_resample(std::span<const int> labels, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw DataError("balanced resample needs both classes (got " + std::to_string(pos.size()) + " positive, " +
                    std::to_string(neg.size()) + " negative)");
  }
  const std::size_t n = std::min(pos.size(), neg.size());
  Rng rng(seed);
  Resample out;
  out.items.reserve(2 * n);
  out.labels.reserve(2 * n);
  for (const auto* cls : {&pos, &neg}) {
    const int label = cls == &pos ? 1 : -1;
    for (std::size_t k = 0; k < n; ++k) {
      out.items.push_back((*cls)[rng.below(cls->size())]);
      out.labels.push_back(label);
    }
  }
  return out;
}

double f1(std::span<const int> truth, std::span<const int> predicted) { return f1_score(truth, predicted); }

std::uint64_t run_seed(const RunSpec& spec, int repeat_index) {
  return SeedHasher(spec.master_seed)
      .add(static_cast<std::uint64_t>(repeat_index))
      .add(genre_key(spec.genre))
      .add(spec.train_language)
      .add(spec.test_language)
      .value();
}

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::string_view purpose) { return SeedHasher(seed).add(purpose).value(); }

std::vector<int> genre_labels(const std::vector<LyricRecord>& records, std::span<const std::size_t> rows,
                              const std::string& key) {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (auto i : rows) labels.push_back(records[i].has_genre_key(key) ? 1 : -1);
  return labels;
}

std::vector<std::size_t> pick(std::span<const std::size_t> pool, std::span<const std::size_t> positions) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(pool[p]);
  return out;
}

RunOutcome run_once_impl(const RunSpec& spec, int repeat_index, const EvalCorpus& corpus,
                         const EvalSettings& settings) {
  if (spec.centralized && spec.representation == Representation::bow) {
    throw UsageError("centralization applies to the embedding representation only");
  }
  const std::uint64_t seed = run_seed(spec, repeat_index);
  const auto& train_records = corpus.records(spec.train_language, spec.representation);
  const auto& test_records = corpus.records(spec.test_language, spec.representation);
  const bool same_variant = spec.train_language == spec.test_language;

  // step 1: per-language 80/20 split
  std::vector<std::size_t> train_pool, test_pool;
  if (same_variant) {
    auto s = split_80_20(train_records.size(), sub_seed(seed, "split"));
    train_pool = std::move(s.train);
    test_pool = std::move(s.test);
  } else {
    train_pool = split_80_20(train_records.size(), sub_seed(seed, "split-train")).train;
    test_pool = split_80_20(test_records.size(), sub_seed(seed, "split-test")).test;
  }

  // step 2: balanced resampling with replacement
  const std::string key = genre_key(spec.genre);
  RunOutcome out;
  {
    const auto labels = genre_labels(train_records, train_pool, key);
    const auto rs = balanced_resample(labels, sub_seed(seed, "resample-train"));
    out.train_sample = pick(train_pool, rs.items);
    out.train_labels = rs.labels;
  }
  if (!spec.allow_source_overlap) {
    std::set<std::string> train_sources;
    for (auto i : out.train_sample) train_sources.insert(train_records[i].source_id);
    const auto before = test_pool.size();
    std::erase_if(test_pool, [&](std::size_t i) { return train_sources.contains(test_records[i].source_id); });
    out.test_candidates_removed = before - test_pool.size();
  }
  {
    const auto labels = genre_labels(test_records, test_pool, key);
    const auto rs = balanced_resample(labels, sub_seed(seed, "resample-test"));
    out.test_sample = pick(test_pool, rs.items);
    out.test_labels = rs.labels;
  }

  // representation
  std::unique_ptr<FeatureSet> train_x, test_x;
  if (spec.representation == Representation::embedding) {
    auto train_m = corpus.embeddings(spec.train_language).select_rows(out.train_sample);
    auto test_m = corpus.embeddings(spec.test_language).select_rows(out.test_sample);
    if (spec.centralized) {
      train_m = centralize(std::move(train_m), CentroidSource::train_set).points;
      if (spec.test_centering_source == TestCentering::full_corpus) {
        corpus.corpus_centroid(spec.test_language).apply(test_m);
      } else {
        test_m = centralize(std::move(test_m), CentroidSource::test_corpus).points;
      }
    }
    train_x = std::make_unique<DenseMatrix>(std::move(train_m));
    test_x = std::make_unique<DenseMatrix>(std::move(test_m));
  } else {
    std::vector<LyricRecord> sample_records;
    std::vector<std::string> train_docs, test_docs;
    for (auto i : out.train_sample) {
      sample_records.push_back(train_records[i]);
      train_docs.push_back(train_records[i].lyrics);
    }
    for (auto i : out.test_sample) test_docs.push_back(test_records[i].lyrics);
    BowConfig bow = settings.bow;
    bow.excluded_name_parts = build_exclusions(sample_records);
    const auto vocab = fit_vocabulary(train_docs, bow);
    train_x = std::make_unique<SparseMatrix>(transform_all(train_docs, vocab));
    test_x = std::make_unique<SparseMatrix>(transform_all(test_docs, vocab));
  }

  // steps 4-5: C selection, final fit, test F1
  TrainConfig svm = settings.svm;
  svm.seed = sub_seed(seed, "svm");
  svm.jobs = 1;
  const CvReport cv = cv_select_c(*train_x, out.train_labels, svm);
  const LinearModel model = train_binary(*train_x, out.train_labels, cv.chosen_c, svm);
  out.chosen_c = cv.chosen_c;
  out.test_predictions = predict_all(model, *test_x);
  out.f1 = f1(out.test_labels, out.test_predictions);
  return out;
}

std::string describe(const RunSpec& spec, int repeat_index) {
  return "run genre='" + spec.genre + "' train=" + spec.train_language + " test=" + spec.test_language +
         " representation=" + to_string(spec.representation) +
         " centralized=" + (spec.centralized ? "true" : "false") + " repeat=" + std::to_string(repeat_index);
}

}  // namespace

RunOutcome run_once(const RunSpec& spec, int repeat_index, const EvalCorpus& corpus, const EvalSettings& settings) {
  try {
    return run_once_impl(spec, repeat_index, corpus, settings);
  } catch (const Error& e) {
    rethrow_with_context(e, describe(spec, repeat_index));
  }
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

BootstrapResult bootstrap(const RunSpec& spec, const EvalCorpus& corpus, const EvalSettings& settings) {
  const RunSpec specs[] = {spec};
  return run_bootstraps(specs, corpus, settings, 1).front();
}

std::vector<BootstrapResult> run_bootstraps(std::span<const RunSpec> specs, const EvalCorpus& corpus,
                                            const EvalSettings& settings, unsigned jobs) {
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    if (specs[s].repeats < 1) throw UsageError("repeats must be at least 1");
    for (int r = 0; r < specs[s].repeats; ++r) tasks.emplace_back(s, r);
  }
  std::vector<double> f1_values(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    f1_values[t] = run_once(specs[tasks[t].first], tasks[t].second, corpus, settings).f1;
  });

  std::vector<BootstrapResult> results;
  results.reserve(specs.size());
  std::size_t t = 0;
  for (const auto& spec : specs) {
    BootstrapResult res;
    res.spec = spec;
    res.f1_values.assign(f1_values.begin() + static_cast<std::ptrdiff_t>(t),
                         f1_values.begin() + static_cast<std::ptrdiff_t>(t + spec.repeats));
    t += spec.repeats;
    const auto s = summarize(res.f1_values);
    res.mean = s.mean;
    res.std = s.std;
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace lyricgenre
