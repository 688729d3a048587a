// lyricgenre: command-line frontend. Every stage reads and writes files so
// the expensive embedding step can be cached and swapped.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lyricgenre/bow.hpp"
#include "lyricgenre/corpus.hpp"
#include "lyricgenre/embedding.hpp"
#include "lyricgenre/embedding_file.hpp"
#include "lyricgenre/error.hpp"
#include "lyricgenre/eval.hpp"
#include "lyricgenre/language.hpp"
#include "lyricgenre/model_io.hpp"
#include "lyricgenre/random.hpp"
#include "lyricgenre/report.hpp"
#include "lyricgenre/run_config.hpp"
#include "lyricgenre/svm.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lyricgenre;

namespace {

int verbosity = 1;

void note(const std::string& msg) {
  if (verbosity > 0) std::cerr << msg << '\n';
}

void debug(const std::string& msg) {
  if (verbosity > 1) std::cerr << msg << '\n';
}

// The resolved configuration goes next to the primary output as
// <output>.config.json (or <dir>/<command>.config.json for directories).
void log_config(const fs::path& output, const std::string& command, json config) {
  config["command"] = command;
  fs::path target;
  if (fs::is_directory(output)) {
    target = output / (command + ".config.json");
  } else {
    target = output;
    target += ".config.json";
  }
  std::ofstream out(target, std::ios::binary);
  if (!out) throw DataError("cannot write '" + target.string() + "'");
  out << config.dump(2) << '\n';
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<LyricRecord> read_corpora(const std::vector<std::string>& paths) {
  std::vector<LyricRecord> records;
  for (const auto& p : paths) {
    auto part = read_corpus_jsonl(p);
    records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return records;
}

std::vector<LyricRecord> restrict_to_genres(std::vector<LyricRecord> records, const std::vector<std::string>& genres) {
  std::vector<std::string> keys;
  for (const auto& g : genres) keys.push_back(genre_key(g));
  std::erase_if(records, [&](const LyricRecord& r) {
    return std::none_of(keys.begin(), keys.end(), [&](const std::string& k) { return r.has_genre_key(k); });
  });
  return records;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string discarded;
  std::string format = "auto";
  bool strict = true;
  std::string detection = "trigram";
  std::string variant;
  std::string genre_case = "preserve";
  std::string genre_delimiter = ";";
};

int cmd_ingest(const IngestArgs& a) {
  IngestOptions opts;
  opts.strict = a.strict;
  opts.genre_case = a.genre_case == "lower" ? GenreCase::lower : GenreCase::preserve;
  if (a.genre_delimiter.size() != 1) throw UsageError("--genre-delimiter must be a single character");
  opts.genre_delimiter = a.genre_delimiter[0];
  if (!a.variant.empty()) opts.variant = CorpusVariant::parse(a.variant);

  std::vector<LyricRecord> records;
  std::size_t skipped = 0;
  for (const auto& in : a.inputs) {
    const InputFormat fmt = a.format == "auto" ? format_from_path(in)
                            : a.format == "csv" ? InputFormat::csv
                                                : InputFormat::jsonl;
    auto res = ingest(in, fmt, opts);
    for (const auto& e : res.skipped) note(in + ": skipped line " + std::to_string(e.line) + ": " + e.message);
    skipped += res.skipped.size();
    records.insert(records.end(), std::make_move_iterator(res.records.begin()),
                   std::make_move_iterator(res.records.end()));
  }

  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw DataError("duplicate record id '" + r.id + "'");
  }

  if (a.detection == "trigram") {
    const auto& profiles = builtin_profiles();
    for (auto& r : records) {
      try {
        r.detected_language = detect_language(r.lyrics, profiles).language;
      } catch (const DataError&) {
        r.detected_language = "und";
      }
    }
  } else {
    for (const auto& r : records) {
      if (!r.detected_language) {
        throw DataError("record '" + r.id + "' has no detected_language column value (passthrough detection)");
      }
    }
  }

  const auto part = filter_mislabeled(records);
  ensure_parent(a.output);
  write_corpus_jsonl(a.output, part.kept);
  if (!a.discarded.empty()) {
    ensure_parent(a.discarded);
    write_corpus_jsonl(a.discarded, part.discarded);
  }
  std::cout << "kept " << part.kept.size() << ", discarded " << part.discarded.size() << ", skipped rows "
            << skipped << '\n';

  log_config(a.output, "ingest",
             {{"inputs", a.inputs},
              {"output", a.output},
              {"discarded", a.discarded.empty() ? json(nullptr) : json(a.discarded)},
              {"format", a.format},
              {"strict", a.strict},
              {"language_detection", a.detection},
              {"variant", a.variant.empty() ? json("from-input") : json(a.variant)},
              {"genre_case", a.genre_case},
              {"genre_delimiter", a.genre_delimiter}});
  return 0;
}

// --------------------------------------------------------- select-genres

struct SelectArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string discarded;
  std::string table;
  int k = 20;
  bool rank_before_filter = false;
};

int cmd_select_genres(const SelectArgs& a) {
  const auto kept = read_corpora(a.inputs);
  std::vector<LyricRecord> ranking_pool = kept;
  if (a.rank_before_filter) {
    if (a.discarded.empty()) throw UsageError("--rank-before-filter needs --discarded <file>");
    auto d = read_corpus_jsonl(a.discarded);
    ranking_pool.insert(ranking_pool.end(), d.begin(), d.end());
  }
  const auto sel = select_genres(ranking_pool, a.k);
  if (sel.shared.empty()) throw DataError("no genre is in the top " + std::to_string(a.k) + " of every language");
  const auto table = genre_counts(kept, sel);
  const std::string md = render_count_table(table);
  std::cout << md;

  json rows = json::array();
  for (const auto& r : table.rows) {
    json per = json::object();
    for (std::size_t i = 0; i < table.languages.size(); ++i) per[table.languages[i]] = r.per_language[i];
    rows.push_back({{"genre", r.genre}, {"per_language", per}, {"total", r.total}});
  }
  json songs = json::object();
  for (std::size_t i = 0; i < table.languages.size(); ++i) songs[table.languages[i]] = table.songs_per_language[i];
  const json out = {{"k", sel.k},
                    {"per_language_top", sel.per_language_top},
                    {"shared", sel.shared},
                    {"counts", rows},
                    {"songs_per_language", songs},
                    {"songs_total", table.songs_total}};
  ensure_parent(a.output);
  std::ofstream f(a.output, std::ios::binary);
  if (!f) throw DataError("cannot write '" + a.output + "'");
  f << out.dump(2) << '\n';
  if (!a.table.empty()) {
    ensure_parent(a.table);
    std::ofstream t(a.table, std::ios::binary);
    t << md;
  }
  log_config(a.output, "select-genres",
             {{"inputs", a.inputs},
              {"output", a.output},
              {"k", a.k},
              {"rank_before_filter", a.rank_before_filter},
              {"discarded", a.discarded.empty() ? json(nullptr) : json(a.discarded)}});
  return 0;
}

// ------------------------------------------------------------------ embed

struct EmbedArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string provider;
  std::size_t token_budget = kDefaultTokenBudget;
  unsigned jobs = 1;
};

int cmd_embed(const EmbedArgs& a) {
  if (a.provider.rfind("file:", 0) == 0) throw UsageError("embed needs a mock: or extern: provider");
  const auto records = read_corpora(a.inputs);
  const auto embedder = make_song_embedder(a.provider, a.token_budget);
  const auto batch = embed_corpus(*embedder, records, a.jobs);
  for (const auto& id : batch.excluded) debug("no embeddable sentence: " + id);
  ensure_parent(a.output);
  save_embedding_file(a.output, batch.embeddings, embedder->dimension());
  std::cout << "embedded " << batch.embeddings.size() << ", excluded " << batch.excluded.size() << ", dimension "
            << embedder->dimension() << '\n';
  log_config(a.output, "embed",
             {{"inputs", a.inputs},
              {"output", a.output},
              {"provider", a.provider},
              {"provider_tag", embedder->tag()},
              {"token_budget", a.token_budget},
              {"jobs", a.jobs}});
  return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string provider;
  std::string representation = "embedding";
  std::string centering = "none";
  std::string language;
  std::vector<std::string> genres;
  int k = 20;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t token_budget = kDefaultTokenBudget;
  std::vector<double> c_grid = TrainConfig{}.c_grid;
  bool balance = true;
};

int cmd_train(const TrainArgs& a) {
  auto all = read_corpora(a.inputs);
  if (all.empty()) throw DataError("training corpus is empty");
  std::vector<std::string> genres = a.genres;
  if (genres.empty()) genres = select_genres(all, a.k).shared;
  if (genres.empty()) throw DataError("no shared genres to train");

  std::vector<LyricRecord> records;
  if (a.language.empty()) {
    records = std::move(all);
  } else {
    const std::string tag = canonical_variant_tag(a.language);
    for (auto& r : all) {
      if (variant_tag(r) == tag) records.push_back(std::move(r));
    }
    if (records.empty()) throw DataError("no records for language variant '" + tag + "'");
  }
  records = restrict_to_genres(std::move(records), genres);

  const Representation rep = parse_representation(a.representation);
  const bool centralized = a.centering != "none";
  if (centralized && rep == Representation::bow) throw UsageError("--centering applies to embeddings only");

  std::unique_ptr<FeatureSet> features;
  std::optional<CentroidTransform> centroid;
  std::optional<TfidfVocabulary> vocab;
  std::string tag;
  if (rep == Representation::embedding) {
    if (a.provider.empty()) throw UsageError("embedding training needs --provider");
    const auto embedder = make_song_embedder(a.provider, a.token_budget);
    auto batch = embed_corpus(*embedder, records, a.jobs);
    if (!batch.excluded.empty()) {
      note("excluded " + std::to_string(batch.excluded.size()) + " songs without embeddable sentences");
      const std::set<std::string> gone(batch.excluded.begin(), batch.excluded.end());
      std::erase_if(records, [&](const LyricRecord& r) { return gone.contains(r.id); });
    }
    DenseMatrix m = to_matrix(batch.embeddings);
    if (centralized) {
      auto c = centralize(std::move(m), CentroidSource::train_set);
      m = std::move(c.points);
      centroid = c.transform;
    }
    features = std::make_unique<DenseMatrix>(std::move(m));
    tag = a.provider;
  } else {
    std::vector<std::string> docs;
    for (const auto& r : records) docs.push_back(r.lyrics);
    BowConfig cfg;
    cfg.excluded_name_parts = build_exclusions(records);
    vocab = fit_vocabulary(docs, cfg);
    features = std::make_unique<SparseMatrix>(transform_all(docs, *vocab));
    tag = "bow";
  }

  TrainConfig svm;
  svm.seed = a.seed;
  svm.jobs = a.jobs;
  svm.c_grid = a.c_grid;
  std::vector<std::unique_ptr<RowSubset>> views;
  std::vector<GenreTrainingSet> sets;
  for (const auto& g : genres) {
    const auto view = label_view(records, g);
    std::vector<std::size_t> rows = view.rows;
    std::vector<int> labels = view.labels;
    if (a.balance) {
      const auto rs = balanced_resample(view.labels, SeedHasher(a.seed).add("train-resample").add(genre_key(g)).value());
      rows.clear();
      for (auto i : rs.items) rows.push_back(view.rows[i]);
      labels = rs.labels;
    }
    views.push_back(std::make_unique<RowSubset>(*features, rows));
    sets.push_back({g, views.back().get(), labels});
  }
  const auto trained = train_one_vs_all(sets, svm);

  fs::create_directories(a.output);
  for (auto [genre, t] : trained) {
    t.model.representation_tag = tag;
    t.model.centroid = centroid;
    save_model(fs::path(a.output) / model_file_name(genre), t.model);
    std::cout << genre << ": C=" << format_double(t.model.c) << " cv_f1=" << format_double(t.cv.mean_f1(t.model.c))
              << '\n';
  }
  if (vocab) save_vocabulary(fs::path(a.output) / "vocabulary.json", *vocab);

  log_config(a.output, "train",
             {{"inputs", a.inputs},
              {"output", a.output},
              {"provider", a.provider},
              {"representation", a.representation},
              {"centering", a.centering},
              {"language", a.language.empty() ? json("all") : json(a.language)},
              {"genres", genres},
              {"k", a.k},
              {"seed", a.seed},
              {"jobs", a.jobs},
              {"token_budget", a.token_budget},
              {"c_grid", a.c_grid},
              {"folds", svm.folds},
              {"balance", a.balance}});
  return 0;
}

// -------------------------------------------------------------- bootstrap

struct BootstrapArgs {
  std::string config;
  std::vector<std::string> inputs;
  std::string output;
  std::string provider;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::vector<std::string> centering;
  std::vector<std::string> representation;
  std::optional<int> repeats;
  bool allow_source_overlap = false;
};

int cmd_bootstrap(const BootstrapArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : RunConfig::load(a.config);
  for (const auto& in : a.inputs) cfg.corpora.emplace_back(in);
  if (!a.provider.empty()) cfg.provider = a.provider;
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.jobs) cfg.jobs = *a.jobs;
  if (a.repeats) cfg.repeats = *a.repeats;
  if (!a.centering.empty()) cfg.centering = a.centering;
  if (!a.representation.empty()) {
    cfg.representations.clear();
    for (const auto& r : a.representation) cfg.representations.push_back(parse_representation(r));
  }
  if (a.allow_source_overlap) cfg.allow_source_overlap = true;
  if (!a.output.empty()) {
    cfg.results = fs::path(a.output) / "results.csv";
    cfg.aggregated = fs::path(a.output) / "aggregated.csv";
  }
  cfg.validate();

  std::vector<std::string> corpus_paths;
  for (const auto& p : cfg.corpora) corpus_paths.push_back(p.string());
  auto records = read_corpora(corpus_paths);
  std::vector<std::string> genres = cfg.genres;
  if (genres.empty()) genres = select_genres(records, cfg.k).shared;
  if (genres.empty()) throw DataError("no shared genres to evaluate");
  records = restrict_to_genres(std::move(records), genres);
  note("evaluating " + std::to_string(genres.size()) + " genres over " + std::to_string(records.size()) + " songs");

  EvalCorpus corpus(records);
  const auto variants = corpus.variants();
  const bool needs_embeddings = std::find(cfg.representations.begin(), cfg.representations.end(),
                                          Representation::embedding) != cfg.representations.end();
  if (needs_embeddings) {
    std::unique_ptr<SongEmbedder> embedder;
    if (!cfg.provider.empty()) embedder = make_song_embedder(cfg.provider, cfg.token_budget);
    for (const auto& tag : variants) {
      std::map<std::string, SongEmbedding> table;
      const auto file = cfg.embeddings.find(tag);
      if (file != cfg.embeddings.end()) {
        table = load_embedding_file(file->second).by_id;
      } else if (embedder) {
        auto batch = embed_corpus(*embedder, corpus.records(tag, Representation::bow), cfg.jobs);
        for (auto& e : batch.embeddings) {
          std::string id = e.record_id;
          table.emplace(std::move(id), std::move(e));
        }
      } else {
        throw UsageError("no embeddings for variant " + tag + ": set a provider or an embeddings file");
      }
      const auto missing = corpus.attach_embeddings(tag, table);
      if (!missing.empty()) note(tag + ": " + std::to_string(missing.size()) + " songs without embeddings excluded");
    }
  }

  for (auto& [train, test] : cfg.pairs) {
    train = canonical_variant_tag(train);
    test = canonical_variant_tag(test);
    for (const auto& t : {train, test}) {
      if (!corpus.has_variant(t)) throw DataError("corpus has no records for language variant '" + t + "'");
    }
  }
  const auto specs = expand_specs(cfg, genres, variants);
  note("running " + std::to_string(specs.size()) + " specs x " + std::to_string(cfg.repeats) + " repeats on " +
       std::to_string(cfg.jobs) + " worker(s)");

  EvalSettings settings;
  settings.svm = cfg.svm;
  settings.bow.min_df = cfg.min_df;
  settings.bow.max_df = cfg.max_df;
  if (cfg.musical_terms) settings.bow.excluded_terms = load_term_list(*cfg.musical_terms);
  const auto results = run_bootstraps(specs, corpus, settings, cfg.jobs);

  ensure_parent(cfg.results);
  ensure_parent(cfg.aggregated);
  {
    std::ofstream out(cfg.results, std::ios::binary);
    if (!out) throw DataError("cannot write '" + cfg.results.string() + "'");
    write_results_csv(out, results);
  }
  {
    std::ofstream out(cfg.aggregated, std::ios::binary);
    if (!out) throw DataError("cannot write '" + cfg.aggregated.string() + "'");
    write_aggregated_csv(out, results);
  }
  std::cout << render_reports(aggregate_matrices(results), ReportFormat::markdown);

  json resolved = cfg.to_json();
  resolved["genres_resolved"] = genres;
  resolved["variants"] = variants;
  const fs::path out_dir = cfg.results.has_parent_path() ? cfg.results.parent_path() : fs::path(".");
  log_config(out_dir, "bootstrap", resolved);
  return 0;
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::string input;
  std::string output;
  std::string format = "markdown";
};

int cmd_report(const ReportArgs& a) {
  const auto results = read_results_csv(a.input);
  if (results.empty()) throw DataError("results file '" + a.input + "' has no rows");
  const std::string text = render_reports(aggregate_matrices(results), parse_report_format(a.format));
  if (a.output.empty() || a.output == "-") {
    std::cout << text;
    return 0;
  }
  ensure_parent(a.output);
  std::ofstream out(a.output, std::ios::binary);
  if (!out) throw DataError("cannot write '" + a.output + "'");
  out << text;
  log_config(a.output, "report", {{"input", a.input}, {"output", a.output}, {"format", a.format}});
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string models;
  std::string input = "-";
  std::string output;
  std::string provider;
  std::string vocabulary;
  std::string centering_corpus;
  std::size_t token_budget = kDefaultTokenBudget;
};

constexpr const char* kNoGenre = "<none>";

// One lyric per line for plain text; JSONL input reads the "lyrics" field.
std::vector<std::string> read_lyrics(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path, std::ios::binary);
    if (!file) throw DataError("cannot open '" + path + "'");
    in = &file;
  }
  const bool jsonl = path != "-" && format_from_path(path) == InputFormat::jsonl;
  std::vector<std::string> lyrics;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!jsonl) {
      lyrics.push_back(line);
      continue;
    }
    if (line.empty()) continue;
    try {
      lyrics.push_back(json::parse(line).at("lyrics").get<std::string>());
    } catch (const json::exception& e) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lyrics;
}

int cmd_predict(const PredictArgs& a) {
  const auto models = load_models(a.models);
  if (models.empty()) throw DataError("no models found in '" + a.models + "'");
  const std::string tag = models.front().representation_tag;
  for (const auto& m : models) {
    if (m.representation_tag != tag || m.dimension() != models.front().dimension()) {
      throw DataError("models in '" + a.models + "' mix representations");
    }
  }
  const auto lyrics = read_lyrics(a.input);

  std::vector<std::optional<std::vector<double>>> inputs(lyrics.size());
  if (tag == "bow") {
    const fs::path vocab_path =
        a.vocabulary.empty() ? (fs::is_directory(a.models) ? fs::path(a.models) / "vocabulary.json"
                                                           : fs::path(a.models).parent_path() / "vocabulary.json")
                             : fs::path(a.vocabulary);
    const auto vocab = load_vocabulary(vocab_path);
    if (vocab.size() != models.front().dimension()) throw DataError("vocabulary does not match the models");
    for (std::size_t i = 0; i < lyrics.size(); ++i) {
      const auto doc = transform(lyrics[i], vocab);
      // no known term: nothing to classify, same as an unembeddable lyric
      if (doc.entries.empty()) continue;
      std::vector<double> x(vocab.size(), 0.0);
      for (const auto& e : doc.entries) x[e.index] = e.value;
      inputs[i] = std::move(x);
    }
  } else {
    std::string provider = a.provider.empty() ? tag : a.provider;
    if (provider.rfind("file:", 0) == 0) {
      throw UsageError("models were trained on precomputed embeddings; pass --provider to embed new lyrics");
    }
    const auto embedder = make_song_embedder(provider, a.token_budget);
    if (embedder->dimension() != models.front().dimension()) {
      throw DataError("provider dimension " + std::to_string(embedder->dimension()) + " does not match model dimension " +
                      std::to_string(models.front().dimension()));
    }
    std::optional<CentroidTransform> corpus_centroid;
    if (!a.centering_corpus.empty()) {
      const auto records = read_corpus_jsonl(a.centering_corpus);
      const auto batch = embed_corpus(*embedder, records);
      if (batch.embeddings.empty()) throw DataError("centering corpus has no embeddable songs");
      corpus_centroid = compute_centroid(to_matrix(batch.embeddings), CentroidSource::test_corpus);
    }
    for (std::size_t i = 0; i < lyrics.size(); ++i) {
      LyricRecord r;
      r.id = "line-" + std::to_string(i + 1);
      r.lyrics = lyrics[i];
      const auto e = embedder->embed(r);
      if (!e) continue;
      std::vector<double> x(e->values.begin(), e->values.end());
      if (models.front().centroid) (corpus_centroid ? *corpus_centroid : *models.front().centroid).apply(x);
      inputs[i] = std::move(x);
    }
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.output.empty() && a.output != "-") {
    ensure_parent(a.output);
    file.open(a.output, std::ios::binary);
    if (!file) throw DataError("cannot write '" + a.output + "'");
    out = &file;
  }
  for (const auto& x : inputs) {
    std::vector<std::pair<double, std::string>> hits;
    if (x) {
      for (const auto& m : models) {
        const double d = decision(m, *x);
        if (d > 0) hits.emplace_back(d, m.genre);
      }
    }
    std::sort(hits.begin(), hits.end(), [](const auto& p, const auto& q) {
      return p.first != q.first ? p.first > q.first : p.second < q.second;
    });
    if (hits.empty()) {
      *out << kNoGenre << '\n';
      continue;
    }
    std::string line;
    for (const auto& [score, genre] : hits) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", score);
      line += (line.empty() ? "" : "\t") + genre + ":" + buf;
    }
    *out << line << '\n';
  }
  return 0;
}

void print_error(ErrorKind kind, const std::string& message) {
  const json line = {{"error", {{"kind", kind_name(kind)}, {"exit_code", static_cast<int>(kind)}, {"message", message}}}};
  std::cerr << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual music genre classification from lyrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lyricgenre 1.0.0");

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("-v,--verbose", [](std::int64_t n) { verbosity = 1 + static_cast<int>(n); }, "More progress output");
    sub->add_flag("-q,--quiet", [](std::int64_t) { verbosity = 0; }, "Only errors on standard error");
  };
  const auto centering_modes = CLI::IsMember({"none", "full-corpus", "sampled-set"});
  const auto representations = CLI::IsMember({"embedding", "bow"});

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Read CSV/JSONL lyrics, detect languages, drop mislabeled songs");
  ingest->add_option("-i,--input", ingest_args.inputs, "Input CSV or JSONL file(s)")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--output", ingest_args.output, "Corpus JSONL to write")->required();
  ingest->add_option("--discarded", ingest_args.discarded, "Also write discarded records here");
  ingest->add_option("--format", ingest_args.format, "Input format")->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  ingest->add_flag("--strict,!--lenient", ingest_args.strict, "Abort on the first bad row (default) or skip bad rows");
  ingest->add_option("--language-detection", ingest_args.detection, "trigram, or passthrough to trust detected_language")
      ->check(CLI::IsMember({"trigram", "passthrough"}));
  ingest->add_option("--variant", ingest_args.variant, "Override corpus variant: native or translated-from:<lang>");
  ingest->add_option("--genre-case", ingest_args.genre_case, "preserve or lower")
      ->check(CLI::IsMember({"preserve", "lower"}));
  ingest->add_option("--genre-delimiter", ingest_args.genre_delimiter, "Separator inside the genres column");
  add_common(ingest);

  SelectArgs select_args;
  auto* select = app.add_subcommand("select-genres", "Intersect per-language top-k genres and count songs");
  select->add_option("-i,--input", select_args.inputs, "Corpus JSONL file(s)")->required()->check(CLI::ExistingFile);
  select->add_option("-o,--output", select_args.output, "Selection JSON to write")->required();
  select->add_option("-k,--k", select_args.k, "Genres per language")->check(CLI::PositiveNumber);
  select->add_option("--table", select_args.table, "Also write the markdown count table here");
  select->add_flag("--rank-before-filter", select_args.rank_before_filter,
                   "Rank genres on kept plus discarded records");
  select->add_option("--discarded", select_args.discarded, "Discarded records from ingest")->check(CLI::ExistingFile);
  add_common(select);

  EmbedArgs embed_args;
  auto* embed = app.add_subcommand("embed", "Mean-pool sentence embeddings into an embedding file");
  embed->add_option("-i,--input", embed_args.inputs, "Corpus JSONL file(s)")->required()->check(CLI::ExistingFile);
  embed->add_option("-o,--output", embed_args.output, "Embedding file to write")->required();
  embed->add_option("-p,--provider", embed_args.provider, "mock:<seed>[:<dim>] or extern:<url>")->required();
  embed->add_option("--token-budget", embed_args.token_budget, "Approximate tokens per sentence chunk")
      ->check(CLI::PositiveNumber);
  embed->add_option("-j,--jobs", embed_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_common(embed);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train one-vs-all genre models on a corpus");
  train->add_option("-i,--input", train_args.inputs, "Corpus JSONL file(s)")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--output", train_args.output, "Model directory")->required();
  train->add_option("-p,--provider", train_args.provider, "mock:<seed>[:<dim>], file:<path> or extern:<url>");
  train->add_option("-r,--representation", train_args.representation, "embedding or bow")->check(representations);
  train->add_option("--centering", train_args.centering,
                    "none, or center the training set (the test-side source is chosen at predict time)")
      ->check(centering_modes);
  train->add_option("--language", train_args.language, "Train on one language variant, e.g. PT or EN<-PT");
  train->add_option("--genres", train_args.genres, "Genres to train (default: shared top-k)")->delimiter(',');
  train->add_option("-k,--k", train_args.k, "Genres per language for automatic selection")->check(CLI::PositiveNumber);
  train->add_option("-s,--seed", train_args.seed, "Seed");
  train->add_option("-j,--jobs", train_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  train->add_option("--token-budget", train_args.token_budget, "Approximate tokens per sentence chunk")
      ->check(CLI::PositiveNumber);
  train->add_option("--c-grid", train_args.c_grid, "Candidate C values")->delimiter(',');
  train->add_flag("--balance,!--no-balance", train_args.balance, "Balanced resample per genre (default on)");
  add_common(train);

  BootstrapArgs boot_args;
  std::uint64_t boot_seed = 0;
  unsigned boot_jobs = 1;
  int boot_repeats = 10;
  auto* boot = app.add_subcommand("bootstrap", "Run the repeated train/test protocol over every configured combination");
  boot->add_option("-c,--config", boot_args.config, "Run configuration JSON")->check(CLI::ExistingFile);
  boot->add_option("-i,--input", boot_args.inputs, "Extra corpus JSONL file(s)")->check(CLI::ExistingFile);
  boot->add_option("-o,--output", boot_args.output, "Directory for results.csv and aggregated.csv");
  boot->add_option("-p,--provider", boot_args.provider, "Embedding provider for variants without a file");
  auto* seed_opt = boot->add_option("-s,--seed", boot_seed, "Master seed");
  auto* jobs_opt = boot->add_option("-j,--jobs", boot_jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* repeats_opt = boot->add_option("--repeats", boot_repeats, "Repeats per spec")->check(CLI::PositiveNumber);
  boot->add_option("--centering", boot_args.centering, "Centering modes to run")->check(centering_modes)->delimiter(',');
  boot->add_option("-r,--representation", boot_args.representation, "Representations to run")
      ->check(representations)
      ->delimiter(',');
  boot->add_flag("--allow-source-overlap", boot_args.allow_source_overlap,
                 "Keep test songs whose source also appears in the train sample");
  add_common(boot);

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Aggregate a results CSV into mean +- 2 sigma tables");
  report->add_option("-i,--input", report_args.input, "results.csv from bootstrap")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", report_args.output, "Write here instead of standard output");
  report->add_option("-f,--format", report_args.format, "markdown or csv")->check(CLI::IsMember({"markdown", "csv"}));
  add_common(report);

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Print genre:score for every genre with a positive decision");
  predict->add_option("-m,--models", predict_args.models, "Model directory or file")->required()->check(CLI::ExistingPath);
  predict->add_option("-i,--input", predict_args.input, "Lyrics, one per line (or JSONL with a lyrics field); - for stdin");
  predict->add_option("-o,--output", predict_args.output, "Write here instead of standard output");
  predict->add_option("-p,--provider", predict_args.provider, "Override the provider recorded in the models");
  predict->add_option("--vocabulary", predict_args.vocabulary, "Vocabulary for bag-of-words models");
  predict->add_option("--centering-corpus", predict_args.centering_corpus,
                      "Center inputs on this corpus's mean instead of the training mean")
      ->check(CLI::ExistingFile);
  predict->add_option("--token-budget", predict_args.token_budget, "Approximate tokens per sentence chunk")
      ->check(CLI::PositiveNumber);
  add_common(predict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error(ErrorKind::usage, e.what());
    return static_cast<int>(ErrorKind::usage);
  }

  try {
    if (*ingest) return cmd_ingest(ingest_args);
    if (*select) return cmd_select_genres(select_args);
    if (*embed) return cmd_embed(embed_args);
    if (*train) return cmd_train(train_args);
    if (*boot) {
      if (*seed_opt) boot_args.seed = boot_seed;
      if (*jobs_opt) boot_args.jobs = boot_jobs;
      if (*repeats_opt) boot_args.repeats = boot_repeats;
      if (boot_args.config.empty() && boot_args.inputs.empty()) {
        throw UsageError("bootstrap needs --config or --input");
      }
      return cmd_bootstrap(boot_args);
    }
    if (*report) return cmd_report(report_args);
    if (*predict) return cmd_predict(predict_args);
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    print_error(ErrorKind::data, e.what());
    return static_cast<int>(ErrorKind::data);
  } catch (const std::exception& e) {
    print_error(ErrorKind::data, e.what());
    return static_cast<int>(ErrorKind::data);
  }
  return 0;
}
