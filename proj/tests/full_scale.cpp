// Full-scale reproduction against the real lyrics dataset and a real sentence
// encoder. Not part of ctest: embedding the corpus takes hours.
//
//   full_scale --corpus kept.jsonl --provider extern:http://127.0.0.1:8080/embed
//   full_scale --corpus kept.jsonl --embeddings PT=pt.lyre --embeddings EN=en.lyre

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lyricgenre/corpus.hpp"
#include "lyricgenre/embedding.hpp"
#include "lyricgenre/embedding_file.hpp"
#include "lyricgenre/error.hpp"
#include "lyricgenre/eval.hpp"

using namespace lyricgenre;

namespace {

double mean_over_genres(const std::vector<BootstrapResult>& results, const std::string& train, const std::string& test,
                        Representation rep, bool centralized) {
  double sum = 0;
  int n = 0;
  for (const auto& r : results) {
    if (r.spec.train_language == train && r.spec.test_language == test && r.spec.representation == rep &&
        r.spec.centralized == centralized) {
      sum += r.mean;
      ++n;
    }
  }
  if (n == 0) throw DataError("no results for " + train + " -> " + test);
  return sum / n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-scale reproduction check"};
  std::vector<std::string> corpora;
  std::string provider;
  std::map<std::string, std::string> embedding_files;
  int k = 20;
  int repeats = 10;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  app.add_option("--corpus", corpora, "Ingested corpus JSONL (PT and EN records)")->required();
  app.add_option("--provider", provider, "extern:<url> for the sentence encoder");
  app.add_option("--embeddings", embedding_files, "TAG=file.lyre, one per variant")->delimiter(',');
  app.add_option("-k", k, "Genres per language");
  app.add_option("--repeats", repeats, "Repeats per spec");
  app.add_option("-j,--jobs", jobs, "Worker threads");
  app.add_option("--seed", seed, "Master seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<LyricRecord> records;
    for (const auto& p : corpora) {
      auto part = read_corpus_jsonl(p);
      records.insert(records.end(), part.begin(), part.end());
    }
    const auto genres = select_genres(records, k).shared;
    std::erase_if(records, [&](const LyricRecord& r) {
      for (const auto& g : genres) {
        if (r.has_genre_key(genre_key(g))) return false;
      }
      return true;
    });
    EvalCorpus corpus(records);
    std::unique_ptr<SongEmbedder> embedder;
    if (!provider.empty()) embedder = make_song_embedder(provider);
    for (const auto& tag : {std::string("PT"), std::string("EN")}) {
      std::map<std::string, SongEmbedding> table;
      if (const auto f = embedding_files.find(tag); f != embedding_files.end()) {
        table = load_embedding_file(f->second).by_id;
      } else if (embedder) {
        for (auto& e : embed_corpus(*embedder, corpus.records(tag, Representation::bow), jobs).embeddings) {
          std::string id = e.record_id;
          table.emplace(std::move(id), std::move(e));
        }
      } else {
        throw UsageError("no embeddings for " + tag + ": pass --provider or --embeddings " + tag + "=<file>");
      }
      corpus.attach_embeddings(tag, table);
    }

    std::vector<RunSpec> specs;
    auto add = [&](const char* train, const char* test, Representation rep, bool centralized) {
      for (const auto& g : genres) {
        RunSpec s;
        s.genre = g;
        s.train_language = train;
        s.test_language = test;
        s.representation = rep;
        s.centralized = centralized;
        s.repeats = repeats;
        s.master_seed = seed;
        specs.push_back(s);
      }
    };
    add("PT", "PT", Representation::embedding, false);
    add("EN", "EN", Representation::embedding, false);
    add("EN", "PT", Representation::embedding, true);
    add("EN", "PT", Representation::bow, false);
    const auto results = run_bootstraps(specs, corpus, {}, jobs);

    const double pt = mean_over_genres(results, "PT", "PT", Representation::embedding, false);
    const double en = mean_over_genres(results, "EN", "EN", Representation::embedding, false);
    const double cross = mean_over_genres(results, "EN", "PT", Representation::embedding, true);
    const double bow = mean_over_genres(results, "EN", "PT", Representation::bow, false);
    int failed = 0;
    auto line = [&](bool ok, const char* name, const std::string& detail) {
      failed += !ok;
      std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    };
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.3f (target 0.77 +- 0.05)", pt);
    line(std::abs(pt - 0.77) <= 0.05, "monolingual PT->PT", buf);
    std::snprintf(buf, sizeof buf, "%.3f (target 0.76 +- 0.05)", en);
    line(std::abs(en - 0.76) <= 0.05, "monolingual EN->EN", buf);
    std::snprintf(buf, sizeof buf, "centralized %.3f vs bag-of-words %.3f (need +0.2)", cross, bow);
    line(cross >= bow + 0.2, "cross-lingual EN->PT", buf);
    return failed == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return static_cast<int>(e.kind());
  }
}
