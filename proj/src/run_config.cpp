#include "lyricgenre/run_config.hpp"

#include <algorithm>
#include <fstream>

#include "lyricgenre/error.hpp"

namespace lyricgenre {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename T>
std::vector<T> one_or_many(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

void check_centering(const std::string& c) {
  if (c != "none" && c != "full-corpus" && c != "sampled-set") {
    throw UsageError("centering must be none, full-corpus or sampled-set, got '" + c + "'");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base) {
  static const std::vector<std::string> known = {
      "corpora", "embeddings", "provider", "token_budget", "representations", "representation",
      "centering", "genres", "k", "pairs", "repeats", "master_seed", "allow_source_overlap",
      "jobs", "svm", "bow", "output"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("unknown run configuration key '" + key + "'");
    }
  }
  RunConfig c;
  try {
    if (j.contains("corpora")) {
      const auto& corpora = j["corpora"];
      if (corpora.is_object()) {
        for (const auto& [tag, path] : corpora.items()) c.corpora.push_back(resolve(base, path.get<std::string>()));
      } else {
        for (const auto& p : one_or_many<std::string>(corpora)) c.corpora.push_back(resolve(base, p));
      }
    }
    if (j.contains("embeddings")) {
      for (const auto& [tag, path] : j["embeddings"].items()) {
        c.embeddings[canonical_variant_tag(tag)] = resolve(base, path.get<std::string>());
      }
    }
    c.provider = j.value("provider", c.provider);
    c.token_budget = j.value("token_budget", c.token_budget);
    const char* rep_key = j.contains("representations") ? "representations" : "representation";
    if (j.contains(rep_key)) {
      c.representations.clear();
      for (const auto& r : one_or_many<std::string>(j[rep_key])) c.representations.push_back(parse_representation(r));
    }
    if (j.contains("centering")) c.centering = one_or_many<std::string>(j["centering"]);
    if (j.contains("genres")) {
      if (j["genres"].is_string() && j["genres"].get<std::string>() == "auto") {
        c.genres.clear();
      } else {
        c.genres = j["genres"].get<std::vector<std::string>>();
      }
    }
    c.k = j.value("k", c.k);
    if (j.contains("pairs") && !(j["pairs"].is_string() && j["pairs"].get<std::string>() == "all")) {
      for (const auto& p : j["pairs"]) {
        const auto v = p.get<std::vector<std::string>>();
        if (v.size() != 2) throw UsageError("each pair must be [train, test]");
        c.pairs.emplace_back(canonical_variant_tag(v[0]), canonical_variant_tag(v[1]));
      }
    }
    c.repeats = j.value("repeats", c.repeats);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.allow_source_overlap = j.value("allow_source_overlap", c.allow_source_overlap);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("svm")) {
      const auto& s = j["svm"];
      if (s.contains("c_grid")) c.svm.c_grid = s["c_grid"].get<std::vector<double>>();
      c.svm.folds = s.value("folds", c.svm.folds);
      c.svm.max_epochs = s.value("max_epochs", c.svm.max_epochs);
      c.svm.tolerance = s.value("tolerance", c.svm.tolerance);
      c.svm.fit_bias = s.value("fit_bias", c.svm.fit_bias);
    }
    if (j.contains("bow")) {
      const auto& b = j["bow"];
      c.min_df = b.value("min_df", c.min_df);
      c.max_df = b.value("max_df", c.max_df);
      if (b.contains("musical_terms")) c.musical_terms = resolve(base, b["musical_terms"].get<std::string>());
    }
    if (j.contains("output")) {
      const auto& o = j["output"];
      if (o.contains("results")) c.results = resolve(base, o["results"].get<std::string>());
      if (o.contains("aggregated")) c.aggregated = resolve(base, o["aggregated"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid run configuration: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open run configuration '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

json RunConfig::to_json() const {
  json j;
  j["corpora"] = json::array();
  for (const auto& p : corpora) j["corpora"].push_back(p.string());
  j["embeddings"] = json::object();
  for (const auto& [tag, p] : embeddings) j["embeddings"][tag] = p.string();
  j["provider"] = provider;
  j["token_budget"] = token_budget;
  j["representations"] = json::array();
  for (auto r : representations) j["representations"].push_back(to_string(r));
  j["centering"] = centering;
  j["genres"] = genres.empty() ? json("auto") : json(genres);
  j["k"] = k;
  if (pairs.empty()) {
    j["pairs"] = "all";
  } else {
    j["pairs"] = json::array();
    for (const auto& [a, b] : pairs) j["pairs"].push_back({a, b});
  }
  j["repeats"] = repeats;
  j["master_seed"] = master_seed;
  j["allow_source_overlap"] = allow_source_overlap;
  j["jobs"] = jobs;
  j["svm"] = {{"c_grid", svm.c_grid}, {"folds", svm.folds}, {"max_epochs", svm.max_epochs},
              {"tolerance", svm.tolerance}, {"fit_bias", svm.fit_bias}};
  j["bow"] = {{"min_df", min_df}, {"max_df", max_df},
              {"musical_terms", musical_terms ? json(musical_terms->string()) : json("builtin")}};
  j["output"] = {{"results", results.string()}, {"aggregated", aggregated.string()}};
  return j;
}

void RunConfig::validate() const {
  if (corpora.empty()) throw UsageError("run configuration lists no corpora");
  if (repeats < 1) throw UsageError("repeats must be at least 1");
  if (k < 1) throw UsageError("k must be at least 1");
  if (representations.empty()) throw UsageError("no representation selected");
  if (centering.empty()) throw UsageError("no centering mode selected");
  for (const auto& c : centering) check_centering(c);
  // results rows carry only a centralized flag, so the two sources cannot share a run
  if (std::find(centering.begin(), centering.end(), "full-corpus") != centering.end() &&
      std::find(centering.begin(), centering.end(), "sampled-set") != centering.end()) {
    throw UsageError("centering cannot list both full-corpus and sampled-set in one run");
  }
  svm.validate();
  BowConfig bow;
  bow.min_df = min_df;
  bow.max_df = max_df;
  bow.validate();
}

std::vector<RunSpec> expand_specs(const RunConfig& config, const std::vector<std::string>& genres,
                                  const std::vector<std::string>& available_variants) {
  std::vector<std::pair<std::string, std::string>> pairs = config.pairs;
  if (pairs.empty()) {
    for (const auto& a : available_variants) {
      for (const auto& b : available_variants) pairs.emplace_back(a, b);
    }
  }
  std::vector<RunSpec> specs;
  for (const auto rep : config.representations) {
    // centering only applies to embeddings; bow runs once, uncentered
    const std::vector<std::string> modes =
        rep == Representation::bow ? std::vector<std::string>{"none"} : config.centering;
    for (const auto& centering : modes) {
      for (const auto& [train, test] : pairs) {
        for (const auto& g : genres) {
          RunSpec s;
          s.genre = g;
          s.train_language = train;
          s.test_language = test;
          s.representation = rep;
          s.centralized = centering != "none";
          if (s.centralized) s.test_centering_source = parse_test_centering(centering);
          s.repeats = config.repeats;
          s.master_seed = config.master_seed;
          s.allow_source_overlap = config.allow_source_overlap;
          specs.push_back(std::move(s));
        }
      }
    }
  }
  return specs;
}

}  // namespace lyricgenre
