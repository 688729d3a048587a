#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lyricgenre/eval.hpp"

namespace lyricgenre {

/// Bootstrap run configuration (JSON). Relative paths resolve against the
/// configuration file's directory.
struct RunConfig {
  std::vector<std::filesystem::path> corpora;
  /// variant tag -> embedding file; variants without one use `provider`
  std::map<std::string, std::filesystem::path> embeddings;
  std::string provider;
  std::size_t token_budget = kDefaultTokenBudget;

  std::vector<Representation> representations = {Representation::embedding};
  /// "none", "full-corpus", "sampled-set"; each entry yields one set of specs
  std::vector<std::string> centering = {"none", "full-corpus"};
  /// empty means automatic top-k intersection
  std::vector<std::string> genres;
  int k = 20;
  /// empty means every ordered pair of available variants
  std::vector<std::pair<std::string, std::string>> pairs;

  int repeats = 10;
  std::uint64_t master_seed = 0;
  bool allow_source_overlap = false;
  unsigned jobs = 1;

  TrainConfig svm;
  double min_df = 0.01;
  double max_df = 0.3;
  std::optional<std::filesystem::path> musical_terms;

  std::filesystem::path results = "results.csv";
  std::filesystem::path aggregated = "aggregated.csv";

  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  /// Fully resolved form, defaults included.
  nlohmann::json to_json() const;

  void validate() const;
};

/// Expands representations x centering x pairs x genres into run specs, in a
/// fixed order.
std::vector<RunSpec> expand_specs(const RunConfig& config, const std::vector<std::string>& genres,
                                  const std::vector<std::string>& available_variants);

}  // namespace lyricgenre
