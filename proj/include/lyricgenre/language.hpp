#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lyricgenre {

/// Character-trigram language model with add-one smoothing. Listed trigrams
/// carry log((count + 1) / (N + V + 1)); anything unlisted scores
/// unseen_log_prob = log(1 / (N + V + 1)).
struct LanguageProfile {
  std::string language;
  std::unordered_map<std::string, double> trigram_log_prob;
  double unseen_log_prob = 0.0;

  double log_prob(const std::string& trigram) const;
};

/// Lowercased letters with every other run of characters mapped to a single
/// space, padded with one space on each side.
std::u32string normalize_for_trigrams(std::string_view text);
std::vector<std::string> trigrams(std::string_view text);

LanguageProfile train_profile(std::string language, std::string_view training_text);

/// Profiles trained on the English and Portuguese samples compiled into the
/// library.
const std::vector<LanguageProfile>& builtin_profiles();

void save_profile(const std::filesystem::path& path, const LanguageProfile& profile);
LanguageProfile load_profile(const std::filesystem::path& path);

struct Detection {
  std::string language;
  /// softmax weight of the winner over all profiles
  double score = 0.0;
};

/// Picks the profile with the highest mean per-trigram log-likelihood.
/// Throws DataError when fewer than three letters survive normalization.
Detection detect_language(std::string_view text, std::span<const LanguageProfile> profiles);

}  // namespace lyricgenre
