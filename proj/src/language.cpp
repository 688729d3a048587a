#include "lyricgenre/language.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lyricgenre/error.hpp"
#include "lyricgenre/text.hpp"

namespace lyricgenre {

namespace {
#include "language_samples.inc"
}  // namespace

double LanguageProfile::log_prob(const std::string& trigram) const {
  const auto it = trigram_log_prob.find(trigram);
  return it == trigram_log_prob.end() ? unseen_log_prob : it->second;
}

std::u32string normalize_for_trigrams(std::string_view input) {
  std::u32string out = U" ";
  for (char32_t cp : text::decode_utf8(input)) {
    if (text::is_letter(cp)) {
      out.push_back(text::fold_case(cp));
    } else if (out.back() != U' ') {
      out.push_back(U' ');
    }
  }
  if (out.back() != U' ') out.push_back(U' ');
  return out;
}

std::vector<std::string> trigrams(std::string_view input) {
  const std::u32string norm = normalize_for_trigrams(input);
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 3 <= norm.size(); ++i) {
    out.push_back(text::encode_utf8(std::u32string_view(norm).substr(i, 3)));
  }
  return out;
}

LanguageProfile train_profile(std::string language, std::string_view training_text) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (auto& t : trigrams(training_text)) {
    ++counts[t];
    ++total;
  }
  LanguageProfile p;
  p.language = std::move(language);
  const double denom = static_cast<double>(total + counts.size() + 1);
  for (const auto& [t, n] : counts) {
    p.trigram_log_prob.emplace(t, std::log(static_cast<double>(n + 1) / denom));
  }
  p.unseen_log_prob = std::log(1.0 / denom);
  return p;
}

const std::vector<LanguageProfile>& builtin_profiles() {
  static const std::vector<LanguageProfile> profiles = {
      train_profile("en", kEnglishSample),
      train_profile("pt", kPortugueseSample),
  };
  return profiles;
}

void save_profile(const std::filesystem::path& path, const LanguageProfile& profile) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "#language\t" << profile.language << "\n#unseen\t" << profile.unseen_log_prob << '\n';
  std::map<std::string, double> sorted(profile.trigram_log_prob.begin(), profile.trigram_log_prob.end());
  for (const auto& [t, lp] : sorted) out << t << '\t' << lp << '\n';
}

LanguageProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  LanguageProfile p;
  bool have_unseen = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      if (line.empty()) continue;
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected '<trigram>\\t<logprob>'");
    }
    const std::string key = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    if (key == "#language") {
      p.language = value;
      continue;
    }
    double v = 0;
    try {
      v = std::stod(value);
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + value + "'");
    }
    if (key == "#unseen") {
      p.unseen_log_prob = v;
      have_unseen = true;
    } else {
      p.trigram_log_prob[key] = v;
    }
  }
  if (p.language.empty() || !have_unseen) {
    throw DataError(path.string() + ": missing #language or #unseen header");
  }
  return p;
}

Detection detect_language(std::string_view input, std::span<const LanguageProfile> profiles) {
  if (profiles.size() < 2) throw UsageError("language detection needs at least two profiles");
  const std::u32string norm = normalize_for_trigrams(input);
  const auto letters = std::count_if(norm.begin(), norm.end(), [](char32_t c) { return c != U' '; });
  if (letters < 3) throw DataError("text too short to determine its language");

  std::vector<std::string> grams;
  for (std::size_t i = 0; i + 3 <= norm.size(); ++i) {
    grams.push_back(text::encode_utf8(std::u32string_view(norm).substr(i, 3)));
  }
  std::vector<double> mean_ll;
  mean_ll.reserve(profiles.size());
  for (const auto& p : profiles) {
    double ll = 0;
    for (const auto& g : grams) ll += p.log_prob(g);
    mean_ll.push_back(ll / static_cast<double>(grams.size()));
  }
  const auto best = static_cast<std::size_t>(std::max_element(mean_ll.begin(), mean_ll.end()) - mean_ll.begin());
  double z = 0;
  for (double v : mean_ll) z += std::exp(v - mean_ll[best]);
  return {profiles[best].language, 1.0 / z};
}

}  // namespace lyricgenre
