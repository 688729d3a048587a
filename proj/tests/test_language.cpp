#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "lyricgenre/error.hpp"
#include "lyricgenre/language.hpp"

using namespace lyricgenre;

TEST_CASE("detects unambiguous English and Portuguese") {
  const auto& profiles = builtin_profiles();
  const auto en = detect_language("the quick brown fox jumps over the lazy dog", profiles);
  CHECK(en.language == "en");
  CHECK(en.score > 0.5);
  CHECK(en.score <= 1.0);

  const auto pt = detect_language("eu não sei o que dizer sobre você", profiles);
  CHECK(pt.language == "pt");
  CHECK(pt.score > 0.5);

  CHECK(detect_language("I will always love you, baby, until the end of time", profiles).language == "en");
  CHECK(detect_language("saudade é uma palavra que só existe na nossa língua", profiles).language == "pt");
}

TEST_CASE("detection needs enough text and two profiles") {
  const auto& profiles = builtin_profiles();
  CHECK_THROWS_AS(detect_language("ab", profiles), DataError);
  CHECK_THROWS_AS(detect_language("123 !!", profiles), DataError);
  CHECK_THROWS_AS(detect_language("hello world", std::span(profiles.data(), 1)), UsageError);
}

TEST_CASE("trigram normalization") {
  const auto norm = normalize_for_trigrams("Oi,  MUNDO!!");
  CHECK(norm == U" oi mundo ");
  const auto grams = trigrams("ab");
  CHECK(grams == std::vector<std::string>{" ab", "ab "});
}

TEST_CASE("profile probabilities sum to at most one") {
  for (const auto& p : builtin_profiles()) {
    double sum = 0;
    for (const auto& [t, lp] : p.trigram_log_prob) {
      CHECK(lp < 0.0);
      CHECK(lp > p.unseen_log_prob);
      sum += std::exp(lp);
    }
    CHECK(sum <= 1.0 + 1e-12);
    CHECK(sum + std::exp(p.unseen_log_prob) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("add-one smoothing on a tiny sample") {
  // " aa " -> " aa", "aa ": N = 2, V = 2, denominator 5
  const auto p = train_profile("xx", "aa");
  CHECK(p.trigram_log_prob.size() == 2);
  CHECK(p.log_prob(" aa") == doctest::Approx(std::log(2.0 / 5.0)));
  CHECK(p.log_prob("zzz") == doctest::Approx(std::log(1.0 / 5.0)));
}

TEST_CASE("profile save/load round trip") {
  const auto path = std::filesystem::temp_directory_path() / "lyricgenre_profile_test.tsv";
  const auto& p = builtin_profiles()[1];
  save_profile(path, p);
  const auto q = load_profile(path);
  CHECK(q.language == p.language);
  CHECK(q.unseen_log_prob == p.unseen_log_prob);
  REQUIRE(q.trigram_log_prob.size() == p.trigram_log_prob.size());
  for (const auto& [t, lp] : p.trigram_log_prob) CHECK(q.log_prob(t) == lp);
  std::filesystem::remove(path);
}
