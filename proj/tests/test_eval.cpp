#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "lyricgenre/error.hpp"
#include "lyricgenre/eval.hpp"
#include "lyricgenre/random.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace lyricgenre;

namespace {

synthetic::Options small_options() {
  synthetic::Options o;
  o.songs_per_language = 120;
  return o;
}

RunSpec spec(std::string train, std::string test, bool centralized = false) {
  RunSpec s;
  s.genre = "Rock";
  s.train_language = std::move(train);
  s.test_language = std::move(test);
  s.centralized = centralized;
  s.master_seed = 2024;
  return s;
}

}  // namespace

TEST_CASE("80/20 split") {
  const auto s = split_80_20(10, 1);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  for (auto i : s.test) CHECK(all.insert(i).second);
  CHECK(all.size() == 10);
  CHECK(split_80_20(10, 1).train == s.train);
  CHECK(split_80_20(7, 3).train.size() == 5);
  CHECK_THROWS_AS(split_80_20(4, 1), DataError);
}

TEST_CASE("80/20 split membership frequency") {
  const std::size_t n = 1000, seeds = 200;
  std::vector<int> hits(n, 0);
  for (std::size_t s = 0; s < seeds; ++s) {
    for (auto i : split_80_20(n, s).train) ++hits[i];
  }
  std::size_t within = 0;
  for (int h : hits) {
    const double freq = static_cast<double>(h) / seeds;
    CHECK(std::abs(freq - 0.8) < 0.15);
    within += std::abs(freq - 0.8) <= 0.05;
  }
  // Binomial(200, 0.8) lands within +-0.05 about 93% of the time
  CHECK(static_cast<double>(within) / n >= 0.88);
}

TEST_CASE("balanced resample") {
  const std::vector<int> y = {1, -1, -1, 1, -1, -1, -1, 1, -1, -1};
  const auto r = balanced_resample(y, 5);
  REQUIRE(r.items.size() == 6);
  CHECK(r.labels == std::vector<int>{1, 1, 1, -1, -1, -1});
  for (std::size_t k = 0; k < 6; ++k) CHECK(y[r.items[k]] == r.labels[k]);

  const std::vector<int> even = {1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
  const auto e = balanced_resample(even, 1);
  CHECK(e.items.size() == 10);
  CHECK(std::count(e.labels.begin(), e.labels.end(), 1) == 5);

  CHECK_THROWS_AS(balanced_resample(std::vector<int>{1, 1}, 0), DataError);
}

TEST_CASE("resampled minority items follow the bootstrap inclusion probability") {
  // 5 positives among 12: each positive should appear in 1 - (4/5)^5 of resamples
  std::vector<int> y(12, -1);
  for (int i = 0; i < 5; ++i) y[static_cast<std::size_t>(i * 2)] = 1;
  const double expected = 1.0 - std::pow(1.0 - 1.0 / 5.0, 5.0);
  std::vector<int> seen(12, 0);
  const int trials = 1000;
  for (int s = 0; s < trials; ++s) {
    const auto r = balanced_resample(y, static_cast<std::uint64_t>(s));
    std::set<std::size_t> present;
    for (std::size_t k = 0; k < r.items.size(); ++k) {
      if (r.labels[k] == 1) present.insert(r.items[k]);
    }
    for (auto i : present) ++seen[i];
  }
  for (std::size_t i = 0; i < 12; ++i) {
    if (y[i] == 1) CHECK(std::abs(static_cast<double>(seen[i]) / trials - expected) < 0.05);
  }
}

TEST_CASE("f1 examples and oracle") {
  CHECK(f1(std::vector<int>{1, -1, 1}, std::vector<int>{1, -1, 1}) == 1.0);
  CHECK(f1(std::vector<int>{1, -1}, std::vector<int>{1, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(f1(std::vector<int>{1}, std::vector<int>{}), DataError);
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = rng.below(30);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = rng.below(2) ? 1 : -1, b[i] = rng.below(2) ? 1 : -1;
    CHECK(f1(a, b) == oracle::f1(a, b));
  }
}

TEST_CASE("run seeds depend on every spec coordinate") {
  const auto base = spec("PT", "EN");
  std::set<std::uint64_t> seeds = {run_seed(base, 0), run_seed(base, 1)};
  auto other = base;
  other.genre = "Gospel";
  seeds.insert(run_seed(other, 0));
  other = base;
  other.train_language = "EN";
  seeds.insert(run_seed(other, 0));
  other = base;
  other.test_language = "PT";
  seeds.insert(run_seed(other, 0));
  other = base;
  other.master_seed = 1;
  seeds.insert(run_seed(other, 0));
  CHECK(seeds.size() == 6);
  other = base;
  other.centralized = true;
  // paired runs share splits and samples
  CHECK(run_seed(other, 0) == run_seed(base, 0));
}

TEST_CASE("monolingual run on separable clusters") {
  const auto data = synthetic::make(small_options());
  const auto corpus = data.eval_corpus();
  const auto s = spec("PT", "PT");
  const auto out = run_once(s, 0, corpus);
  CHECK(out.f1 >= 0.95);

  CHECK(std::count(out.train_labels.begin(), out.train_labels.end(), 1) * 2 ==
        static_cast<std::ptrdiff_t>(out.train_labels.size()));
  CHECK(std::count(out.test_labels.begin(), out.test_labels.end(), 1) * 2 ==
        static_cast<std::ptrdiff_t>(out.test_labels.size()));
  const std::set<std::size_t> train(out.train_sample.begin(), out.train_sample.end());
  for (auto i : out.test_sample) CHECK_FALSE(train.contains(i));

  const auto again = run_once(s, 0, corpus);
  CHECK(again.f1 == out.f1);
  CHECK(again.test_predictions == out.test_predictions);
  CHECK(run_once(s, 1, corpus).test_sample != out.test_sample);
}

TEST_CASE("language offset without centering predicts everything positive") {
  const auto data = synthetic::make(small_options());
  const auto corpus = data.eval_corpus();
  const auto out = run_once(spec("PT", "EN"), 0, corpus);
  CHECK(std::all_of(out.test_predictions.begin(), out.test_predictions.end(), [](int p) { return p == 1; }));
  CHECK(out.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const auto centered = run_once(spec("PT", "EN", true), 0, corpus);
  CHECK(centered.f1 >= 0.9);
  CHECK(centered.test_sample == out.test_sample);

  auto sampled = spec("PT", "EN", true);
  sampled.test_centering_source = TestCentering::sampled_set;
  CHECK(run_once(sampled, 0, corpus).f1 >= 0.9);
}

TEST_CASE("cross-variant runs never share source songs unless allowed") {
  auto o = small_options();
  o.with_translation = true;
  const auto data = synthetic::make(o);
  const auto corpus = data.eval_corpus();
  CHECK(corpus.variants() == std::vector<std::string>{"PT", "EN", "EN<-PT"});
  const auto& pt = corpus.records("PT", Representation::embedding);
  const auto& tr = corpus.records("EN<-PT", Representation::embedding);

  std::size_t allowed_collisions = 0;
  for (int repeat = 0; repeat < 5; ++repeat) {
    auto s = spec("PT", "EN<-PT");
    const auto out = run_once(s, repeat, corpus);
    std::set<std::string> train_sources;
    for (auto i : out.train_sample) train_sources.insert(pt[i].source_id);
    for (auto i : out.test_sample) CHECK_FALSE(train_sources.contains(tr[i].source_id));
    CHECK(out.test_candidates_removed > 0);

    s.allow_source_overlap = true;
    const auto loose = run_once(s, repeat, corpus);
    CHECK(loose.test_candidates_removed == 0);
    for (auto i : loose.test_sample) allowed_collisions += train_sources.contains(tr[i].source_id);
  }
  CHECK(allowed_collisions > 0);
}

TEST_CASE("bag-of-words runs") {
  const auto data = synthetic::make(small_options());
  const auto corpus = data.eval_corpus();
  auto s = spec("PT", "PT");
  s.representation = Representation::bow;
  const auto out = run_once(s, 0, corpus);
  CHECK(out.f1 >= 0.8);
  CHECK(run_once(s, 0, corpus).f1 == out.f1);

  // disjoint vocabularies leave every test vector empty
  auto cross = spec("PT", "EN");
  cross.representation = Representation::bow;
  const auto x = run_once(cross, 0, corpus);
  CHECK(x.f1 <= 0.7);

  s.centralized = true;
  CHECK_THROWS_AS(run_once(s, 0, corpus), UsageError);
}

TEST_CASE("errors carry the run context") {
  const auto data = synthetic::make(small_options());
  const auto corpus = data.eval_corpus();
  auto s = spec("PT", "FR");
  try {
    run_once(s, 3, corpus);
    FAIL("expected an error");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("genre='Rock'") != std::string::npos);
    CHECK(msg.find("repeat=3") != std::string::npos);
  }
  s = spec("PT", "PT");
  s.genre = "Jazz";
  CHECK_THROWS_AS(run_once(s, 0, corpus), DataError);
}

TEST_CASE("summaries") {
  const std::vector<double> v = {0.5, 0.7};
  const auto s = summarize(v);
  CHECK(s.mean == doctest::Approx(0.6));
  CHECK(s.std == doctest::Approx(std::sqrt(0.02)));
  CHECK(s.std == doctest::Approx(0.1414).epsilon(1e-3));
  CHECK(summarize(std::vector<double>{0.3, 0.3, 0.3}).std == 0.0);
  CHECK(summarize(std::vector<double>{0.4}).std == 0.0);
  CHECK(RunSpec{}.repeats == 10);
}

TEST_CASE("bootstrap results are reproducible and independent of worker count") {
  const auto data = synthetic::make(small_options());
  const auto corpus = data.eval_corpus();
  std::vector<RunSpec> specs;
  for (const char* genre : {"Rock", "Gospel"}) {
    for (bool c : {false, true}) {
      auto s = spec("EN", "PT", c);
      s.genre = genre;
      s.repeats = 3;
      specs.push_back(s);
    }
  }
  const auto serial = run_bootstraps(specs, corpus, {}, 1);
  const auto parallel = run_bootstraps(specs, corpus, {}, 4);
  REQUIRE(serial.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(serial[i].f1_values == parallel[i].f1_values);
    CHECK(serial[i].f1_values.size() == 3);
    const auto s = summarize(serial[i].f1_values);
    CHECK(std::abs(s.mean - serial[i].mean) < 1e-12);
    CHECK(std::abs(s.std - serial[i].std) < 1e-12);
    for (double f : serial[i].f1_values) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
  const auto single = bootstrap(specs[1], corpus);
  CHECK(single.f1_values == serial[1].f1_values);
}
