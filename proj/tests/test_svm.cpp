#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "lyricgenre/error.hpp"
#include "lyricgenre/metrics.hpp"
#include "lyricgenre/model_io.hpp"
#include "lyricgenre/random.hpp"
#include "lyricgenre/svm.hpp"
#include "oracles.hpp"

using namespace lyricgenre;

namespace {

struct Problem {
  oracle::Matrix x;
  std::vector<int> y;
  DenseMatrix features() const { return DenseMatrix::from_rows(x); }
};

// Two overlapping Gaussian blobs along a random direction.
Problem random_problem(Rng& rng, std::size_t n, std::size_t d, double separation, double noise) {
  Problem p;
  std::vector<double> dir(d);
  for (auto& v : dir) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 ? 1 : -1;
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = y * separation * dir[j] + noise * rng.normal();
    p.x.push_back(row);
    p.y.push_back(y);
  }
  return p;
}

TrainConfig tight() {
  TrainConfig c;
  c.tolerance = 1e-8;
  c.max_epochs = 100000;
  return c;
}

}  // namespace

TEST_CASE("1-D instance without bias has w = 1 exactly") {
  const auto x = DenseMatrix::from_rows({{-1.0}, {1.0}});
  const std::vector<int> y = {-1, 1};
  TrainConfig cfg;
  cfg.fit_bias = false;
  const auto m = train_binary(x, y, 1.0, cfg);
  CHECK(m.weights[0] == 1.0);
  CHECK(m.bias == 0.0);
}

TEST_CASE("separable clusters are fit perfectly at C = 10") {
  Rng rng(1);
  const auto p = random_problem(rng, 60, 5, 2.0, 0.2);
  const auto x = p.features();
  const auto m = train_binary(x, p.y, 10.0, TrainConfig{});
  CHECK(f1_score(p.y, predict_all(m, x)) == 1.0);
}

TEST_CASE("solver matches a projected-subgradient oracle on small instances") {
  Rng rng(2);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 10 + rng.below(30), d = 1 + rng.below(6);
    const auto p = random_problem(rng, n, d, 0.5, 1.0);
    const double c = std::vector<double>{0.01, 0.1, 1.0, 10.0}[rng.below(4)];
    const auto x = p.features();
    const auto m = train_binary(x, p.y, c, tight());
    const double ours = oracle::svm_primal(p.x, p.y, m.weights, m.bias, c, true);
    const auto ref = oracle::svm_subgradient(p.x, p.y, c, true, 100000);
    CHECK(ours <= ref.best_objective * (1 + 1e-3));
    CHECK(primal_objective(m, x, p.y, true) == doctest::Approx(ours).epsilon(1e-12));
  }
}

TEST_CASE("dual feasibility, monotone dual, small gap, complementary slackness") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_problem(rng, 20 + rng.below(40), 1 + rng.below(8), 0.7, 1.0);
    const double c = std::vector<double>{0.01, 0.1, 1.0, 10.0}[rng.below(4)];
    const auto x = p.features();
    SolverTrace trace;
    trace.record_objective = true;
    const auto m = train_binary(x, p.y, c, tight(), &trace);
    CHECK(trace.converged);
    for (double a : trace.alpha) {
      CHECK(a >= 0.0);
      CHECK(a <= c);
    }
    for (std::size_t e = 1; e < trace.dual_per_epoch.size(); ++e) {
      CHECK(trace.dual_per_epoch[e] >= trace.dual_per_epoch[e - 1] - 1e-9);
    }
    const double primal = primal_objective(m, x, p.y, true);
    const double dual = trace.dual_per_epoch.back();
    CHECK(primal - dual >= -1e-9);
    CHECK((primal - dual) / std::max(1.0, std::abs(primal)) < 1e-3);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double margin = p.y[i] * decision(m, x, i);
      const double a = trace.alpha[i];
      if (a == 0.0) CHECK(margin >= 1 - 1e-3);
      if (a > 1e-12 && a < c - 1e-12) CHECK(std::abs(margin - 1) <= 1e-3);
    }
  }
}

TEST_CASE("training is deterministic and degenerate input is rejected") {
  Rng rng(4);
  const auto p = random_problem(rng, 50, 4, 0.3, 1.0);
  const auto x = p.features();
  TrainConfig cfg;
  cfg.seed = 77;
  const auto a = train_binary(x, p.y, 1.0, cfg);
  const auto b = train_binary(x, p.y, 1.0, cfg);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);

  const std::vector<int> one_class(50, 1);
  CHECK_THROWS_AS(train_binary(x, one_class, 1.0, cfg), NumericError);
  auto bad = p.x;
  bad[3][1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train_binary(DenseMatrix::from_rows(bad), p.y, 1.0, cfg), NumericError);
}

TEST_CASE("decision and prediction") {
  LinearModel m;
  m.weights = {1.0, 0.0};
  const std::vector<double> x = {2.0, 5.0};
  CHECK(decision(m, x) == 2.0);
  CHECK(predict(m, x) == 1);
  const std::vector<double> zero = {0.0, 3.0};
  CHECK(decision(m, zero) == 0.0);
  CHECK(predict(m, zero) == 1);
  const std::vector<double> short_x = {1.0};
  CHECK_THROWS_AS(decision(m, short_x), DataError);
}

TEST_CASE("f1 score") {
  CHECK(f1_score(std::vector<int>{1, 1, -1, -1}, std::vector<int>{1, 1, 1, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK(f1_score(std::vector<int>{-1, -1}, std::vector<int>{-1, -1}) == 0.0);
  CHECK_THROWS_AS(f1_score(std::vector<int>{1}, std::vector<int>{1, 1}), DataError);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<int> t(n), q(n);
    for (std::size_t k = 0; k < n; ++k) {
      t[k] = rng.below(2) ? 1 : -1;
      q[k] = rng.below(2) ? 1 : -1;
    }
    CHECK(f1_score(t, q) == oracle::f1(t, q));
  }
}

TEST_CASE("stratified folds") {
  std::vector<int> y;
  for (int i = 0; i < 23; ++i) y.push_back(i < 11 ? 1 : -1);
  const auto f = stratified_folds(y, 5, 9);
  for (int k = 0; k < 5; ++k) {
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (f[i] == k) (y[i] == 1 ? pos : neg)++;
    }
    CHECK(pos >= 2);
    CHECK(pos <= 3);
    CHECK(neg >= 2);
    CHECK(neg <= 3);
  }
  CHECK(f == stratified_folds(y, 5, 9));
  const std::vector<int> few = {1, 1, 1, -1, -1, -1, -1, -1, -1, -1};
  CHECK_THROWS_AS(stratified_folds(few, 5, 0), DataError);
}

TEST_CASE("C selection") {
  TrainConfig defaults;
  CHECK(defaults.c_grid == std::vector<double>{0.01, 0.1, 1.0, 10.0});
  CHECK(defaults.folds == 5);

  // far-apart clusters: every C gives perfect folds, so the tie goes to 0.01
  Rng rng(6);
  const auto easy = random_problem(rng, 40, 3, 10.0, 0.1);
  const auto easy_x = easy.features();
  const auto tie = cv_select_c(easy_x, easy.y, defaults);
  for (const auto& [c, scores] : tie.per_c) CHECK(tie.mean_f1(c) == 1.0);
  CHECK(tie.chosen_c == 0.01);
}

TEST_CASE("C selection agrees with an exhaustive per-C refit") {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    // weak signal in small coordinates: heavy regularization flattens it
    auto p = random_problem(rng, 60, 3, 0.05, 0.05);
    for (auto& row : p.x) row[2] += 0.3 * rng.normal();
    const auto x = p.features();
    TrainConfig cfg;
    cfg.seed = 100 + trial;
    const auto report = cv_select_c(x, p.y, cfg);

    const auto folds = stratified_folds(p.y, cfg.folds, cfg.seed);
    double best = -1, best_c = 0;
    for (double c : cfg.c_grid) {
      double sum = 0;
      for (int f = 0; f < cfg.folds; ++f) {
        oracle::Matrix tr, te;
        std::vector<int> ytr, yte;
        for (std::size_t i = 0; i < p.x.size(); ++i) {
          (folds[i] == f ? te : tr).push_back(p.x[i]);
          (folds[i] == f ? yte : ytr).push_back(p.y[i]);
        }
        TrainConfig fc = cfg;
        fc.seed = SeedHasher(cfg.seed).add("fold").add(static_cast<std::uint64_t>(f)).value();
        const auto m = train_binary(DenseMatrix::from_rows(tr), ytr, c, fc);
        std::vector<int> pred;
        for (const auto& row : te) pred.push_back(predict(m, row));
        const double score = oracle::f1(yte, pred);
        CHECK(report.per_c.at(c)[static_cast<std::size_t>(f)] == score);
        sum += score;
      }
      if (sum / cfg.folds > best) best = sum / cfg.folds, best_c = c;
    }
    CHECK(report.chosen_c == best_c);

    TrainConfig parallel = cfg;
    parallel.jobs = 3;
    CHECK(cv_select_c(x, p.y, parallel).per_c == report.per_c);
  }
}

TEST_CASE("one-vs-all models are independent per genre") {
  Rng rng(8);
  std::vector<Problem> problems;
  std::vector<DenseMatrix> features;
  for (int g = 0; g < 8; ++g) {
    problems.push_back(random_problem(rng, 40, 4, 0.8, 1.0));
    features.push_back(problems.back().features());
  }
  std::vector<GenreTrainingSet> sets;
  for (int g = 0; g < 8; ++g) sets.push_back({"genre" + std::to_string(g), &features[g], problems[g].y});
  TrainConfig cfg;
  cfg.seed = 5;
  const auto all = train_one_vs_all(sets, cfg);
  CHECK(all.size() == 8);

  const auto fewer = train_one_vs_all(std::span(sets).subspan(0, 2), cfg);
  const auto only_one = train_one_vs_all(std::span(sets).subspan(1, 1), cfg);
  CHECK(fewer.at("genre1").model.weights == only_one.at("genre1").model.weights);

  TrainConfig parallel = cfg;
  parallel.jobs = 4;
  const auto par = train_one_vs_all(sets, parallel);
  for (const auto& set : sets) {
    // replay each genre as a single training run
    TrainConfig gc = cfg;
    gc.seed = genre_seed(cfg.seed, set.genre);
    const auto cv = cv_select_c(*set.features, set.labels, gc);
    const auto m = train_binary(*set.features, set.labels, cv.chosen_c, gc);
    const auto& got = all.at(set.genre).model;
    CHECK(got.weights == m.weights);
    CHECK(got.bias == m.bias);
    CHECK(got.c == cv.chosen_c);
    CHECK(par.at(set.genre).model.weights == m.weights);
  }

  std::vector<int> one_class(40, 1);
  const GenreTrainingSet broken[] = {{"Samba", &features[0], one_class}};
  try {
    train_one_vs_all(broken, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("Samba") != std::string::npos);
  }
}

TEST_CASE("sparse and dense features train identically") {
  Rng rng(9);
  const auto p = random_problem(rng, 30, 6, 0.5, 1.0);
  const auto dense = p.features();
  SparseMatrix sparse(6);
  for (const auto& row : p.x) {
    std::vector<SparseEntry> entries;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j % 3 != 1) entries.push_back({j, row[j]});
    }
    sparse.append_row(entries);
  }
  auto masked = p.x;
  for (auto& row : masked) row[1] = row[4] = 0.0;
  const auto a = train_binary(sparse, p.y, 1.0, TrainConfig{});
  const auto b = train_binary(DenseMatrix::from_rows(masked), p.y, 1.0, TrainConfig{});
  REQUIRE(a.weights.size() == b.weights.size());
  for (std::size_t j = 0; j < 6; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-12));
}

TEST_CASE("model files round trip exactly") {
  LinearModel m;
  m.weights = {0.1, -1.0 / 3.0, 1e-300, 0.0, 123456.789};
  m.bias = -0.7;
  m.c = 0.1;
  m.genre = "Pop/Rock";
  m.representation_tag = "mock:1:5";
  m.seed = 0xFFFFFFFFFFFFFFFFULL;
  m.centroid = CentroidTransform{{0.25, 1.0 / 7.0, -2.0, 0.0, 3.0}, CentroidSource::test_corpus};
  const auto dir = std::filesystem::temp_directory_path() / "lyricgenre_model_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / model_file_name(m.genre);
  save_model(path, m);
  const auto back = load_model(path);
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.c == m.c);
  CHECK(back.genre == m.genre);
  CHECK(back.seed == m.seed);
  REQUIRE(back.centroid);
  CHECK(back.centroid->mean == m.centroid->mean);
  CHECK(back.centroid->source == CentroidSource::test_corpus);

  LinearModel sparse;
  sparse.weights = {0.0, 0.0, 2.5, 0.0, -1e-17};
  sparse.genre = "Rock";
  sparse.representation_tag = "bow";
  const auto json = model_to_json(sparse);
  CHECK(json.at("weights").at("indices") == nlohmann::json::array({2, 4}));
  CHECK(model_from_json(json).weights == sparse.weights);
  save_model(dir / model_file_name(sparse.genre), sparse);

  const auto models = load_models(dir);
  CHECK(models.size() == 2);
  CHECK(model_file_name("Pop/Rock") != model_file_name("Pop Rock"));
  std::filesystem::remove_all(dir);
}
