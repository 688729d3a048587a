#include "lyricgenre/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lyricgenre/error.hpp"
#include "lyricgenre/metrics.hpp"
#include "lyricgenre/parallel.hpp"
#include "lyricgenre/random.hpp"

namespace lyricgenre {

void TrainConfig::validate() const {
  if (c_grid.empty()) throw UsageError("C grid is empty");
  for (double c : c_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("C values must be positive and finite");
  }
  if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
  if (max_epochs < 1) throw UsageError("max_epochs must be positive");
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be positive");
}

namespace {

void check_training_input(const FeatureSet& features, std::span<const int> labels) {
  if (features.rows() != labels.size()) {
    throw DataError("feature rows (" + std::to_string(features.rows()) + ") and labels (" +
                    std::to_string(labels.size()) + ") differ");
  }
  std::size_t pos = 0, neg = 0;
  for (int y : labels) {
    if (y == 1) {
      ++pos;
    } else if (y == -1) {
      ++neg;
    } else {
      throw DataError("labels must be +1 or -1");
    }
  }
  if (pos == 0 || neg == 0) {
    throw NumericError("degenerate labels: training needs both classes (got " + std::to_string(pos) +
                       " positive, " + std::to_string(neg) + " negative)");
  }
  if (!features.all_finite()) throw NumericError("non-finite feature value in training data");
}

double dual_value(std::span<const double> alpha, const LinearModel& m, bool fit_bias) {
  double sq = 0;
  for (double w : m.weights) sq += w * w;
  if (fit_bias) sq += m.bias * m.bias;
  return std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * sq;
}

}  // namespace

LinearModel train_binary(const FeatureSet& features, std::span<const int> labels, double c,
                         const TrainConfig& config, SolverTrace* trace) {
  if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("C must be positive and finite");
  if (config.max_epochs < 1 || !(config.tolerance > 0.0)) config.validate();
  check_training_input(features, labels);

  const std::size_t n = features.rows();
  const double bias_term = config.fit_bias ? 1.0 : 0.0;

  LinearModel model;
  model.weights.assign(features.dimension(), 0.0);
  model.c = c;
  model.seed = config.seed;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> qii(n);
  for (std::size_t i = 0; i < n; ++i) qii[i] = features.squared_norm(i) + bias_term;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);

  int epoch = 0;
  bool converged = false;
  double max_violation = 0.0;
  while (epoch < config.max_epochs) {
    ++epoch;
    rng.shuffle(std::span<std::size_t>(order));
    max_violation = 0.0;
    for (const std::size_t i : order) {
      const double y = labels[i];
      const double g = y * (features.dot(i, model.weights) + model.bias * bias_term) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= c) {
        pg = std::max(g, 0.0);
      }
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0 || qii[i] <= 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qii[i], 0.0, c);
      const double step = (alpha[i] - old) * y;
      if (step != 0.0) {
        features.axpy(i, step, model.weights);
        model.bias += step * bias_term;
      }
    }
    if (trace && trace->record_objective) {
      trace->primal_per_epoch.push_back(primal_objective(model, features, labels, config.fit_bias));
      trace->dual_per_epoch.push_back(dual_value(alpha, model, config.fit_bias));
    }
    if (max_violation < config.tolerance) {
      converged = true;
      break;
    }
  }

  for (double w : model.weights) {
    if (!std::isfinite(w)) throw NumericError("solver diverged (non-finite weight)");
  }
  if (trace) {
    trace->epochs = epoch;
    trace->converged = converged;
    trace->max_violation = max_violation;
    trace->alpha = std::move(alpha);
  }
  return model;
}

double primal_objective(const LinearModel& model, const FeatureSet& features, std::span<const int> labels,
                        bool fit_bias) {
  double sq = 0;
  for (double w : model.weights) sq += w * w;
  if (fit_bias) sq += model.bias * model.bias;
  double loss = 0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    loss += std::max(0.0, 1.0 - labels[i] * decision(model, features, i));
  }
  return 0.5 * sq + model.c * loss;
}

double decision(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size()) {
    throw DataError("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                    std::to_string(model.weights.size()));
  }
  double s = model.bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
  return s;
}

double decision(const LinearModel& model, const FeatureSet& features, std::size_t row) {
  if (features.dimension() != model.weights.size()) {
    throw DataError("feature dimension " + std::to_string(features.dimension()) +
                    " does not match model dimension " + std::to_string(model.weights.size()));
  }
  return features.dot(row, model.weights) + model.bias;
}

int predict(const LinearModel& model, std::span<const double> x) { return decision(model, x) >= 0.0 ? 1 : -1; }

std::vector<int> predict_all(const LinearModel& model, const FeatureSet& features) {
  std::vector<int> out(features.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = decision(model, features, i) >= 0.0 ? 1 : -1;
  return out;
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  const auto k = static_cast<std::size_t>(folds);
  if (pos.size() < k || neg.size() < k) {
    throw DataError("cannot stratify " + std::to_string(pos.size()) + " positive / " +
                    std::to_string(neg.size()) + " negative examples across " + std::to_string(folds) +
                    " folds");
  }
  Rng rng(SeedHasher(seed).add("folds").value());
  std::vector<int> fold(labels.size());
  for (auto* cls : {&pos, &neg}) {
    rng.shuffle(std::span<std::size_t>(*cls));
    for (std::size_t r = 0; r < cls->size(); ++r) fold[(*cls)[r]] = static_cast<int>(r % k);
  }
  return fold;
}

double CvReport::mean_f1(double c) const {
  const auto& v = per_c.at(c);
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

CvReport cv_select_c(const FeatureSet& features, std::span<const int> labels, const TrainConfig& config) {
  config.validate();
  const auto fold = stratified_folds(labels, config.folds, config.seed);
  std::vector<double> grid = config.c_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto k = static_cast<std::size_t>(config.folds);
  std::vector<double> scores(grid.size() * k);
  parallel_for(scores.size(), config.jobs, [&](std::size_t task) {
    const std::size_t ci = task / k;
    const int f = static_cast<int>(task % k);
    std::vector<std::size_t> train_rows, test_rows;
    std::vector<int> train_labels, test_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (fold[i] == f) {
        test_rows.push_back(i);
        test_labels.push_back(labels[i]);
      } else {
        train_rows.push_back(i);
        train_labels.push_back(labels[i]);
      }
    }
    const RowSubset train(features, std::move(train_rows));
    const RowSubset test(features, std::move(test_rows));
    TrainConfig fold_config = config;
    fold_config.seed = SeedHasher(config.seed).add("fold").add(static_cast<std::uint64_t>(f)).value();
    const LinearModel m = train_binary(train, train_labels, grid[ci], fold_config);
    scores[task] = f1_score(test_labels, predict_all(m, test));
  });

  CvReport report;
  double best = -1.0;
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    auto& v = report.per_c[grid[ci]];
    v.assign(scores.begin() + static_cast<std::ptrdiff_t>(ci * k),
             scores.begin() + static_cast<std::ptrdiff_t>((ci + 1) * k));
    const double mean = report.mean_f1(grid[ci]);
    if (mean > best) {
      best = mean;
      report.chosen_c = grid[ci];
    }
  }
  return report;
}

std::uint64_t genre_seed(std::uint64_t base_seed, const std::string& genre) {
  return SeedHasher(base_seed).add("genre").add(genre).value();
}

std::map<std::string, TrainedGenre> train_one_vs_all(std::span<const GenreTrainingSet> sets,
                                                     const TrainConfig& config) {
  config.validate();
  std::vector<std::optional<TrainedGenre>> slots(sets.size());
  TrainConfig inner = config;
  inner.jobs = 1;
  parallel_for(sets.size(), config.jobs, [&](std::size_t g) {
    const auto& set = sets[g];
    try {
      if (!set.features) throw UsageError("missing features");
      TrainConfig genre_config = inner;
      genre_config.seed = genre_seed(config.seed, set.genre);
      CvReport cv = cv_select_c(*set.features, set.labels, genre_config);
      LinearModel model = train_binary(*set.features, set.labels, cv.chosen_c, genre_config);
      model.genre = set.genre;
      slots[g] = TrainedGenre{std::move(model), std::move(cv)};
    } catch (const Error& e) {
      rethrow_with_context(e, "genre '" + set.genre + "'");
    }
  });
  std::map<std::string, TrainedGenre> out;
  for (std::size_t g = 0; g < sets.size(); ++g) {
    if (!out.emplace(sets[g].genre, std::move(*slots[g])).second) {
      throw UsageError("duplicate genre '" + sets[g].genre + "' in one-vs-all training");
    }
  }
  return out;
}

}  // namespace lyricgenre
