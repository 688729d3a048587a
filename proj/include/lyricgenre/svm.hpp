#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyricgenre/embedding.hpp"
#include "lyricgenre/features.hpp"

namespace lyricgenre {

struct TrainConfig {
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0};
  int folds = 5;
  int max_epochs = 1000;
  /// stop once the largest projected-gradient magnitude in an epoch drops below this
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  /// augment features with a constant 1 so the bias is learned (and regularized)
  bool fit_bias = true;
  /// workers for the (C, fold) grid; the result does not depend on it
  unsigned jobs = 1;

  void validate() const;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double c = 1.0;
  std::string genre;
  std::string representation_tag;
  std::optional<CentroidTransform> centroid;
  std::uint64_t seed = 0;

  std::size_t dimension() const { return weights.size(); }
};

struct SolverTrace {
  int epochs = 0;
  bool converged = false;
  double max_violation = 0.0;
  std::vector<double> alpha;
  /// primal objective after each epoch; only filled when record_objective is set
  std::vector<double> primal_per_epoch;
  std::vector<double> dual_per_epoch;
  bool record_objective = false;
};

/// L2-regularized L1-hinge linear SVM by dual coordinate descent:
///   min_w  1/2 |w|^2 + C sum_i max(0, 1 - y_i (w . x_i + b))
/// Coordinates are visited in an order reshuffled from `config.seed` every
/// epoch. Throws NumericError for single-class labels or non-finite features.
LinearModel train_binary(const FeatureSet& features, std::span<const int> labels, double c,
                         const TrainConfig& config, SolverTrace* trace = nullptr);

/// Primal objective of (w, b); with fit_bias the bias enters the regularizer.
double primal_objective(const LinearModel& model, const FeatureSet& features, std::span<const int> labels,
                        bool fit_bias);

double decision(const LinearModel& model, std::span<const double> x);
double decision(const LinearModel& model, const FeatureSet& features, std::size_t row);
/// sign of the decision value, with sign(0) = +1
int predict(const LinearModel& model, std::span<const double> x);
std::vector<int> predict_all(const LinearModel& model, const FeatureSet& features);

/// Stratified fold assignment: each class is shuffled from `seed` and dealt
/// round-robin. Throws DataError when a class has fewer items than folds.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

struct CvReport {
  std::map<double, std::vector<double>> per_c;
  double chosen_c = 0.0;

  double mean_f1(double c) const;
};

/// k-fold grid search over config.c_grid; the best mean fold F1 wins, ties
/// go to the smaller C.
CvReport cv_select_c(const FeatureSet& features, std::span<const int> labels, const TrainConfig& config);

struct GenreTrainingSet {
  std::string genre;
  const FeatureSet* features = nullptr;
  std::vector<int> labels;
};

struct TrainedGenre {
  LinearModel model;
  CvReport cv;
};

/// Seed for one genre's model; depends only on the base seed and the genre.
std::uint64_t genre_seed(std::uint64_t base_seed, const std::string& genre);

/// Cross-validates C and refits on the full set, independently per genre.
std::map<std::string, TrainedGenre> train_one_vs_all(std::span<const GenreTrainingSet> sets,
                                                     const TrainConfig& config);

}  // namespace lyricgenre
