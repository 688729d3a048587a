#pragma once

// Independent reference implementations used only by tests. None of these
// call into the code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// F1 by counting every (truth, prediction) pair category directly, then
/// the closed form 2tp / (2tp + fp + fn), which equals 2PR / (P + R).
inline double f1(const std::vector<int>& truth, const std::vector<int>& pred) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1 && pred[i] == 1) tp += 1;
    if (truth[i] != 1 && pred[i] == 1) fp += 1;
    if (truth[i] == 1 && pred[i] != 1) fn += 1;
  }
  if (tp == 0) return 0.0;
  return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

/// Primal SVM objective with the bias folded into the regularizer.
inline double svm_primal(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w, double b,
                         double c, bool fit_bias) {
  double reg = 0;
  for (double v : w) reg += v * v;
  if (fit_bias) reg += b * b;
  double loss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[i][j];
    loss += std::max(0.0, 1.0 - y[i] * s);
  }
  return 0.5 * reg + c * loss;
}

struct SubgradientResult {
  std::vector<double> w;
  double b = 0;
  double best_objective = 0;
};

/// Full-batch projected subgradient descent on the primal. Steps 1/t
/// (strong convexity 1), iterates projected onto the ball that must contain
/// the optimum (|w|^2 <= 2 C n), and the best of iterates / running
/// averages is returned.
inline SubgradientResult svm_subgradient(const Matrix& x, const std::vector<int>& y, double c, bool fit_bias,
                                         int iterations) {
  const std::size_t n = x.size(), d = x.front().size();
  const std::size_t dim = d + (fit_bias ? 1 : 0);
  auto aug = [&](std::size_t i, std::size_t j) { return j < d ? x[i][j] : 1.0; };
  const double radius = std::sqrt(2.0 * c * static_cast<double>(n));
  std::vector<double> w(dim, 0.0), avg(dim, 0.0), g(dim);
  auto objective = [&](const std::vector<double>& v) {
    std::vector<double> wv(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
    return svm_primal(x, y, wv, fit_bias ? v[d] : 0.0, c, fit_bias);
  };
  SubgradientResult best;
  best.best_objective = objective(w);
  best.w.assign(d, 0.0);
  for (int t = 1; t <= iterations; ++t) {
    g = w;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < dim; ++j) s += w[j] * aug(i, j);
      if (y[i] * s < 1.0) {
        for (std::size_t j = 0; j < dim; ++j) g[j] -= c * y[i] * aug(i, j);
      }
    }
    const double eta = 1.0 / t;
    for (std::size_t j = 0; j < dim; ++j) w[j] -= eta * g[j];
    double norm = 0;
    for (double v : w) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > radius) {
      for (double& v : w) v *= radius / norm;
    }
    for (std::size_t j = 0; j < dim; ++j) avg[j] += (w[j] - avg[j]) / t;
    if (t % 64 == 0 || t == iterations) {
      for (const auto* cand : {&w, &avg}) {
        const double f = objective(*cand);
        if (f < best.best_objective) {
          best.best_objective = f;
          best.w.assign(cand->begin(), cand->begin() + static_cast<std::ptrdiff_t>(d));
          best.b = fit_bias ? (*cand)[d] : 0.0;
        }
      }
    }
  }
  return best;
}

/// Dense TF-IDF: raw counts times ln((1+n)/(1+df))+1, rows L2-normalized.
inline Matrix dense_tfidf(const std::vector<std::vector<std::string>>& docs_tokens,
                          const std::vector<std::string>& columns,
                          const std::vector<std::vector<std::string>>& fit_docs_tokens) {
  const double n = static_cast<double>(fit_docs_tokens.size());
  std::vector<double> idf(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    double df = 0;
    for (const auto& d : fit_docs_tokens) df += std::find(d.begin(), d.end(), columns[c]) != d.end() ? 1 : 0;
    idf[c] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
  }
  Matrix m(docs_tokens.size(), std::vector<double>(columns.size(), 0.0));
  for (std::size_t r = 0; r < docs_tokens.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      double count = 0;
      for (const auto& t : docs_tokens[r]) count += t == columns[c] ? 1 : 0;
      m[r][c] = count * idf[c];
    }
    double sq = 0;
    for (double v : m[r]) sq += v * v;
    if (sq > 0) {
      for (double& v : m[r]) v /= std::sqrt(sq);
    }
  }
  return m;
}

}  // namespace oracle
