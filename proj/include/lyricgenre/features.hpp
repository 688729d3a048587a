#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace lyricgenre {

/// Row access used by the SVM solver. Dense embeddings and sparse TF-IDF
/// vectors both go through this interface so they train identically.
class FeatureSet {
 public:
  virtual ~FeatureSet() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual double dot(std::size_t row, std::span<const double> w) const = 0;
  /// w += scale * x_row
  virtual void axpy(std::size_t row, double scale, std::span<double> w) const = 0;
  virtual double squared_norm(std::size_t row) const = 0;
  virtual bool all_finite() const = 0;
};

class DenseMatrix final : public FeatureSet {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const override { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t dimension() const override { return cols_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  void append_row(std::span<const double> values);
  void append_row(std::span<const float> values);

  double dot(std::size_t row, std::span<const double> w) const override;
  void axpy(std::size_t row, double scale, std::span<double> w) const override;
  double squared_norm(std::size_t row) const override;
  bool all_finite() const override;

  DenseMatrix select_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SparseEntry {
  std::size_t index;
  double value;
};

/// Compressed sparse rows. Column indices within a row are strictly increasing.
class SparseMatrix final : public FeatureSet {
 public:
  explicit SparseMatrix(std::size_t cols = 0) : cols_(cols) { offsets_.push_back(0); }

  void append_row(std::span<const SparseEntry> entries);

  std::size_t rows() const override { return offsets_.size() - 1; }
  std::size_t dimension() const override { return cols_; }
  std::span<const SparseEntry> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  double dot(std::size_t row, std::span<const double> w) const override;
  void axpy(std::size_t row, double scale, std::span<double> w) const override;
  double squared_norm(std::size_t row) const override;
  bool all_finite() const override;

 private:
  std::size_t cols_;
  std::vector<SparseEntry> entries_;
  std::vector<std::size_t> offsets_;
};

/// A view of selected rows of another feature set (duplicates allowed).
/// The base must outlive the view.
class RowSubset final : public FeatureSet {
 public:
  RowSubset(const FeatureSet& base, std::vector<std::size_t> indices)
      : base_(&base), indices_(std::move(indices)) {}

  std::size_t rows() const override { return indices_.size(); }
  std::size_t dimension() const override { return base_->dimension(); }
  double dot(std::size_t row, std::span<const double> w) const override {
    return base_->dot(indices_[row], w);
  }
  void axpy(std::size_t row, double scale, std::span<double> w) const override {
    base_->axpy(indices_[row], scale, w);
  }
  double squared_norm(std::size_t row) const override { return base_->squared_norm(indices_[row]); }
  bool all_finite() const override;

 private:
  const FeatureSet* base_;
  std::vector<std::size_t> indices_;
};

}  // namespace lyricgenre
