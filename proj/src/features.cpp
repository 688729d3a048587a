#include "lyricgenre/features.hpp"

#include <cmath>

#include "lyricgenre/error.hpp"

namespace lyricgenre {

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  DenseMatrix m;
  for (const auto& r : rows) m.append_row(std::span<const double>(r));
  return m;
}

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw DataError("row has dimension " + std::to_string(values.size()) + ", expected " +
                    std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void DenseMatrix::append_row(std::span<const float> values) {
  std::vector<double> tmp(values.begin(), values.end());
  append_row(std::span<const double>(tmp));
}

double DenseMatrix::dot(std::size_t row, std::span<const double> w) const {
  const double* x = data_.data() + row * cols_;
  double s = 0;
  for (std::size_t j = 0; j < cols_; ++j) s += x[j] * w[j];
  return s;
}

void DenseMatrix::axpy(std::size_t row, double scale, std::span<double> w) const {
  const double* x = data_.data() + row * cols_;
  for (std::size_t j = 0; j < cols_; ++j) w[j] += scale * x[j];
}

double DenseMatrix::squared_norm(std::size_t row) const {
  const double* x = data_.data() + row * cols_;
  double s = 0;
  for (std::size_t j = 0; j < cols_; ++j) s += x[j] * x[j];
  return s;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(0, cols_);
  out.data_.reserve(indices.size() * cols_);
  for (auto i : indices) out.append_row(row(i));
  return out;
}

void SparseMatrix::append_row(std::span<const SparseEntry> entries) {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].index >= cols_) throw DataError("sparse column index out of range");
    if (k && entries[k].index <= entries[k - 1].index) {
      throw DataError("sparse row indices must be strictly increasing");
    }
  }
  entries_.insert(entries_.end(), entries.begin(), entries.end());
  offsets_.push_back(entries_.size());
}

double SparseMatrix::dot(std::size_t r, std::span<const double> w) const {
  double s = 0;
  for (const auto& e : row(r)) s += e.value * w[e.index];
  return s;
}

void SparseMatrix::axpy(std::size_t r, double scale, std::span<double> w) const {
  for (const auto& e : row(r)) w[e.index] += scale * e.value;
}

double SparseMatrix::squared_norm(std::size_t r) const {
  double s = 0;
  for (const auto& e : row(r)) s += e.value * e.value;
  return s;
}

bool SparseMatrix::all_finite() const {
  for (const auto& e : entries_) {
    if (!std::isfinite(e.value)) return false;
  }
  return true;
}

bool RowSubset::all_finite() const { return base_->all_finite(); }

}  // namespace lyricgenre
