#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace decepshap {

// Dense row-major matrix of feature values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  void append_row(std::span<const double> values) {
    if (values.size() != cols_) {
      throw std::invalid_argument("row width does not match matrix");
    }
    data_.insert(data_.end(), values.begin(), values.end());
  }

  // First `n` rows (or all of them when n >= rows()).
  FeatureMatrix head(std::size_t n) const {
    FeatureMatrix out(cols_);
    const std::size_t keep = n < rows() ? n : rows();
    out.data_.assign(data_.begin(), data_.begin() + keep * cols_);
    return out;
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace decepshap
