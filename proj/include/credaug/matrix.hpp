#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace credaug {

/// Dense row-major matrix of doubles. Rows are exposed as spans so callers
/// never do index arithmetic themselves.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix from_flat(std::size_t rows, std::size_t cols,
                          std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }

  /// Appends a row. The first append on an empty 0x0 matrix fixes the width.
  void append_row(std::span<const double> values);
  void append_rows(const Matrix& other);
  void reserve_rows(std::size_t n) { data_.reserve(n * cols_); }

  std::vector<double> column(std::size_t j) const;
  Matrix select_rows(std::span<const std::size_t> indices) const;

  const std::vector<double>& flat() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace credaug
