// Copyright 2026 The pathsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHSIG_MATRIX_H_
#define PATHSIG_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pathsig {

// Row-major f64 matrix. Every constructed matrix has rows, cols >= 1 and finite
// entries; a default-constructed matrix is the empty placeholder (0x0).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  // Nested-list literal, mostly for tests: FromRows({{1, 2}, {3, 4}}).
  static DenseMatrix FromRows(
      std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix RowVector(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }
  std::span<double> mutable_row(std::size_t r) {
    return std::span<double>(values_).subspan(r * cols_, cols_);
  }

  bool SameShape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  // Throws kNumeric if any entry is NaN or infinite.
  void CheckFinite() const;

  // Shape and values equal under ==, which is exact for finite doubles up to
  // the sign of zero. Use BitEqual when that matters.
  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Shape and byte-for-byte value equality.
bool BitEqual(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace pathsig

#endif  // PATHSIG_MATRIX_H_
