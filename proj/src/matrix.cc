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

#include "pathsig/matrix.h"

#include <cmath>
#include <cstring>
#include <string>

#include "pathsig/error.h"

namespace pathsig {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kCheck: return "check";
  }
  return "unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kShape, "matrix extents must be positive, got " +
                                       std::to_string(rows) + "x" +
                                       std::to_string(cols));
  }
  if (!std::isfinite(fill)) {
    throw Error(ErrorCode::kNumeric, "non-finite matrix fill value");
  }
  values_.assign(rows * cols, fill);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kShape, "matrix extents must be positive, got " +
                                       std::to_string(rows) + "x" +
                                       std::to_string(cols));
  }
  if (values_.size() != rows * cols) {
    throw Error(ErrorCode::kShape,
                "matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " given " + std::to_string(values_.size()) + " values");
  }
  CheckFinite();
}

DenseMatrix DenseMatrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw Error(ErrorCode::kShape, "ragged matrix literal");
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(values));
}

DenseMatrix DenseMatrix::RowVector(std::span<const double> values) {
  return DenseMatrix(1, values.size(),
                     std::vector<double>(values.begin(), values.end()));
}

void DenseMatrix::CheckFinite() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kNumeric,
                  "non-finite matrix entry at (" + std::to_string(i / cols_) +
                      ", " + std::to_string(i % cols_) + ")");
    }
  }
}

bool BitEqual(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.SameShape(b)) return false;
  return a.size() == 0 ||
         std::memcmp(a.values().data(), b.values().data(),
                     a.size() * sizeof(double)) == 0;
}

}  // namespace pathsig
