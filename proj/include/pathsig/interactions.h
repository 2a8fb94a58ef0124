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

#ifndef PATHSIG_INTERACTIONS_H_
#define PATHSIG_INTERACTIONS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathsig/dump.h"
#include "pathsig/matrix.h"

namespace pathsig {

// N = W diag(a): entry (i, j) is w_ij * a_j, the contribution of input j to
// the pre-activation of unit i (bias excluded).
DenseMatrix InteractionMatrix(const DenseMatrix& weights,
                              std::span<const double> activations);

// Rule deciding whether |N_ij| is significant within row i.
//   kLiteral     |N_ij| > n * sum_k N_ik  (signed row sum, n = input size)
//   kRowMeanAbs  |N_ij| > (1/n) * sum_k |N_ik|
//   kQuantile    |N_ij| > q-quantile of |N_i.| (linear interpolation)
// All comparisons are strict, so ties are not significant.
struct ThresholdMode {
  enum class Kind { kLiteral, kRowMeanAbs, kQuantile };

  Kind kind = Kind::kLiteral;
  double q = 0.0;

  static ThresholdMode Literal() { return {}; }
  static ThresholdMode RowMeanAbs() { return {Kind::kRowMeanAbs, 0.0}; }
  static ThresholdMode Quantile(double q);

  // "literal", "row-mean-abs" or "quantile:<q>".
  static ThresholdMode Parse(std::string_view text);
  std::string ToString() const;

  bool operator==(const ThresholdMode&) const = default;
};

class SignificanceMask {
 public:
  SignificanceMask() = default;
  SignificanceMask(std::size_t rows, std::size_t cols, ThresholdMode mode);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const ThresholdMode& mode() const { return mode_; }

  bool operator()(std::size_t r, std::size_t c) const {
    return bits_[r * cols_ + c] != 0;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    bits_[r * cols_ + c] = v ? 1 : 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t CountSignificant() const;
  double Density() const;

  // 0/1 matrix, used for NPY export.
  DenseMatrix ToMatrix() const;
  static SignificanceMask FromMatrix(const DenseMatrix& m, ThresholdMode mode);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ThresholdMode mode_;
  std::vector<std::uint8_t> bits_;
};

SignificanceMask ComputeSignificance(const DenseMatrix& interactions,
                                     ThresholdMode mode = ThresholdMode::Literal());

// Visits one mask per sample of the dump, in dump order. Only one interaction
// matrix and one mask are alive at a time.
using MaskVisitor = std::function<void(std::size_t sample, int class_id,
                                       const SignificanceMask& mask)>;
void ForEachSampleMask(const ActivationDump& dump, ThresholdMode mode,
                       const MaskVisitor& visit);

}  // namespace pathsig

#endif  // PATHSIG_INTERACTIONS_H_
