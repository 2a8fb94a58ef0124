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

#include "pathsig/interactions.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "pathsig/error.h"

namespace pathsig {
namespace {

// Linear-interpolation quantile of an unsorted buffer (reorders it).
double QuantileInPlace(std::vector<double>& v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

void FillInteractions(const DenseMatrix& w, std::span<const double> a,
                      DenseMatrix& out) {
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto wr = w.row(i);
    auto nr = out.mutable_row(i);
    for (std::size_t j = 0; j < wr.size(); ++j) nr[j] = wr[j] * a[j];
  }
}

void FillSignificance(const DenseMatrix& n, SignificanceMask& mask,
                      std::vector<double>& scratch) {
  const ThresholdMode& mode = mask.mode();
  const double width = static_cast<double>(n.cols());
  for (std::size_t i = 0; i < n.rows(); ++i) {
    const auto row = n.row(i);
    double threshold = 0.0;
    switch (mode.kind) {
      case ThresholdMode::Kind::kLiteral: {
        double sum = 0.0;
        for (double v : row) sum += v;
        threshold = width * sum;
        break;
      }
      case ThresholdMode::Kind::kRowMeanAbs: {
        double sum = 0.0;
        for (double v : row) sum += std::abs(v);
        threshold = sum / width;
        break;
      }
      case ThresholdMode::Kind::kQuantile: {
        scratch.resize(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) scratch[j] = std::abs(row[j]);
        threshold = QuantileInPlace(scratch, mode.q);
        break;
      }
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      mask.set(i, j, std::abs(row[j]) > threshold);
    }
  }
}

}  // namespace

ThresholdMode ThresholdMode::Quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kUsage, "quantile threshold must lie in [0, 1]");
  }
  return {Kind::kQuantile, q};
}

ThresholdMode ThresholdMode::Parse(std::string_view text) {
  if (text == "literal") return Literal();
  if (text == "row-mean-abs") return RowMeanAbs();
  constexpr std::string_view kPrefix = "quantile:";
  if (text.substr(0, kPrefix.size()) == kPrefix) {
    const std::string number(text.substr(kPrefix.size()));
    char* end = nullptr;
    const double q = std::strtod(number.c_str(), &end);
    if (number.empty() || end != number.c_str() + number.size()) {
      throw Error(ErrorCode::kUsage, "bad quantile in threshold mode '" +
                                         std::string(text) + "'");
    }
    return Quantile(q);
  }
  throw Error(ErrorCode::kUsage,
              "unknown threshold mode '" + std::string(text) +
                  "' (literal | row-mean-abs | quantile:<q>)");
}

std::string ThresholdMode::ToString() const {
  switch (kind) {
    case Kind::kLiteral: return "literal";
    case Kind::kRowMeanAbs: return "row-mean-abs";
    case Kind::kQuantile: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), q);
      return "quantile:" + std::string(buf, ptr);
    }
  }
  return "literal";
}

SignificanceMask::SignificanceMask(std::size_t rows, std::size_t cols,
                                   ThresholdMode mode)
    : rows_(rows), cols_(cols), mode_(mode), bits_(rows * cols, 0) {}

std::size_t SignificanceMask::CountSignificant() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

double SignificanceMask::Density() const {
  return bits_.empty() ? 0.0
                       : static_cast<double>(CountSignificant()) /
                             static_cast<double>(bits_.size());
}

DenseMatrix SignificanceMask::ToMatrix() const {
  std::vector<double> values(bits_.begin(), bits_.end());
  return DenseMatrix(rows_, cols_, std::move(values));
}

SignificanceMask SignificanceMask::FromMatrix(const DenseMatrix& m,
                                              ThresholdMode mode) {
  SignificanceMask mask(m.rows(), m.cols(), mode);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::kRange, "mask entries must be 0 or 1");
      }
      mask.set(r, c, v == 1.0);
    }
  }
  return mask;
}

DenseMatrix InteractionMatrix(const DenseMatrix& weights,
                              std::span<const double> activations) {
  if (weights.empty() || activations.size() != weights.cols()) {
    throw Error(ErrorCode::kShape,
                "activation length " + std::to_string(activations.size()) +
                    " != weight cols " + std::to_string(weights.cols()));
  }
  for (double a : activations) {
    if (!std::isfinite(a)) {
      throw Error(ErrorCode::kNumeric, "non-finite activation");
    }
  }
  DenseMatrix out(weights.rows(), weights.cols());
  FillInteractions(weights, activations, out);
  out.CheckFinite();
  return out;
}

SignificanceMask ComputeSignificance(const DenseMatrix& interactions,
                                     ThresholdMode mode) {
  SignificanceMask mask(interactions.rows(), interactions.cols(), mode);
  std::vector<double> scratch;
  FillSignificance(interactions, mask, scratch);
  return mask;
}

void ForEachSampleMask(const ActivationDump& dump, ThresholdMode mode,
                       const MaskVisitor& visit) {
  const DenseMatrix& w = dump.weights;
  if (dump.activations.cols() != w.cols()) {
    throw Error(ErrorCode::kShape, "dump activation/weight width mismatch");
  }
  DenseMatrix n(w.rows(), w.cols());
  SignificanceMask mask(w.rows(), w.cols(), mode);
  std::vector<double> scratch;
  for (std::size_t s = 0; s < dump.sample_count(); ++s) {
    FillInteractions(w, dump.activations.row(s), n);
    FillSignificance(n, mask, scratch);
    visit(s, dump.labels[s], mask);
  }
}

}  // namespace pathsig
