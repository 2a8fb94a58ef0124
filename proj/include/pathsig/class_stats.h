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

#ifndef PATHSIG_CLASS_STATS_H_
#define PATHSIG_CLASS_STATS_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pathsig/dump.h"
#include "pathsig/interactions.h"
#include "pathsig/matrix.h"

namespace pathsig {

// Jeffreys prior pseudo-count.
inline constexpr double kDefaultAlpha = 0.5;

// Class id carried by the label-agnostic model.
inline constexpr int kOverallClassId = -1;

// Per-class significance counts over a stream of masks. Counts are whole
// numbers stored as doubles (exact below 2^53), so accumulation order never
// changes the result.
class BernoulliClassModel {
 public:
  BernoulliClassModel() = default;
  BernoulliClassModel(int class_id, std::size_t rows, std::size_t cols);
  // Restores a model from saved counts; validates 0 <= counts <= sample_count
  // and integrality.
  BernoulliClassModel(int class_id, DenseMatrix counts, std::size_t sample_count);

  int class_id() const { return class_id_; }
  const DenseMatrix& counts() const { return counts_; }
  std::size_t sample_count() const { return sample_count_; }
  std::size_t rows() const { return counts_.rows(); }
  std::size_t cols() const { return counts_.cols(); }

  void Accumulate(const SignificanceMask& mask);

  bool operator==(const BernoulliClassModel&) const = default;

 private:
  int class_id_ = 0;
  DenseMatrix counts_;
  std::size_t sample_count_ = 0;
};

// Sums counts and sample counts. Requires matching class id and shape.
BernoulliClassModel Merge(const BernoulliClassModel& a,
                          const BernoulliClassModel& b);

// Label-agnostic model: the merge of every class model, relabelled as
// kOverallClassId.
BernoulliClassModel OverallModel(std::span<const BernoulliClassModel> models);

struct ProbabilityMatrix {
  DenseMatrix p;
  double alpha = kDefaultAlpha;
};

// p_ij = (counts_ij + alpha) / (N_c + 2 alpha). Throws kRange when N_c == 0.
ProbabilityMatrix Finalize(const BernoulliClassModel& model,
                           double alpha = kDefaultAlpha);

// Mean binary entropy in nats over all coordinates, with 0 ln 0 = 0.
double ClassEntropy(const DenseMatrix& p);
inline double ClassEntropy(const ProbabilityMatrix& p) {
  return ClassEntropy(p.p);
}

// Every class of a dump (including classes with no samples) plus the
// label-agnostic model, built in one pass over the dump's masks.
struct ClassModelSet {
  std::vector<std::string> class_names;
  std::vector<BernoulliClassModel> models;  // index == class id
  BernoulliClassModel overall;

  // Indices of classes with at least one sample.
  std::vector<std::size_t> PopulatedClasses() const;
};

ClassModelSet AccumulateDump(const ActivationDump& dump, ThresholdMode mode);

// counts as <stem>.npy (f64) and a <stem>.json sidecar holding class_id,
// sample_count and the alpha the analysis used.
void SaveModel(const BernoulliClassModel& model, double alpha,
               const std::filesystem::path& stem);
BernoulliClassModel LoadModel(const std::filesystem::path& stem,
                              double* alpha = nullptr);

}  // namespace pathsig

#endif  // PATHSIG_CLASS_STATS_H_
