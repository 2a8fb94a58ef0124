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

#include "pathsig/class_stats.h"

#include <cmath>

#include "json.hpp"
#include "pathsig/error.h"
#include "pathsig/npy.h"

namespace pathsig {
namespace {

double BinaryEntropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

std::filesystem::path WithSuffix(const std::filesystem::path& stem,
                                 const char* suffix) {
  std::filesystem::path p = stem;
  p += suffix;
  return p;
}

}  // namespace

BernoulliClassModel::BernoulliClassModel(int class_id, std::size_t rows,
                                         std::size_t cols)
    : class_id_(class_id), counts_(rows, cols, 0.0) {}

BernoulliClassModel::BernoulliClassModel(int class_id, DenseMatrix counts,
                                         std::size_t sample_count)
    : class_id_(class_id),
      counts_(std::move(counts)),
      sample_count_(sample_count) {
  const double limit = static_cast<double>(sample_count);
  for (double c : counts_.values()) {
    if (c < 0 || c > limit || c != std::floor(c)) {
      throw Error(ErrorCode::kRange,
                  "class counts must be whole numbers in [0, sample_count]");
    }
  }
}

void BernoulliClassModel::Accumulate(const SignificanceMask& mask) {
  if (mask.rows() != counts_.rows() || mask.cols() != counts_.cols()) {
    throw Error(ErrorCode::kShape,
                "mask " + std::to_string(mask.rows()) + "x" +
                    std::to_string(mask.cols()) + " does not match model " +
                    std::to_string(counts_.rows()) + "x" +
                    std::to_string(counts_.cols()));
  }
  auto counts = counts_.mutable_values();
  const auto bits = mask.bits();
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += bits[k];
  ++sample_count_;
}

BernoulliClassModel Merge(const BernoulliClassModel& a,
                          const BernoulliClassModel& b) {
  if (a.class_id() != b.class_id()) {
    throw Error(ErrorCode::kUsage, "cannot merge class " +
                                       std::to_string(a.class_id()) +
                                       " with class " +
                                       std::to_string(b.class_id()));
  }
  if (!a.counts().SameShape(b.counts())) {
    throw Error(ErrorCode::kShape, "cannot merge models of different shapes");
  }
  DenseMatrix counts = a.counts();
  auto out = counts.mutable_values();
  const auto other = b.counts().values();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += other[k];
  return BernoulliClassModel(a.class_id(), std::move(counts),
                             a.sample_count() + b.sample_count());
}

BernoulliClassModel OverallModel(std::span<const BernoulliClassModel> models) {
  if (models.empty()) {
    throw Error(ErrorCode::kUsage, "overall model needs at least one class");
  }
  BernoulliClassModel overall(kOverallClassId, models.front().rows(),
                              models.front().cols());
  for (const BernoulliClassModel& m : models) {
    overall = Merge(overall, BernoulliClassModel(kOverallClassId, m.counts(),
                                                 m.sample_count()));
  }
  return overall;
}

ProbabilityMatrix Finalize(const BernoulliClassModel& model, double alpha) {
  if (model.sample_count() == 0) {
    throw Error(ErrorCode::kRange, "class " + std::to_string(model.class_id()) +
                                       " has no samples");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kRange, "smoothing alpha must be >= 0");
  }
  const double denom = static_cast<double>(model.sample_count()) + 2.0 * alpha;
  DenseMatrix p(model.rows(), model.cols());
  auto out = p.mutable_values();
  const auto counts = model.counts().values();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (counts[k] + alpha) / denom;
  }
  return {std::move(p), alpha};
}

double ClassEntropy(const DenseMatrix& p) {
  double total = 0.0;
  for (double v : p.values()) {
    if (v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kRange, "probability outside [0, 1]");
    }
    total += BinaryEntropy(v);
  }
  return total / static_cast<double>(p.size());
}

std::vector<std::size_t> ClassModelSet::PopulatedClasses() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < models.size(); ++c) {
    if (models[c].sample_count() > 0) out.push_back(c);
  }
  return out;
}

ClassModelSet AccumulateDump(const ActivationDump& dump, ThresholdMode mode) {
  ClassModelSet set;
  set.class_names = dump.manifest.class_names;
  const std::size_t rows = dump.weights.rows();
  const std::size_t cols = dump.weights.cols();
  for (std::size_t c = 0; c < set.class_names.size(); ++c) {
    set.models.emplace_back(static_cast<int>(c), rows, cols);
  }
  set.overall = BernoulliClassModel(kOverallClassId, rows, cols);
  ForEachSampleMask(dump, mode,
                    [&](std::size_t, int class_id, const SignificanceMask& m) {
                      set.models[static_cast<std::size_t>(class_id)].Accumulate(m);
                      set.overall.Accumulate(m);
                    });
  return set;
}

void SaveModel(const BernoulliClassModel& model, double alpha,
               const std::filesystem::path& stem) {
  WriteArray(model.counts(), WithSuffix(stem, ".npy"), Dtype::kF64);
  nlohmann::json sidecar;
  sidecar["class_id"] = model.class_id();
  sidecar["sample_count"] = model.sample_count();
  sidecar["alpha"] = alpha;
  sidecar["counts_file"] = WithSuffix(stem, ".npy").filename().string();
  WriteFileBytes(WithSuffix(stem, ".json"), sidecar.dump(2) + "\n");
}

BernoulliClassModel LoadModel(const std::filesystem::path& stem,
                              double* alpha) {
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(ReadFileBytes(WithSuffix(stem, ".json")));
    if (alpha) *alpha = sidecar.at("alpha").get<double>();
    DenseMatrix counts = ReadArray(WithSuffix(stem, ".npy"));
    return BernoulliClassModel(sidecar.at("class_id").get<int>(),
                               std::move(counts),
                               sidecar.at("sample_count").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat,
                "bad model sidecar " + stem.string() + ": " + e.what());
  }
}

}  // namespace pathsig
