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

#include "pathsig/divergences.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pathsig/error.h"

namespace pathsig {
namespace {

// One coordinate of the Bernoulli KL.
double KlTerm(double p, double q) {
  if (p == q) return 0.0;
  double term = 0.0;
  if (p > 0.0) {
    if (q <= 0.0) return std::numeric_limits<double>::infinity();
    term += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q >= 1.0) return std::numeric_limits<double>::infinity();
    term += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return term;
}

}  // namespace

KlValue BernoulliKl(const DenseMatrix& p, const DenseMatrix& q) {
  if (!p.SameShape(q) || p.empty()) {
    throw Error(ErrorCode::kShape, "KL needs two probability matrices of one shape");
  }
  const auto pv = p.values();
  const auto qv = q.values();
  double total = 0.0;
  for (std::size_t k = 0; k < pv.size(); ++k) {
    if (pv[k] < 0.0 || pv[k] > 1.0 || qv[k] < 0.0 || qv[k] > 1.0) {
      throw Error(ErrorCode::kRange, "probability outside [0, 1]");
    }
    const double term = KlTerm(pv[k], qv[k]);
    if (!std::isfinite(term)) {
      throw Error(ErrorCode::kNumeric,
                  "KL is infinite: q on the boundary where p differs "
                  "(use smoothing alpha > 0)");
    }
    total += term;
  }
  return {total / static_cast<double>(pv.size()), total, pv.size()};
}

DivergenceMatrix PairwiseMatrix(std::span<const BernoulliClassModel> models,
                                std::span<const std::string> names,
                                const BernoulliClassModel* overall,
                                double alpha) {
  if (models.empty()) {
    throw Error(ErrorCode::kUsage, "pairwise matrix needs at least one class");
  }
  if (names.size() != models.size()) {
    throw Error(ErrorCode::kUsage, "one name per class model required");
  }
  std::vector<ProbabilityMatrix> probs;
  probs.reserve(models.size() + 1);
  for (const auto& m : models) {
    if (m.rows() != models.front().rows() || m.cols() != models.front().cols()) {
      throw Error(ErrorCode::kShape, "class models differ in shape");
    }
    probs.push_back(Finalize(m, alpha));
  }
  DivergenceMatrix dm;
  dm.num_classes = models.size();
  dm.alpha = alpha;
  dm.labels.assign(names.begin(), names.end());
  if (overall) {
    if (overall->rows() != models.front().rows() ||
        overall->cols() != models.front().cols()) {
      throw Error(ErrorCode::kShape, "overall model differs in shape");
    }
    probs.push_back(Finalize(*overall, alpha));
    dm.labels.push_back("overall");
    dm.has_overall = true;
  }
  const std::size_t k = probs.size();
  dm.kl = DenseMatrix(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      dm.kl(r, c) = r == c ? ClassEntropy(probs[r])
                           : BernoulliKl(probs[r].p, probs[c].p).mean;
    }
  }
  return dm;
}

DivergenceMatrix PairwiseMatrix(const ClassModelSet& set, double alpha) {
  std::vector<BernoulliClassModel> models;
  std::vector<std::string> names;
  for (std::size_t c : set.PopulatedClasses()) {
    models.push_back(set.models[c]);
    names.push_back(set.class_names[c]);
  }
  return PairwiseMatrix(models, names, &set.overall, alpha);
}

double MeanInterClass(const DivergenceMatrix& dm) {
  const std::size_t k = dm.num_classes;
  if (k < 2) {
    throw Error(ErrorCode::kUsage, "mean inter-class KL needs at least 2 classes");
  }
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      if (r != c) total += dm.kl(r, c);
    }
  }
  return total / static_cast<double>(k * (k - 1));
}

double MeanClassEntropy(std::span<const BernoulliClassModel> models,
                        double alpha) {
  if (models.empty()) {
    throw Error(ErrorCode::kUsage, "mean class entropy needs at least 1 class");
  }
  double total = 0.0;
  for (const auto& m : models) total += ClassEntropy(Finalize(m, alpha));
  return total / static_cast<double>(models.size());
}

IdOodResult IdOodDistance(const ClassModelSet& id, const ClassModelSet& ood,
                          double alpha) {
  std::map<std::string, std::size_t> ood_index;
  for (std::size_t c : ood.PopulatedClasses()) {
    ood_index.emplace(ood.class_names[c], c);
  }
  std::vector<std::size_t> id_classes;
  std::vector<std::size_t> ood_classes;
  IdOodResult out;
  for (std::size_t c : id.PopulatedClasses()) {
    auto it = ood_index.find(id.class_names[c]);
    if (it == ood_index.end()) continue;
    id_classes.push_back(c);
    ood_classes.push_back(it->second);
    out.classes.push_back(id.class_names[c]);
  }
  if (out.classes.empty()) {
    throw Error(ErrorCode::kUsage,
                "ID and OOD runs share no populated class");
  }
  std::vector<ProbabilityMatrix> p_id;
  std::vector<ProbabilityMatrix> p_ood;
  for (std::size_t i = 0; i < id_classes.size(); ++i) {
    p_id.push_back(Finalize(id.models[id_classes[i]], alpha));
    p_ood.push_back(Finalize(ood.models[ood_classes[i]], alpha));
  }
  const std::size_t k = out.classes.size();
  out.cross = DenseMatrix(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      out.cross(r, c) = BernoulliKl(p_id[r].p, p_ood[c].p).mean;
    }
    out.per_class.push_back(out.cross(r, r));
  }
  return out;
}

HeatmapScale MinMaxScale(const DenseMatrix& m) {
  const auto v = m.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

HeatmapScale SharedScale(std::span<const DenseMatrix* const> matrices) {
  if (matrices.empty()) return {};
  HeatmapScale scale = MinMaxScale(*matrices.front());
  for (const DenseMatrix* m : matrices) {
    const HeatmapScale s = MinMaxScale(*m);
    scale.lo = std::min(scale.lo, s.lo);
    scale.hi = std::max(scale.hi, s.hi);
  }
  return scale;
}

std::string EncodeHeatmapPpm(const DenseMatrix& m, HeatmapScale scale,
                             int cell) {
  if (cell < 1) throw Error(ErrorCode::kUsage, "heatmap cell size must be >= 1");
  const std::size_t width = m.cols() * static_cast<std::size_t>(cell);
  const std::size_t height = m.rows() * static_cast<std::size_t>(cell);
  std::string out = "P6\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  const double span = scale.hi - scale.lo;
  std::string line;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double level = 0.0;
      if (span > 0.0) {
        level = std::round(255.0 * (m(r, c) - scale.lo) / span);
        level = std::clamp(level, 0.0, 255.0);
      }
      const char g = static_cast<char>(static_cast<unsigned char>(level));
      line.append(static_cast<std::size_t>(cell) * 3, g);
    }
    for (int k = 0; k < cell; ++k) out += line;
  }
  return out;
}

}  // namespace pathsig
