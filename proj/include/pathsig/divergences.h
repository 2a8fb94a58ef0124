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

#ifndef PATHSIG_DIVERGENCES_H_
#define PATHSIG_DIVERGENCES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathsig/class_stats.h"
#include "pathsig/matrix.h"

namespace pathsig {

// Coordinate-wise Bernoulli KL(p || q). `mean` is the per-coordinate average
// reported everywhere by default; `total` is the raw sum over coordinates.
struct KlValue {
  double mean = 0.0;
  double total = 0.0;
  std::size_t coordinates = 0;
};

// Terms with p = 0 or p = 1 drop the vanishing half (0 ln 0 = 0), so
// KL(p, p) == 0 even on the boundary. A q on the boundary with p != q gives an
// infinite divergence and throws kNumeric.
KlValue BernoulliKl(const DenseMatrix& p, const DenseMatrix& q);

// K x K class block, optionally followed by a row/column for the
// label-agnostic model. Off-diagonal (r, c) = KL(p_r || p_c); the diagonal
// holds each model's ClassEntropy instead of the (zero) self-divergence.
struct DivergenceMatrix {
  std::vector<std::string> labels;  // K class names (+ "overall")
  DenseMatrix kl;
  std::size_t num_classes = 0;
  bool has_overall = false;
  double alpha = kDefaultAlpha;
};

DivergenceMatrix PairwiseMatrix(std::span<const BernoulliClassModel> models,
                                std::span<const std::string> names,
                                const BernoulliClassModel* overall,
                                double alpha = kDefaultAlpha);

// Convenience over a ClassModelSet: classes without samples are left out.
DivergenceMatrix PairwiseMatrix(const ClassModelSet& set,
                                double alpha = kDefaultAlpha);

// Mean over ordered pairs (r != c) of the class block. Throws for K < 2.
double MeanInterClass(const DivergenceMatrix& dm);

// Unweighted mean of ClassEntropy(Finalize(model, alpha)).
double MeanClassEntropy(std::span<const BernoulliClassModel> models,
                        double alpha = kDefaultAlpha);

struct IdOodResult {
  std::vector<std::string> classes;  // shared class names, in ID order
  std::vector<double> per_class;     // KL(p_c^ID || p_c^OOD)
  DenseMatrix cross;                 // (r, c) = KL(p_r^ID || p_c^OOD)
};

// Classes are matched by name; only those populated in both runs are used.
// Throws kUsage when no class is shared.
IdOodResult IdOodDistance(const ClassModelSet& id, const ClassModelSet& ood,
                          double alpha = kDefaultAlpha);

struct HeatmapScale {
  double lo = 0.0;
  double hi = 0.0;
};

HeatmapScale MinMaxScale(const DenseMatrix& m);
// Min-max over the union of all matrices.
HeatmapScale SharedScale(std::span<const DenseMatrix* const> matrices);

// Binary PPM (P6) with one `cell` x `cell` gray block per entry; gray level
// round(255 (x - lo) / (hi - lo)), clamped to [0, 255], and 0 when hi == lo.
std::string EncodeHeatmapPpm(const DenseMatrix& m, HeatmapScale scale,
                             int cell = 1);

}  // namespace pathsig

#endif  // PATHSIG_DIVERGENCES_H_
