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

#ifndef PATHSIG_ABLATIONS_H_
#define PATHSIG_ABLATIONS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pathsig/dump.h"
#include "pathsig/matrix.h"

namespace pathsig {

// Alternative separation metrics that the path-KL is compared against.

inline constexpr double kSoftmaxClamp = 1e-12;

struct ClassPointCloud {
  int class_id = 0;
  DenseMatrix points;  // one point per row
};

// Optional cap on the number of point pairs enumerated per class pair. With
// max_pairs == 0 every pair is used; otherwise max_pairs pairs are drawn
// uniformly with replacement from a generator seeded by (seed, r, c).
struct PairSampling {
  std::size_t max_pairs = 0;
  std::uint64_t seed = 0;
};

struct PrototypeKlResult {
  DenseMatrix pairwise;                // K x K, diagonal = intra spread
  std::vector<double> intra_per_class; // mean categorical entropy of rows
  double inter = 0.0;                  // mean over ordered pairs r != c
  double intra = 0.0;                  // mean over classes
};

// Each prototype (per-class mean interaction matrix) is row-softmaxed; the
// divergence between two classes is the mean over rows of the categorical KL
// between matching rows.
PrototypeKlResult PrototypeInteractionKl(std::span<const DenseMatrix> prototypes);

struct CloudSpread {
  // Absent when no class pair (inter) or no class with two or more points
  // (intra) exists.
  std::optional<double> inter;
  std::optional<double> intra;
  DenseMatrix pairwise;  // K x K: off-diagonal inter, diagonal intra (0 if absent)
  std::vector<std::optional<double>> intra_per_class;
};

// Categorical KL(x || y) between individual probability vectors, components
// clamped below at `clamp`. Inter: mean over ordered class pairs of the mean
// over all cross pairs; intra: per class, mean over ordered distinct pairs.
// Points must sum to 1 within 1e-9 (kRange otherwise).
CloudSpread SoftmaxOutputKl(std::span<const ClassPointCloud> clouds,
                            double clamp = kSoftmaxClamp,
                            PairSampling sampling = {});

// Expected Euclidean distance: inter over all cross pairs, intra over
// unordered distinct within-class pairs.
CloudSpread EnergyDistances(std::span<const ClassPointCloud> clouds,
                            PairSampling sampling = {});

// Helpers that derive the ablation inputs from a dump: per-class mean
// interaction matrices (W diag(mean a_c)), softmax of the layer outputs
// W a + b, and the raw input activations. Classes without samples are
// skipped; the returned class ids index the dump's class_names.
std::vector<ClassPointCloud> ActivationClouds(const ActivationDump& dump);
std::vector<ClassPointCloud> SoftmaxClouds(const ActivationDump& dump);
std::vector<DenseMatrix> ClassPrototypes(const ActivationDump& dump,
                                         std::vector<int>* class_ids = nullptr);

}  // namespace pathsig

#endif  // PATHSIG_ABLATIONS_H_
