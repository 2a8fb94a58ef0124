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

#ifndef PATHSIG_SPARSITY_H_
#define PATHSIG_SPARSITY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "pathsig/class_stats.h"

namespace pathsig {

inline constexpr int kDefaultBins = 50;

// Unsmoothed counts_ij / N_c, flattened row-major.
std::vector<double> PathFrequencies(const BernoulliClassModel& model);

struct Histogram {
  std::vector<double> bin_edges;      // bins + 1, from 0 to 1
  std::vector<std::size_t> counts;    // bins
  std::size_t total = 0;
};

// Equal-width bins over [0, 1]; bin k covers [lo, hi) except the last, which
// is closed. Values outside [0, 1] throw kRange.
Histogram BuildHistogram(std::span<const double> freqs, int bins = kDefaultBins);

// Fraction of paths with frequency strictly above t.
double TailMass(std::span<const double> freqs, double t);

}  // namespace pathsig

#endif  // PATHSIG_SPARSITY_H_
