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

#include "pathsig/sparsity.h"

#include <algorithm>

#include "pathsig/error.h"

namespace pathsig {

std::vector<double> PathFrequencies(const BernoulliClassModel& model) {
  if (model.sample_count() == 0) {
    throw Error(ErrorCode::kRange, "class " + std::to_string(model.class_id()) +
                                       " has no samples");
  }
  const double n = static_cast<double>(model.sample_count());
  const auto counts = model.counts().values();
  std::vector<double> out(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) out[k] = counts[k] / n;
  return out;
}

Histogram BuildHistogram(std::span<const double> freqs, int bins) {
  if (bins < 1) throw Error(ErrorCode::kUsage, "histogram needs >= 1 bin");
  Histogram h;
  const auto b = static_cast<std::size_t>(bins);
  h.bin_edges.resize(b + 1);
  for (std::size_t k = 0; k <= b; ++k) {
    h.bin_edges[k] = static_cast<double>(k) / static_cast<double>(b);
  }
  h.bin_edges.back() = 1.0;
  h.counts.assign(b, 0);
  for (double f : freqs) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kRange, "path frequency outside [0, 1]");
    }
    // Start from the arithmetic guess, then settle against the stored edges
    // so membership agrees with [edge_k, edge_k+1).
    std::size_t k = std::min(b - 1, static_cast<std::size_t>(f * bins));
    while (k > 0 && f < h.bin_edges[k]) --k;
    while (k + 1 < b && f >= h.bin_edges[k + 1]) ++k;
    ++h.counts[k];
  }
  h.total = freqs.size();
  return h;
}

double TailMass(std::span<const double> freqs, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kRange, "tail threshold must lie in [0, 1]");
  }
  if (freqs.empty()) return 0.0;
  const auto above = std::count_if(freqs.begin(), freqs.end(),
                                   [t](double f) { return f > t; });
  return static_cast<double>(above) / static_cast<double>(freqs.size());
}

}  // namespace pathsig
