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

#ifndef PATHSIG_ORACLES_H_
#define PATHSIG_ORACLES_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "pathsig/mlp.h"

namespace pathsig {

// Independent checks bundled with the library so `pathsig selfcheck` can run
// them. They only use forward evaluation or plain arithmetic, never the code
// path under test.

struct GradientCheckReport {
  std::size_t parameters = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t worst_parameter = 0;
};

// Compares LossGradient with central finite differences of MeanCrossEntropy,
// step h = rel_step * max(1, |theta|). The relative error of one parameter is
// |g - fd| / max(|g|, |fd|); pairs where both are below `abs_floor` count as
// relative error 0 when |g - fd| <= abs_floor * 1e-3.
GradientCheckReport CheckGradients(const Model& model, const LabeledDataset& data,
                                   std::span<const std::size_t> indices,
                                   double rel_step = 1e-5, double abs_floor = 1e-8);

// The 3-layer ReLU net and batch used by the gradient acceptance check
// (12 -> 20 -> 16 -> 4, 664 parameters).
struct GradientFixture {
  Model model;
  LabeledDataset data;
};
GradientFixture MakeGradientFixture(std::uint64_t seed);

}  // namespace pathsig

#endif  // PATHSIG_ORACLES_H_
