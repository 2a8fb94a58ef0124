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

#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "pathsig/class_stats.h"
#include "pathsig/error.h"
#include "pathsig/sparsity.h"
#include "test_util.h"

namespace pathsig {
namespace {

using testing::CodeOf;

TEST_CASE("path frequencies are unsmoothed ratios") {
  const BernoulliClassModel m(0, DenseMatrix::FromRows({{2, 1}, {0, 0}}), 2);
  CHECK(PathFrequencies(m) == std::vector<double>{1, 0.5, 0, 0});
  const BernoulliClassModel full(0, DenseMatrix(2, 3, 5.0), 5);
  CHECK(PathFrequencies(full) == std::vector<double>(6, 1.0));
  const BernoulliClassModel none(0, DenseMatrix(2, 3, 0.0), 5);
  CHECK(PathFrequencies(none) == std::vector<double>(6, 0.0));
  CHECK(CodeOf([] { PathFrequencies(BernoulliClassModel(0, 1, 1)); }) ==
        ErrorCode::kRange);
}

TEST_CASE("histogram edge rule") {
  const std::vector<double> f = {0, 0.5, 1.0};
  const Histogram h = BuildHistogram(f, 2);
  CHECK(h.counts == std::vector<std::size_t>{1, 2});
  CHECK(h.bin_edges == std::vector<double>{0, 0.5, 1});
  CHECK(h.total == 3);

  const std::vector<double> zeros(7, 0.0);
  const Histogram z = BuildHistogram(zeros, 10);
  CHECK(z.counts[0] == 7);

  const Histogram one = BuildHistogram(f, 1);
  CHECK(one.counts == std::vector<std::size_t>{3});

  // Values on interior edges belong to the bin above them.
  const std::vector<double> edges = {0.1, 0.2, 0.3, 0.7, 0.9};
  const Histogram tenths = BuildHistogram(edges, 10);
  CHECK(tenths.counts ==
        std::vector<std::size_t>{0, 1, 1, 1, 0, 0, 0, 1, 0, 1});

  CHECK(CodeOf([&] { BuildHistogram(f, 0); }) == ErrorCode::kUsage);
  const std::vector<double> out = {1.5};
  CHECK(CodeOf([&] { BuildHistogram(out, 3); }) == ErrorCode::kRange);
}

TEST_CASE("property: histograms conserve the path count") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    const int samples = 1 + trial % 17;
    std::uniform_int_distribution<int> count(0, samples);
    DenseMatrix counts(m, n);
    for (double& v : counts.mutable_values()) v = count(rng);
    const auto freqs = PathFrequencies(
        BernoulliClassModel(0, counts, static_cast<std::size_t>(samples)));
    for (int bins : {1, 10, 50}) {
      const Histogram h = BuildHistogram(freqs, bins);
      CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == m * n);
      CHECK(h.bin_edges.front() == 0.0);
      CHECK(h.bin_edges.back() == 1.0);
      for (std::size_t k = 1; k < h.bin_edges.size(); ++k) {
        CHECK(h.bin_edges[k] > h.bin_edges[k - 1]);
      }
    }
  }
}

TEST_CASE("tail mass") {
  const std::vector<double> f = {0.1, 0.9, 0.95};
  CHECK(TailMass(f, 0.8) == doctest::Approx(2.0 / 3.0));
  CHECK(TailMass(f, 1.0) == 0.0);
  CHECK(TailMass(f, 0.0) == 1.0);
  CHECK(TailMass(f, 0.9) == doctest::Approx(1.0 / 3.0));
  CHECK(CodeOf([&] { TailMass(f, 1.1); }) == ErrorCode::kRange);
}

TEST_CASE("property: tail mass never increases with the threshold") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(1 + trial);
    for (double& v : f) v = u(rng);
    double previous = 1.0;
    for (int k = 0; k <= 100; ++k) {
      const double t = TailMass(f, k / 100.0);
      CHECK(t <= previous);
      previous = t;
    }
  }
}

}  // namespace
}  // namespace pathsig
