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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pathsig/ablations.h"
#include "pathsig/dump.h"
#include "pathsig/error.h"
#include "pathsig/mlp.h"
#include "test_util.h"

namespace pathsig {
namespace {

using testing::CodeOf;

// mpmath references.
constexpr double kTanhHalf = 0.4621171572600097585023;      // KL(sm(1,0) || sm(0,1))
constexpr double kEntropySm10 = 0.5822031088882179547978;   // H(sm(1,0))
constexpr double kClampedLn2 = 0.6931471805330074354819;    // KL((1,0) || (.5,.5)), eps 1e-12

double Dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(s);
}

TEST_CASE("prototype KL on the softmax fixture") {
  const std::vector<DenseMatrix> protos = {DenseMatrix::FromRows({{1, 0}, {1, 0}}),
                                           DenseMatrix::FromRows({{0, 1}, {0, 1}})};
  const PrototypeKlResult r = PrototypeInteractionKl(protos);
  CHECK(std::abs(r.pairwise(0, 1) - kTanhHalf) <= 1e-15);
  CHECK(std::abs(r.pairwise(1, 0) - kTanhHalf) <= 1e-15);
  CHECK(std::abs(r.inter - kTanhHalf) <= 1e-15);
  CHECK(std::abs(r.intra_per_class[0] - kEntropySm10) <= 1e-15);
  CHECK(std::abs(r.intra - kEntropySm10) <= 1e-15);
  CHECK(std::abs(r.pairwise(0, 0) - kEntropySm10) <= 1e-15);
}

TEST_CASE("prototype KL degenerate cases") {
  const auto p = DenseMatrix::FromRows({{0.3, -1.2, 2.0}, {0, 0, 1}});
  const std::vector<DenseMatrix> same = {p, p, p};
  const PrototypeKlResult r = PrototypeInteractionKl(same);
  CHECK(r.inter == 0.0);
  // A single-entry row softmaxes to (1), a point mass with zero entropy.
  const std::vector<DenseMatrix> point = {DenseMatrix::FromRows({{1}}),
                                          DenseMatrix::FromRows({{1}})};
  const PrototypeKlResult z = PrototypeInteractionKl(point);
  CHECK(z.pairwise(0, 1) == 0.0);
  CHECK(z.intra == 0.0);

  const std::vector<DenseMatrix> mismatched = {DenseMatrix(2, 2), DenseMatrix(2, 3)};
  CHECK(CodeOf([&] { PrototypeInteractionKl(mismatched); }) == ErrorCode::kShape);
}

TEST_CASE("softmax output KL") {
  const std::vector<ClassPointCloud> clouds = {
      {0, DenseMatrix::FromRows({{1, 0}})}, {1, DenseMatrix::FromRows({{0.5, 0.5}})}};
  const CloudSpread s = SoftmaxOutputKl(clouds);
  CHECK(std::abs(s.pairwise(0, 1) - kClampedLn2) <= 1e-15);
  CHECK(!s.intra.has_value());

  const std::vector<ClassPointCloud> identical = {
      {0, DenseMatrix::FromRows({{0.2, 0.8}, {0.2, 0.8}})},
      {1, DenseMatrix::FromRows({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}})}};
  const CloudSpread z = SoftmaxOutputKl(identical);
  CHECK(*z.inter == 0.0);
  CHECK(*z.intra == 0.0);

  const std::vector<ClassPointCloud> single = {{0, DenseMatrix::FromRows({{0.5, 0.5}})}};
  CHECK(!SoftmaxOutputKl(single).inter.has_value());

  const std::vector<ClassPointCloud> bad = {{0, DenseMatrix::FromRows({{0.5, 0.6}})}};
  CHECK(CodeOf([&] { SoftmaxOutputKl(bad); }) == ErrorCode::kRange);
}

TEST_CASE("energy distances: 3-4-5 and brute force") {
  const std::vector<ClassPointCloud> pair = {{0, DenseMatrix::FromRows({{0, 0}})},
                                             {1, DenseMatrix::FromRows({{3, 4}})}};
  CHECK(*EnergyDistances(pair).inter == 5.0);

  const std::vector<ClassPointCloud> clouds = {
      {0, DenseMatrix::FromRows({{0, 0}, {1, 2}, {-1, 0.5}})},
      {1, DenseMatrix::FromRows({{3, 4}, {2, -1}})}};
  const CloudSpread s = EnergyDistances(clouds);
  double cross = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) cross += Dist(clouds[0].points.row(i), clouds[1].points.row(j));
  }
  cross /= 6;
  const double intra0 = (Dist(clouds[0].points.row(0), clouds[0].points.row(1)) +
                         Dist(clouds[0].points.row(0), clouds[0].points.row(2)) +
                         Dist(clouds[0].points.row(1), clouds[0].points.row(2))) / 3;
  const double intra1 = Dist(clouds[1].points.row(0), clouds[1].points.row(1));
  CHECK(std::abs(s.pairwise(0, 1) - cross) <= 1e-12);
  CHECK(std::abs(s.pairwise(1, 0) - cross) <= 1e-12);
  CHECK(std::abs(*s.inter - cross) <= 1e-12);
  CHECK(std::abs(*s.intra_per_class[0] - intra0) <= 1e-12);
  CHECK(std::abs(*s.intra_per_class[1] - intra1) <= 1e-12);
  CHECK(std::abs(*s.intra - (intra0 + intra1) / 2) <= 1e-12);
}

TEST_CASE("property: energy distances are symmetric and non-negative") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ClassPointCloud> clouds;
    for (int c = 0; c < 3; ++c) {
      clouds.push_back({c, testing::RandomMatrix(1 + (trial + c) % 5, 4, rng)});
    }
    const CloudSpread s = EnergyDistances(clouds);
    std::vector<ClassPointCloud> reversed(clouds.rbegin(), clouds.rend());
    const CloudSpread r = EnergyDistances(reversed);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        CHECK(s.pairwise(a, b) >= 0.0);
        CHECK(s.pairwise(a, b) == doctest::Approx(s.pairwise(b, a)).epsilon(1e-14));
        CHECK(s.pairwise(a, b) == doctest::Approx(r.pairwise(2 - a, 2 - b)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("identical points give zero energy distances; singletons have no intra") {
  const std::vector<ClassPointCloud> same = {
      {0, DenseMatrix::FromRows({{1, 1}, {1, 1}})}, {1, DenseMatrix::FromRows({{1, 1}, {1, 1}})}};
  const CloudSpread s = EnergyDistances(same);
  CHECK(*s.inter == 0.0);
  CHECK(*s.intra == 0.0);
  const std::vector<ClassPointCloud> singles = {{0, DenseMatrix::FromRows({{0, 0}})},
                                                {1, DenseMatrix::FromRows({{1, 0}})}};
  const CloudSpread t = EnergyDistances(singles);
  CHECK(!t.intra.has_value());
  CHECK(!t.intra_per_class[0].has_value());
}

TEST_CASE("pair sub-sampling is seeded and approximates the full mean") {
  std::mt19937_64 rng(13);
  const std::vector<ClassPointCloud> clouds = {{0, testing::RandomMatrix(200, 3, rng)},
                                               {1, testing::RandomMatrix(150, 3, rng, 0.0, 2.0)}};
  const double full = *EnergyDistances(clouds).inter;
  const PairSampling sampling{20000, 5};
  const double a = *EnergyDistances(clouds, sampling).inter;
  const double b = *EnergyDistances(clouds, sampling).inter;
  CHECK(a == b);
  CHECK(a == doctest::Approx(full).epsilon(0.02));
  CHECK(*EnergyDistances(clouds, PairSampling{20000, 6}).inter != a);
  // A cap above the number of pairs enumerates them all.
  CHECK(*EnergyDistances(clouds, PairSampling{1000000, 6}).inter == full);
}

TEST_CASE("dump helpers") {
  testing::TempDir dir("abl");
  const auto w = DenseMatrix::FromRows({{1, 0}, {0, 2}, {1, 1}});
  const std::vector<double> b = {0, 0.5, -1};
  const auto a = DenseMatrix::FromRows({{1, 0}, {3, 2}, {0, 1}, {1, 1}});
  const std::vector<int> labels = {0, 0, 2, 2};
  const ActivationDump dump =
      LoadDump(WriteDump(dir.path(), "m", "final", w, b, a, labels, {"x", "y", "z"}));

  std::vector<int> ids;
  const auto protos = ClassPrototypes(dump, &ids);
  CHECK(ids == std::vector<int>{0, 2});
  // Class 0 mean activation is (2, 1).
  CHECK(protos[0] == DenseMatrix::FromRows({{2, 0}, {0, 2}, {2, 1}}));

  const auto acts = ActivationClouds(dump);
  REQUIRE(acts.size() == 2);
  CHECK(acts[1].class_id == 2);
  CHECK(acts[1].points == DenseMatrix::FromRows({{0, 1}, {1, 1}}));

  const auto soft = SoftmaxClouds(dump);
  REQUIRE(soft.size() == 2);
  const auto expected = Softmax(std::vector<double>{1, 0.5, 0});  // W (1,0) + b
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(soft[0].points(0, k) == doctest::Approx(expected[k]).epsilon(1e-15));
  }
}

}  // namespace
}  // namespace pathsig
