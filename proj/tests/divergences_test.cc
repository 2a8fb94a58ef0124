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
#include <string>
#include <vector>

#include "doctest.h"
#include "pathsig/class_stats.h"
#include "pathsig/divergences.h"
#include "pathsig/error.h"
#include "test_util.h"

namespace pathsig {
namespace {

using testing::CodeOf;

// High-precision references (mpmath, 30 digits).
constexpr double kHalfLn3 = 0.5493061443340548456976;
constexpr double kKl09Vs05 = 0.3680642071684970699107;
constexpr double kKl05Vs09 = 0.5108256237659906832055;

double DirectKl(double p, double q) {
  double v = 0.0;
  if (p > 0) v += p * std::log(p / q);
  if (p < 1) v += (1 - p) * std::log((1 - p) / (1 - q));
  return v;
}

BernoulliClassModel RandomModel(int id, std::size_t m, std::size_t n, int samples,
                                std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, samples);
  DenseMatrix counts(m, n);
  for (double& v : counts.mutable_values()) v = count(rng);
  return BernoulliClassModel(id, counts, static_cast<std::size_t>(samples));
}

TEST_CASE("closed-form Bernoulli KL values") {
  const auto p = DenseMatrix::FromRows({{0.75}});
  const auto q = DenseMatrix::FromRows({{0.25}});
  CHECK(std::abs(BernoulliKl(p, q).mean - kHalfLn3) <= 1e-12);

  const auto a = DenseMatrix::FromRows({{0.9}});
  const auto b = DenseMatrix::FromRows({{0.5}});
  CHECK(std::abs(BernoulliKl(a, b).mean - kKl09Vs05) <= 1e-15);
  CHECK(std::abs(BernoulliKl(b, a).mean - kKl05Vs09) <= 1e-15);
  CHECK(BernoulliKl(a, b).mean != BernoulliKl(b, a).mean);
}

TEST_CASE("mean and total") {
  const auto p = DenseMatrix::FromRows({{0.75, 0.5}, {0.9, 0.2}});
  const auto q = DenseMatrix::FromRows({{0.25, 0.5}, {0.5, 0.3}});
  const KlValue kl = BernoulliKl(p, q);
  double direct = 0.0;
  for (std::size_t i = 0; i < 4; ++i) direct += DirectKl(p.values()[i], q.values()[i]);
  CHECK(kl.coordinates == 4);
  CHECK(kl.total == doctest::Approx(direct).epsilon(1e-14));
  CHECK(kl.mean == doctest::Approx(direct / 4).epsilon(1e-14));
}

TEST_CASE("KL boundary handling") {
  const auto edge = DenseMatrix::FromRows({{0.0, 1.0, 0.5}});
  CHECK(BernoulliKl(edge, edge).mean == 0.0);
  const auto interior = DenseMatrix::FromRows({{0.5, 0.5, 0.5}});
  CHECK(std::isfinite(BernoulliKl(edge, interior).mean));
  CHECK(CodeOf([&] { BernoulliKl(interior, edge); }) == ErrorCode::kNumeric);
  CHECK(CodeOf([&] { BernoulliKl(interior, DenseMatrix(1, 2, 0.5)); }) ==
        ErrorCode::kShape);
  CHECK(CodeOf([&] { BernoulliKl(interior, DenseMatrix(1, 3, 1.5)); }) ==
        ErrorCode::kRange);
}

TEST_CASE("property: KL is non-negative and vanishes on equal inputs") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 16);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    const auto a = RandomModel(0, m, n, 1 + trial % 40, rng);
    const auto b = RandomModel(1, m, n, 1 + trial % 23, rng);
    const DenseMatrix p = Finalize(a).p, q = Finalize(b).p;
    CHECK(BernoulliKl(p, q).mean >= 0.0);
    CHECK(BernoulliKl(p, p).mean == 0.0);
  }
}

TEST_CASE("property: KL grows as one coordinate moves away") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    DenseMatrix p(1, 3), q(1, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      p(0, j) = u(rng);
      q(0, j) = u(rng);
    }
    // Walk coordinate 0 of p away from q along one direction.
    p(0, 0) = q(0, 0);
    double previous = BernoulliKl(p, q).mean;
    const double target = u(rng) < 0.5 ? 0.999 : 0.001;
    for (int step = 1; step <= 20; ++step) {
      DenseMatrix moved = p;
      moved(0, 0) = q(0, 0) + (target - q(0, 0)) * step / 20.0;
      const double kl = BernoulliKl(moved, q).mean;
      CHECK(kl >= previous - 1e-15);
      previous = kl;
    }
  }
}

struct Fixture {
  std::vector<BernoulliClassModel> models;
  std::vector<std::string> names = {"a", "b", "c"};
  BernoulliClassModel overall;
};

Fixture ThreeClasses() {
  Fixture f;
  f.models.emplace_back(0, DenseMatrix::FromRows({{4, 0}, {1, 3}}), 4);
  f.models.emplace_back(1, DenseMatrix::FromRows({{1, 2}, {2, 0}}), 2);
  f.models.emplace_back(2, DenseMatrix::FromRows({{0, 5}, {5, 5}}), 5);
  f.overall = OverallModel(f.models);
  return f;
}

TEST_CASE("pairwise matrix equals per-pair KL calls") {
  const Fixture f = ThreeClasses();
  const DivergenceMatrix dm = PairwiseMatrix(f.models, f.names, &f.overall);
  REQUIRE(dm.kl.rows() == 4);
  CHECK(dm.labels == std::vector<std::string>{"a", "b", "c", "overall"});
  std::vector<DenseMatrix> p;
  for (const auto& m : f.models) p.push_back(Finalize(m).p);
  p.push_back(Finalize(f.overall).p);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      const double expected = r == c ? ClassEntropy(p[r]) : BernoulliKl(p[r], p[c]).mean;
      CHECK(dm.kl(r, c) == expected);
      CHECK(dm.kl(r, c) >= 0.0);
    }
  }

  double sum = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (r != c) sum += dm.kl(r, c);
    }
  }
  CHECK(MeanInterClass(dm) == doctest::Approx(sum / 6).epsilon(1e-15));
  CHECK(MeanClassEntropy(f.models) ==
        doctest::Approx((ClassEntropy(p[0]) + ClassEntropy(p[1]) + ClassEntropy(p[2])) / 3)
            .epsilon(1e-15));
}

TEST_CASE("pairwise matrix shapes and degenerate inputs") {
  const Fixture f = ThreeClasses();
  const std::vector<BernoulliClassModel> same = {f.models[0], f.models[0]};
  const std::vector<std::string> two = {"x", "y"};
  const BernoulliClassModel overall = OverallModel(same);
  const DivergenceMatrix dm = PairwiseMatrix(same, two, &overall);
  CHECK(dm.kl.rows() == 3);
  CHECK(dm.kl(0, 1) == 0.0);
  CHECK(dm.kl(1, 0) == 0.0);
  CHECK(MeanInterClass(dm) == 0.0);

  const std::vector<BernoulliClassModel> one = {f.models[1]};
  const std::vector<std::string> single = {"solo"};
  const DivergenceMatrix dm1 = PairwiseMatrix(one, single, nullptr);
  CHECK(dm1.kl.rows() == 1);
  CHECK(CodeOf([&] { MeanInterClass(dm1); }) == ErrorCode::kUsage);
  CHECK(MeanClassEntropy(one) == ClassEntropy(Finalize(f.models[1])));

  const std::vector<BernoulliClassModel> half = {
      BernoulliClassModel(0, DenseMatrix(2, 2, 2.0), 4),
      BernoulliClassModel(1, DenseMatrix(2, 2, 3.0), 6)};
  CHECK(MeanClassEntropy(half) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("K = 2 mean is the average of both directions") {
  const Fixture f = ThreeClasses();
  const std::vector<BernoulliClassModel> pair = {f.models[0], f.models[2]};
  const std::vector<std::string> names = {"a", "c"};
  const DivergenceMatrix dm = PairwiseMatrix(pair, names, nullptr);
  CHECK(MeanInterClass(dm) == (dm.kl(0, 1) + dm.kl(1, 0)) / 2);
}

ClassModelSet SetOf(std::vector<std::string> names, std::vector<BernoulliClassModel> models) {
  ClassModelSet set;
  set.class_names = std::move(names);
  set.models = std::move(models);
  set.overall = OverallModel(set.models);
  return set;
}

TEST_CASE("ID vs OOD distances") {
  const Fixture f = ThreeClasses();
  const ClassModelSet id = SetOf({"a", "b", "c"}, f.models);

  const IdOodResult self = IdOodDistance(id, id);
  CHECK(self.per_class == std::vector<double>{0, 0, 0});

  std::vector<BernoulliClassModel> ood_models = {
      BernoulliClassModel(0, DenseMatrix::FromRows({{1, 1}, {1, 1}}), 3),
      BernoulliClassModel(1, DenseMatrix::FromRows({{0, 2}, {2, 2}}), 2)};
  const ClassModelSet ood = SetOf({"c", "a"}, ood_models);
  const IdOodResult r = IdOodDistance(id, ood);
  CHECK(r.classes == std::vector<std::string>{"a", "c"});
  const DenseMatrix id_a = Finalize(f.models[0]).p, id_c = Finalize(f.models[2]).p;
  const DenseMatrix ood_c = Finalize(ood_models[0]).p, ood_a = Finalize(ood_models[1]).p;
  CHECK(r.per_class[0] == BernoulliKl(id_a, ood_a).mean);
  CHECK(r.per_class[1] == BernoulliKl(id_c, ood_c).mean);
  CHECK(r.cross(0, 1) == BernoulliKl(id_a, ood_c).mean);
  CHECK(r.cross(1, 0) == BernoulliKl(id_c, ood_a).mean);

  const ClassModelSet disjoint = SetOf({"x", "y"}, ood_models);
  CHECK(CodeOf([&] { IdOodDistance(id, disjoint); }) == ErrorCode::kUsage);
}

TEST_CASE("heatmap encoding") {
  const auto m = DenseMatrix::FromRows({{0, 1}, {2, 4}});
  const std::string ppm = EncodeHeatmapPpm(m, MinMaxScale(m), 1);
  const std::string header = "P6\n2 2\n255\n";
  REQUIRE(ppm.size() == header.size() + 12);
  CHECK(ppm.substr(0, header.size()) == header);
  const unsigned char expected[4] = {0, 64, 128, 255};  // round(255 x / 4)
  for (int k = 0; k < 4; ++k) {
    for (int ch = 0; ch < 3; ++ch) {
      CHECK(static_cast<unsigned char>(ppm[header.size() + 3 * k + ch]) == expected[k]);
    }
  }

  const std::string flat = EncodeHeatmapPpm(DenseMatrix(2, 3, 7.0), {7.0, 7.0}, 2);
  CHECK(flat.substr(0, 11) == "P6\n6 4\n255\n");
  CHECK(flat.size() == 11 + 6 * 4 * 3);
  for (std::size_t i = 11; i < flat.size(); ++i) CHECK(flat[i] == 0);
}

TEST_CASE("shared scale spans every matrix") {
  const auto a = DenseMatrix::FromRows({{0.5, 2}});
  const auto b = DenseMatrix::FromRows({{-1, 1}});
  const auto c = DenseMatrix::FromRows({{3}});
  const std::vector<const DenseMatrix*> all = {&a, &b, &c};
  const HeatmapScale s = SharedScale(all);
  CHECK(s.lo == -1.0);
  CHECK(s.hi == 3.0);
}

}  // namespace
}  // namespace pathsig
