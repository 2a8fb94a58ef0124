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

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "pathsig/ablations.h"
#include "pathsig/class_stats.h"
#include "pathsig/divergences.h"
#include "pathsig/error.h"
#include "pathsig/interactions.h"
#include "pathsig/npy.h"
#include "pathsig/oracles.h"
#include "pathsig/report.h"
#include "pathsig/sparsity.h"

namespace pathsig {
namespace {

// Perturbs one parameter in place and returns the loss.
double LossWith(Model& model, double* param, double value,
                const LabeledDataset& data, std::span<const std::size_t> idx) {
  const double saved = *param;
  *param = value;
  const double loss = MeanCrossEntropy(model, data, idx);
  *param = saved;
  return loss;
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kCheck, what);
}

DenseMatrix RandomProbabilities(std::mt19937_64& rng, std::size_t rows,
                                std::size_t cols) {
  // Smoothed probabilities from random counts, as Finalize produces them.
  std::uniform_int_distribution<int> samples(1, 50);
  const int n = samples(rng);
  std::uniform_int_distribution<int> count(0, n);
  DenseMatrix p(rows, cols);
  for (double& v : p.mutable_values()) v = (count(rng) + 0.5) / (n + 1.0);
  return p;
}

SignificanceMask RandomMask(std::mt19937_64& rng, std::size_t rows,
                            std::size_t cols) {
  std::bernoulli_distribution coin(0.3);
  SignificanceMask m(rows, cols, ThresholdMode::Literal());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, coin(rng));
  }
  return m;
}

void CheckNpyRoundTrip() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 10.0);
  DenseMatrix x(7, 3);
  for (double& v : x.mutable_values()) v = normal(rng);
  Require(BitEqual(DecodeNpy(EncodeNpy(x, Dtype::kF64)).matrix, x),
          "f64 round trip changed values");
  DenseMatrix y(7, 3);
  for (double& v : y.mutable_values()) v = static_cast<float>(normal(rng));
  Require(BitEqual(DecodeNpy(EncodeNpy(y, Dtype::kF32)).matrix, y),
          "f32 round trip changed values");

  const auto dir = std::filesystem::temp_directory_path() /
                   ("pathsig_selfcheck_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  WriteArray(x, dir / "x.npy", Dtype::kF64);
  const bool same = BitEqual(ReadArray(dir / "x.npy"), x);
  std::filesystem::remove_all(dir);
  Require(same, "file round trip changed values");

  std::string truncated = EncodeNpy(x, Dtype::kF64);
  truncated.resize(truncated.size() - 8);
  bool rejected = false;
  try {
    DecodeNpy(truncated);
  } catch (const Error&) {
    rejected = true;
  }
  Require(rejected, "truncated payload was accepted");
}

void CheckGradient() {
  const GradientFixture f = MakeGradientFixture(7);
  std::vector<std::size_t> idx(f.data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const GradientCheckReport r = CheckGradients(f.model, f.data, idx);
  Require(r.parameters >= 500, "fixture has fewer than 500 parameters");
  Require(r.max_relative_error <= 1e-5,
          "max relative gradient error " + Fmt(r.max_relative_error));
}

void CheckStreamingEqualsBatch() {
  std::mt19937_64 rng(5);
  std::vector<SignificanceMask> masks;
  for (int i = 0; i < 100; ++i) masks.push_back(RandomMask(rng, 6, 9));
  BernoulliClassModel sequential(0, 6, 9);
  for (const auto& m : masks) sequential.Accumulate(m);
  for (std::size_t parts : {1u, 2u, 4u, 8u}) {
    BernoulliClassModel merged(0, 6, 9);
    const std::size_t step = (masks.size() + parts - 1) / parts;
    for (std::size_t start = 0; start < masks.size(); start += step) {
      BernoulliClassModel part(0, 6, 9);
      for (std::size_t i = start; i < std::min(masks.size(), start + step); ++i) {
        part.Accumulate(masks[i]);
      }
      merged = Merge(merged, part);
    }
    Require(BitEqual(merged.counts(), sequential.counts()) &&
                merged.sample_count() == sequential.sample_count(),
            std::to_string(parts) + "-way partition differs from sequential");
  }
}

void CheckKlAxioms() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> dim(1, 16);
  for (int t = 0; t < 100; ++t) {
    const std::size_t r = dim(rng);
    const std::size_t c = dim(rng);
    const DenseMatrix p = RandomProbabilities(rng, r, c);
    const DenseMatrix q = RandomProbabilities(rng, r, c);
    Require(BernoulliKl(p, q).mean >= 0.0, "negative KL");
    Require(BernoulliKl(p, p).mean == 0.0, "KL(p, p) != 0");
  }
  const double kl = BernoulliKl(DenseMatrix::FromRows({{0.75}}),
                                DenseMatrix::FromRows({{0.25}}))
                        .mean;
  Require(std::abs(kl - 0.54930614433405484570) <= 1e-12,
          "KL(0.75 || 0.25) = " + Fmt(kl));
}

void CheckLiteralFixture() {
  const DenseMatrix w = DenseMatrix::FromRows({{1, -1}, {2, 0}});
  const std::vector<double> a = {1, 1};
  const SignificanceMask s = ComputeSignificance(InteractionMatrix(w, a));
  Require(s(0, 0) && s(0, 1) && !s(1, 0) && !s(1, 1),
          "literal threshold fixture is not [[1,1],[0,0]]");
}

void CheckRowSums() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  DenseMatrix w(8, 13);
  for (double& v : w.mutable_values()) v = normal(rng);
  std::vector<double> a(13);
  for (double& v : a) v = normal(rng);
  const DenseMatrix n = InteractionMatrix(w, a);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double rowsum = 0.0;
    double dot = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) {
      rowsum += n(i, j);
      dot += w(i, j) * a[j];
      scale += std::abs(w(i, j) * a[j]);
    }
    Require(std::abs(rowsum - dot) <= 1e-9 * std::max(1.0, scale),
            "row sum of N differs from W a");
  }
}

void CheckHistogramConservation() {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    BernoulliClassModel m(0, 5, 7);
    for (int i = 0; i < 9; ++i) m.Accumulate(RandomMask(rng, 5, 7));
    const auto freqs = PathFrequencies(m);
    for (int bins : {1, 10, 50}) {
      const Histogram h = BuildHistogram(freqs, bins);
      std::size_t total = 0;
      for (auto c : h.counts) total += c;
      Require(total == 35, "histogram lost paths with " + std::to_string(bins) +
                               " bins");
    }
  }
}

void CheckEnergy() {
  const ClassPointCloud a{0, DenseMatrix::FromRows({{0, 0}})};
  const ClassPointCloud b{1, DenseMatrix::FromRows({{3, 4}})};
  const ClassPointCloud clouds[] = {a, b};
  const CloudSpread s = EnergyDistances(clouds);
  Require(s.inter && *s.inter == 5.0, "energy inter({(0,0)}, {(3,4)}) != 5");
}

void CheckDump(const std::filesystem::path& input, const RunConfig& cfg) {
  const ActivationDump dump =
      LoadDump(ResolveManifest(input, cfg.layer), ManifestMode::kStrict);
  for (std::size_t s = 0; s < dump.sample_count(); ++s) {
    const auto a = dump.activations.row(s);
    const DenseMatrix n = InteractionMatrix(dump.weights, a);
    for (std::size_t i = 0; i < n.rows(); ++i) {
      double rowsum = 0.0;
      double dot = 0.0;
      double scale = 0.0;
      for (std::size_t j = 0; j < n.cols(); ++j) {
        rowsum += n(i, j);
        dot += dump.weights(i, j) * a[j];
        scale += std::abs(n(i, j));
      }
      Require(std::abs(rowsum - dot) <= 1e-9 * std::max(1.0, scale),
              "row-sum identity fails at sample " + std::to_string(s));
    }
  }
}

}  // namespace

GradientCheckReport CheckGradients(const Model& model, const LabeledDataset& data,
                                   std::span<const std::size_t> indices,
                                   double rel_step, double abs_floor) {
  const Gradients analytic = LossGradient(model, data, indices);
  Model probe = model;
  GradientCheckReport report;
  auto visit = [&](double* param, double g) {
    const double theta = *param;
    const double h = rel_step * std::max(1.0, std::abs(theta));
    const double up = LossWith(probe, param, theta + h, data, indices);
    const double down = LossWith(probe, param, theta - h, data, indices);
    const double fd = (up - down) / (2.0 * h);
    const double abs_err = std::abs(g - fd);
    const double denom = std::max(std::abs(g), std::abs(fd));
    double rel = 0.0;
    if (denom >= abs_floor) {
      rel = abs_err / denom;
    } else if (abs_err > abs_floor * 1e-3) {
      rel = 1.0;
    }
    if (rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_parameter = report.parameters;
    }
    report.max_absolute_error = std::max(report.max_absolute_error, abs_err);
    ++report.parameters;
  };
  for (std::size_t l = 0; l < probe.size(); ++l) {
    auto w = probe[l].weights.mutable_values();
    const auto gw = analytic.weights[l].values();
    for (std::size_t k = 0; k < w.size(); ++k) visit(&w[k], gw[k]);
    for (std::size_t i = 0; i < probe[l].bias.size(); ++i) {
      visit(&probe[l].bias[i], analytic.bias[l][i]);
    }
  }
  return report;
}

GradientFixture MakeGradientFixture(std::uint64_t seed) {
  const int sizes[] = {12, 20, 16, 4};
  GradientFixture f;
  f.model = InitModel(sizes, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> label(0, 3);
  f.data.num_classes = 4;
  f.data.inputs = DenseMatrix(8, 12);
  for (double& v : f.data.inputs.mutable_values()) v = normal(rng);
  for (int i = 0; i < 8; ++i) f.data.labels.push_back(label(rng));
  return f;
}

std::vector<CheckOutcome> RunSelfcheck(const RunConfig& cfg) {
  const std::vector<std::pair<std::string, std::function<void()>>> checks = {
      {"npy_round_trip", CheckNpyRoundTrip},
      {"gradient_finite_differences", CheckGradient},
      {"streaming_equals_batch", CheckStreamingEqualsBatch},
      {"kl_axioms", CheckKlAxioms},
      {"literal_threshold_fixture", CheckLiteralFixture},
      {"interaction_row_sums", CheckRowSums},
      {"histogram_conservation", CheckHistogramConservation},
      {"energy_distance_345", CheckEnergy},
  };
  std::vector<CheckOutcome> out;
  auto run = [&out](const std::string& name, const std::function<void()>& fn) {
    CheckOutcome o{name, true, "ok"};
    try {
      fn();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = e.what();
    }
    out.push_back(std::move(o));
  };
  for (const auto& [name, fn] : checks) run(name, fn);
  for (const auto& input : cfg.inputs) {
    run("dump:" + input.generic_string(), [&] { CheckDump(input, cfg); });
  }
  return out;
}

}  // namespace pathsig
