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

#include "pathsig/ablations.h"

#include <cmath>
#include <random>

#include "pathsig/error.h"
#include "pathsig/mlp.h"

namespace pathsig {
namespace {

double CategoricalKl(std::span<const double> x, std::span<const double> y,
                     double clamp) {
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = std::max(x[k], clamp);
    const double yk = std::max(y[k], clamp);
    total += xk * std::log(xk / yk);
  }
  return total;
}

double CategoricalEntropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double Euclidean(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return std::sqrt(s);
}

DenseMatrix RowSoftmax(const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::vector<double> s = Softmax(m.row(r));
    std::copy(s.begin(), s.end(), out.mutable_row(r).begin());
  }
  return out;
}

void CheckClouds(std::span<const ClassPointCloud> clouds) {
  if (clouds.empty()) throw Error(ErrorCode::kUsage, "no point clouds given");
  const std::size_t dim = clouds.front().points.cols();
  for (const auto& cloud : clouds) {
    if (cloud.points.empty()) {
      throw Error(ErrorCode::kShape, "point cloud for class " +
                                         std::to_string(cloud.class_id) +
                                         " is empty");
    }
    if (cloud.points.cols() != dim) {
      throw Error(ErrorCode::kShape, "point clouds differ in dimension");
    }
  }
}

// Mean of f(x_i, y_j) over cross pairs, or over ordered distinct pairs when
// `same` (x and y are then the same cloud). Returns nullopt when no pair
// exists.
template <typename F>
std::optional<double> MeanOverPairs(const DenseMatrix& x, const DenseMatrix& y,
                                    bool same, bool ordered, F f,
                                    const PairSampling& sampling,
                                    std::size_t r, std::size_t c) {
  const std::size_t nx = x.rows();
  const std::size_t ny = y.rows();
  if (same && nx < 2) return std::nullopt;
  std::size_t total_pairs = same ? nx * (nx - 1) : nx * ny;
  if (same && !ordered) total_pairs /= 2;

  if (sampling.max_pairs > 0 && total_pairs > sampling.max_pairs) {
    std::seed_seq seq{static_cast<std::uint32_t>(sampling.seed),
                      static_cast<std::uint32_t>(sampling.seed >> 32),
                      static_cast<std::uint32_t>(r),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick_x(0, nx - 1);
    std::uniform_int_distribution<std::size_t> pick_y(0, ny - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < sampling.max_pairs; ++k) {
      const std::size_t i = pick_x(rng);
      std::size_t j = pick_y(rng);
      while (same && j == i) j = pick_y(rng);
      acc += f(x.row(i), y.row(j));
    }
    return acc / static_cast<double>(sampling.max_pairs);
  }

  double acc = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t j0 = same && !ordered ? i + 1 : 0;
    for (std::size_t j = j0; j < ny; ++j) {
      if (same && i == j) continue;
      acc += f(x.row(i), y.row(j));
    }
  }
  return acc / static_cast<double>(total_pairs);
}

template <typename F>
CloudSpread Spread(std::span<const ClassPointCloud> clouds, bool ordered_intra,
                   F f, const PairSampling& sampling) {
  const std::size_t k = clouds.size();
  CloudSpread out;
  out.pairwise = DenseMatrix(k, k);
  double inter_sum = 0.0;
  double intra_sum = 0.0;
  std::size_t intra_n = 0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      if (r == c) continue;
      const double v = *MeanOverPairs(clouds[r].points, clouds[c].points, false,
                                      true, f, sampling, r, c);
      out.pairwise(r, c) = v;
      inter_sum += v;
    }
    const auto intra = MeanOverPairs(clouds[r].points, clouds[r].points, true,
                                     ordered_intra, f, sampling, r, r);
    out.intra_per_class.push_back(intra);
    if (intra) {
      out.pairwise(r, r) = *intra;
      intra_sum += *intra;
      ++intra_n;
    }
  }
  if (k >= 2) out.inter = inter_sum / static_cast<double>(k * (k - 1));
  if (intra_n > 0) out.intra = intra_sum / static_cast<double>(intra_n);
  return out;
}

}  // namespace

PrototypeKlResult PrototypeInteractionKl(
    std::span<const DenseMatrix> prototypes) {
  if (prototypes.empty()) {
    throw Error(ErrorCode::kUsage, "no class prototypes given");
  }
  std::vector<DenseMatrix> soft;
  for (const DenseMatrix& p : prototypes) {
    if (!p.SameShape(prototypes.front()) || p.empty()) {
      throw Error(ErrorCode::kShape, "class prototypes differ in shape");
    }
    soft.push_back(RowSoftmax(p));
  }
  const std::size_t k = soft.size();
  const double rows = static_cast<double>(soft.front().rows());
  PrototypeKlResult out;
  out.pairwise = DenseMatrix(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    double h = 0.0;
    for (std::size_t i = 0; i < soft[r].rows(); ++i) {
      h += CategoricalEntropy(soft[r].row(i));
    }
    out.intra_per_class.push_back(h / rows);
    out.pairwise(r, r) = h / rows;
    out.intra += h / rows;
    for (std::size_t c = 0; c < k; ++c) {
      if (r == c) continue;
      double kl = 0.0;
      for (std::size_t i = 0; i < soft[r].rows(); ++i) {
        kl += CategoricalKl(soft[r].row(i), soft[c].row(i), 0.0);
      }
      out.pairwise(r, c) = kl / rows;
      out.inter += kl / rows;
    }
  }
  out.intra /= static_cast<double>(k);
  if (k >= 2) out.inter /= static_cast<double>(k * (k - 1));
  return out;
}

CloudSpread SoftmaxOutputKl(std::span<const ClassPointCloud> clouds,
                            double clamp, PairSampling sampling) {
  CheckClouds(clouds);
  for (const auto& cloud : clouds) {
    for (std::size_t i = 0; i < cloud.points.rows(); ++i) {
      double sum = 0.0;
      for (double v : cloud.points.row(i)) {
        if (v < 0.0) {
          throw Error(ErrorCode::kRange, "negative probability in softmax cloud");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::kRange,
                    "softmax cloud point does not sum to 1 (class " +
                        std::to_string(cloud.class_id) + ")");
      }
    }
  }
  auto kl = [clamp](std::span<const double> x, std::span<const double> y) {
    return CategoricalKl(x, y, clamp);
  };
  return Spread(clouds, /*ordered_intra=*/true, kl, sampling);
}

CloudSpread EnergyDistances(std::span<const ClassPointCloud> clouds,
                            PairSampling sampling) {
  CheckClouds(clouds);
  return Spread(clouds, /*ordered_intra=*/false, Euclidean, sampling);
}

namespace {

std::vector<std::vector<std::size_t>> SamplesByClass(const ActivationDump& dump) {
  std::vector<std::vector<std::size_t>> by_class(dump.num_classes());
  for (std::size_t s = 0; s < dump.sample_count(); ++s) {
    by_class[static_cast<std::size_t>(dump.labels[s])].push_back(s);
  }
  return by_class;
}

}  // namespace

std::vector<ClassPointCloud> ActivationClouds(const ActivationDump& dump) {
  std::vector<ClassPointCloud> clouds;
  const auto by_class = SamplesByClass(dump);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) continue;
    ClassPointCloud cloud;
    cloud.class_id = static_cast<int>(c);
    cloud.points = DenseMatrix(by_class[c].size(), dump.activations.cols());
    for (std::size_t i = 0; i < by_class[c].size(); ++i) {
      const auto src = dump.activations.row(by_class[c][i]);
      std::copy(src.begin(), src.end(), cloud.points.mutable_row(i).begin());
    }
    clouds.push_back(std::move(cloud));
  }
  return clouds;
}

std::vector<ClassPointCloud> SoftmaxClouds(const ActivationDump& dump) {
  LayerSpec layer{dump.weights,
                  dump.bias.empty() ? std::vector<double>(dump.weights.rows(), 0.0)
                                    : dump.bias,
                  Activation::kSoftmax};
  const Model model{layer};
  std::vector<ClassPointCloud> clouds;
  const auto by_class = SamplesByClass(dump);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) continue;
    ClassPointCloud cloud;
    cloud.class_id = static_cast<int>(c);
    cloud.points = DenseMatrix(by_class[c].size(), dump.weights.rows());
    for (std::size_t i = 0; i < by_class[c].size(); ++i) {
      const auto trace = Forward(model, dump.activations.row(by_class[c][i]));
      const auto& probs = trace.back().post_activation;
      std::copy(probs.begin(), probs.end(), cloud.points.mutable_row(i).begin());
    }
    clouds.push_back(std::move(cloud));
  }
  return clouds;
}

std::vector<DenseMatrix> ClassPrototypes(const ActivationDump& dump,
                                         std::vector<int>* class_ids) {
  // The mean of W diag(a) over a class is W diag(mean a).
  std::vector<DenseMatrix> prototypes;
  const auto by_class = SamplesByClass(dump);
  const std::size_t n = dump.activations.cols();
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) continue;
    std::vector<double> mean(n, 0.0);
    for (std::size_t s : by_class[c]) {
      const auto a = dump.activations.row(s);
      for (std::size_t j = 0; j < n; ++j) mean[j] += a[j];
    }
    for (double& v : mean) v /= static_cast<double>(by_class[c].size());
    DenseMatrix proto(dump.weights.rows(), n);
    for (std::size_t i = 0; i < proto.rows(); ++i) {
      const auto w = dump.weights.row(i);
      auto out = proto.mutable_row(i);
      for (std::size_t j = 0; j < n; ++j) out[j] = w[j] * mean[j];
    }
    prototypes.push_back(std::move(proto));
    if (class_ids) class_ids->push_back(static_cast<int>(c));
  }
  return prototypes;
}

}  // namespace pathsig
