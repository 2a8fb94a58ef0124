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

#include "pathsig/mlp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "pathsig/error.h"

namespace pathsig {
namespace {

void ApplyActivation(Activation act, std::span<const double> z,
                     std::vector<double>& a) {
  switch (act) {
    case Activation::kRelu:
      a.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0 ? z[i] : 0.0;
      break;
    case Activation::kIdentity:
      a.assign(z.begin(), z.end());
      break;
    case Activation::kSoftmax:
      a = Softmax(z);
      break;
  }
}

Gradients ZeroGradients(const Model& model) {
  Gradients g;
  for (const LayerSpec& layer : model) {
    g.weights.emplace_back(layer.weights.rows(), layer.weights.cols(), 0.0);
    g.bias.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

void RequireSoftmaxHead(const Model& model, int num_classes) {
  ValidateModel(model);
  if (model.back().activation != Activation::kSoftmax) {
    throw Error(ErrorCode::kUsage, "training needs a softmax final layer");
  }
  if (static_cast<int>(model.back().weights.rows()) != num_classes) {
    throw Error(ErrorCode::kShape,
                "final layer has " + std::to_string(model.back().weights.rows()) +
                    " rows but dataset has " + std::to_string(num_classes) +
                    " classes");
  }
}

std::size_t Argmax(std::span<const double> v) {
  return static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

const char* ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
    case Activation::kSoftmax: return "softmax";
  }
  return "unknown";
}

void ValidateModel(const Model& model) {
  if (model.empty()) throw Error(ErrorCode::kShape, "model has no layers");
  for (std::size_t l = 0; l < model.size(); ++l) {
    const LayerSpec& layer = model[l];
    if (layer.weights.empty()) {
      throw Error(ErrorCode::kShape, "layer " + std::to_string(l) +
                                         " has no weights");
    }
    if (layer.bias.size() != layer.weights.rows()) {
      throw Error(ErrorCode::kShape,
                  "layer " + std::to_string(l) + " bias length " +
                      std::to_string(layer.bias.size()) + " != weight rows " +
                      std::to_string(layer.weights.rows()));
    }
    if (l > 0 && layer.weights.cols() != model[l - 1].weights.rows()) {
      throw Error(ErrorCode::kShape,
                  "layer " + std::to_string(l) + " expects " +
                      std::to_string(layer.weights.cols()) +
                      " inputs but previous layer emits " +
                      std::to_string(model[l - 1].weights.rows()));
    }
    if (layer.activation == Activation::kSoftmax && l + 1 != model.size()) {
      throw Error(ErrorCode::kUsage, "softmax is only allowed on the final layer");
    }
  }
}

Model InitModel(std::span<const int> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw Error(ErrorCode::kUsage, "need at least input and output sizes");
  }
  std::mt19937_64 rng(seed);
  Model model;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l - 1];
    const int fan_out = layer_sizes[l];
    if (fan_in < 1 || fan_out < 1) {
      throw Error(ErrorCode::kUsage, "layer sizes must be positive");
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    LayerSpec layer;
    layer.weights = DenseMatrix(fan_out, fan_in);
    for (double& w : layer.weights.mutable_values()) w = dist(rng);
    layer.bias.resize(fan_out);
    for (double& b : layer.bias) b = dist(rng);
    layer.activation = l + 1 == layer_sizes.size() ? Activation::kSoftmax
                                                   : Activation::kRelu;
    model.push_back(std::move(layer));
  }
  return model;
}

std::size_t ParameterCount(const Model& model) {
  std::size_t n = 0;
  for (const LayerSpec& layer : model) n += layer.weights.size() + layer.bias.size();
  return n;
}

std::vector<double> Softmax(std::span<const double> z) {
  std::vector<double> out(z.size());
  if (z.empty()) return out;
  const double zmax = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - zmax);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<LayerTrace> Forward(const Model& model,
                                std::span<const double> input) {
  ValidateModel(model);
  if (input.size() != model.front().weights.cols()) {
    throw Error(ErrorCode::kShape,
                "input length " + std::to_string(input.size()) +
                    " != first layer cols " +
                    std::to_string(model.front().weights.cols()));
  }
  std::vector<LayerTrace> trace(model.size());
  std::span<const double> a = input;
  for (std::size_t l = 0; l < model.size(); ++l) {
    const LayerSpec& layer = model[l];
    std::vector<double>& z = trace[l].pre_activation;
    z.resize(layer.weights.rows());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const auto w = layer.weights.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * a[j];
      z[i] = acc + layer.bias[i];
    }
    ApplyActivation(layer.activation, z, trace[l].post_activation);
    a = trace[l].post_activation;
  }
  return trace;
}

void ValidateDataset(const LabeledDataset& data) {
  if (data.labels.empty()) throw Error(ErrorCode::kShape, "dataset is empty");
  if (data.inputs.rows() != data.labels.size()) {
    throw Error(ErrorCode::kShape, "dataset inputs/labels length mismatch");
  }
  if (data.num_classes < 1) {
    throw Error(ErrorCode::kRange, "dataset needs at least one class");
  }
  for (int y : data.labels) {
    if (y < 0 || y >= data.num_classes) {
      throw Error(ErrorCode::kRange,
                  "label " + std::to_string(y) + " outside [0, " +
                      std::to_string(data.num_classes) + ")");
    }
  }
}

double MeanCrossEntropy(const Model& model, const LabeledDataset& data,
                        std::span<const std::size_t> indices) {
  double total = 0.0;
  for (std::size_t s : indices) {
    const auto trace = Forward(model, data.inputs.row(s));
    const auto& out = trace.back().post_activation;
    total -= std::log(out[static_cast<std::size_t>(data.labels[s])]);
  }
  return total / static_cast<double>(indices.size());
}

Gradients LossGradient(const Model& model, const LabeledDataset& data,
                       std::span<const std::size_t> indices) {
  RequireSoftmaxHead(model, data.num_classes);
  Gradients grad = ZeroGradients(model);
  const double scale = 1.0 / static_cast<double>(indices.size());
  std::vector<double> delta;
  std::vector<double> prev_delta;
  for (std::size_t s : indices) {
    const auto input = data.inputs.row(s);
    const auto trace = Forward(model, input);
    // Softmax + cross-entropy: dL/dz = p - onehot.
    delta = trace.back().post_activation;
    delta[static_cast<std::size_t>(data.labels[s])] -= 1.0;
    for (std::size_t l = model.size(); l-- > 0;) {
      const LayerSpec& layer = model[l];
      std::span<const double> a_prev =
          l == 0 ? input : std::span<const double>(trace[l - 1].post_activation);
      DenseMatrix& gw = grad.weights[l];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        const double d = delta[i] * scale;
        grad.bias[l][i] += d;
        auto row = gw.mutable_row(i);
        for (std::size_t j = 0; j < a_prev.size(); ++j) row[j] += d * a_prev[j];
      }
      if (l == 0) break;
      prev_delta.assign(a_prev.size(), 0.0);
      for (std::size_t i = 0; i < delta.size(); ++i) {
        const auto w = layer.weights.row(i);
        for (std::size_t j = 0; j < w.size(); ++j) prev_delta[j] += w[j] * delta[i];
      }
      const LayerSpec& below = model[l - 1];
      if (below.activation == Activation::kRelu) {
        const auto& z = trace[l - 1].pre_activation;
        for (std::size_t j = 0; j < prev_delta.size(); ++j) {
          if (z[j] <= 0) prev_delta[j] = 0.0;
        }
      }
      delta.swap(prev_delta);
    }
  }
  return grad;
}

double Accuracy(const Model& model, const LabeledDataset& data) {
  std::size_t correct = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto trace = Forward(model, data.inputs.row(s));
    if (Argmax(trace.back().post_activation) ==
        static_cast<std::size_t>(data.labels[s])) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult TrainSgd(Model model, const LabeledDataset& data,
                     const TrainConfig& cfg) {
  ValidateDataset(data);
  RequireSoftmaxHead(model, data.num_classes);
  if (cfg.epochs < 1 || cfg.batch_size < 1 ||
      static_cast<std::size_t>(cfg.batch_size) > data.size()) {
    throw Error(ErrorCode::kUsage,
                "train config needs epochs >= 1 and 1 <= batch_size <= samples");
  }
  if (!(cfg.lr0 >= 0) || !(cfg.lr_decay_per_epoch > 0) ||
      cfg.lr_decay_per_epoch > 1) {
    throw Error(ErrorCode::kUsage,
                "train config needs lr0 >= 0 and decay in (0, 1]");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  TrainResult result;
  double lr = cfg.lr0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> idx(
          order.data() + start, std::min(batch, order.size() - start));
      const double loss = MeanCrossEntropy(model, data, idx);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNumeric,
                    "non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batches) +
                        " (lr " + std::to_string(lr) + ")");
      }
      loss_sum += loss;
      ++batches;
      if (lr == 0.0) continue;
      const Gradients g = LossGradient(model, data, idx);
      for (std::size_t l = 0; l < model.size(); ++l) {
        auto w = model[l].weights.mutable_values();
        const auto gw = g.weights[l].values();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * gw[k];
        for (std::size_t i = 0; i < model[l].bias.size(); ++i) {
          model[l].bias[i] -= lr * g.bias[l][i];
        }
      }
    }
    result.trace.push_back({epoch, lr, loss_sum / static_cast<double>(batches),
                            Accuracy(model, data)});
    lr *= cfg.lr_decay_per_epoch;
  }
  result.model = std::move(model);
  return result;
}

LabeledDataset ShuffleLabels(const LabeledDataset& data, std::uint64_t seed) {
  LabeledDataset out = data;
  std::mt19937_64 rng(seed);
  std::shuffle(out.labels.begin(), out.labels.end(), rng);
  return out;
}

LabeledDataset GenBlobs(const BlobSpec& spec) {
  if (!(spec.sigma >= 0)) throw Error(ErrorCode::kRange, "sigma must be >= 0");
  if (!(spec.noise_scale >= 0)) {
    throw Error(ErrorCode::kRange, "noise_scale must be >= 0");
  }
  if (spec.num_classes < 1 || spec.dims < 1 || spec.per_class < 1) {
    throw Error(ErrorCode::kRange, "blob counts must be positive");
  }
  if (static_cast<int>(spec.means.size()) != spec.num_classes) {
    throw Error(ErrorCode::kShape, "need one mean per class");
  }
  for (const auto& mean : spec.means) {
    if (static_cast<int>(mean.size()) != spec.dims) {
      throw Error(ErrorCode::kShape, "class mean has wrong dimension");
    }
  }
  if (!spec.shift.empty() && static_cast<int>(spec.shift.size()) != spec.dims) {
    throw Error(ErrorCode::kShape, "shift has wrong dimension");
  }
  if (!spec.class_shifts.empty()) {
    if (static_cast<int>(spec.class_shifts.size()) != spec.num_classes) {
      throw Error(ErrorCode::kShape, "need one class shift per class");
    }
    for (const auto& s : spec.class_shifts) {
      if (static_cast<int>(s.size()) != spec.dims) {
        throw Error(ErrorCode::kShape, "class shift has wrong dimension");
      }
    }
  }

  const std::size_t total =
      static_cast<std::size_t>(spec.num_classes) * spec.per_class;
  LabeledDataset out;
  out.num_classes = spec.num_classes;
  out.inputs = DenseMatrix(total, spec.dims);
  out.labels.reserve(total);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t s = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int k = 0; k < spec.per_class; ++k, ++s) {
      auto row = out.inputs.mutable_row(s);
      for (int j = 0; j < spec.dims; ++j) {
        const double noise = normal(rng);
        double x = spec.means[c][j] + spec.sigma * (spec.noise_scale * noise);
        if (!spec.shift.empty()) x += spec.shift[j];
        if (!spec.class_shifts.empty()) x += spec.class_shifts[c][j];
        row[j] = x;
      }
      out.labels.push_back(c);
    }
  }
  return out;
}

std::vector<std::vector<double>> RandomMeans(int num_classes, int dims,
                                             double spread,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread);
  std::vector<std::vector<double>> means(num_classes, std::vector<double>(dims));
  for (auto& mean : means) {
    for (double& v : mean) v = normal(rng);
  }
  return means;
}

std::vector<double> RandomDirection(int dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dims);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> ShiftsTowardCentroid(
    const std::vector<std::vector<double>>& means, double distance) {
  if (means.empty()) return {};
  const std::size_t dims = means.front().size();
  std::vector<double> centroid(dims, 0.0);
  for (const auto& m : means) {
    for (std::size_t j = 0; j < dims; ++j) centroid[j] += m[j];
  }
  for (double& v : centroid) v /= static_cast<double>(means.size());
  std::vector<std::vector<double>> shifts;
  for (const auto& m : means) {
    std::vector<double> d(dims);
    double norm = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      d[j] = centroid[j] - m[j];
      norm += d[j] * d[j];
    }
    norm = std::sqrt(norm);
    for (double& v : d) v = norm > 0.0 ? v / norm * distance : 0.0;
    shifts.push_back(std::move(d));
  }
  return shifts;
}

}  // namespace pathsig
