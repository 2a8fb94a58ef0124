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

#ifndef PATHSIG_MLP_H_
#define PATHSIG_MLP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pathsig/matrix.h"

namespace pathsig {

enum class Activation { kRelu, kIdentity, kSoftmax };

const char* ActivationName(Activation activation);

struct LayerSpec {
  DenseMatrix weights;        // m x n
  std::vector<double> bias;   // m
  Activation activation = Activation::kRelu;
};

using Model = std::vector<LayerSpec>;

// Bias length matches weight rows, consecutive layers chain, softmax appears
// only on the final layer. Throws kShape / kUsage.
void ValidateModel(const Model& model);

// Fan-in uniform init U(-1/sqrt(n), 1/sqrt(n)) for weights and biases.
// `layer_sizes` = {input, hidden..., classes}; hidden layers get ReLU and
// the last layer softmax.
Model InitModel(std::span<const int> layer_sizes, std::uint64_t seed);

std::size_t ParameterCount(const Model& model);

struct LayerTrace {
  std::vector<double> pre_activation;   // z = W a_prev + b
  std::vector<double> post_activation;  // a = f(z)
};

std::vector<LayerTrace> Forward(const Model& model,
                                std::span<const double> input);

// Numerically stable softmax; output sums to 1 and is strictly positive for
// finite input.
std::vector<double> Softmax(std::span<const double> z);

struct LabeledDataset {
  DenseMatrix inputs;        // S x d
  std::vector<int> labels;   // S
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
};

void ValidateDataset(const LabeledDataset& data);

struct TrainConfig {
  int epochs = 200;
  int batch_size = 16;
  double lr0 = 0.01;
  double lr_decay_per_epoch = 0.95;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0.0;
  double loss = 0.0;      // mean cross-entropy over the epoch's batches
  double accuracy = 0.0;  // training accuracy after the epoch
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> trace;
};

// Parameter-shaped container for gradients.
struct Gradients {
  std::vector<DenseMatrix> weights;
  std::vector<std::vector<double>> bias;
};

// Mean cross-entropy of a softmax-terminated model over `indices` of `data`.
double MeanCrossEntropy(const Model& model, const LabeledDataset& data,
                        std::span<const std::size_t> indices);

// Backpropagated gradient of MeanCrossEntropy with respect to every parameter.
Gradients LossGradient(const Model& model, const LabeledDataset& data,
                       std::span<const std::size_t> indices);

double Accuracy(const Model& model, const LabeledDataset& data);

// Mini-batch SGD on cross-entropy with lr_t = lr0 * decay^t for epoch t.
// Batches are drawn from a per-epoch reshuffle of the sample order seeded by
// cfg.seed, so identical inputs give bit-identical parameters. A non-finite
// loss aborts with kNumeric.
TrainResult TrainSgd(Model model, const LabeledDataset& data,
                     const TrainConfig& cfg);

// Uniformly random permutation of the labels; inputs untouched.
LabeledDataset ShuffleLabels(const LabeledDataset& data, std::uint64_t seed);

struct BlobSpec {
  int num_classes = 0;
  int dims = 0;
  int per_class = 0;
  std::vector<std::vector<double>> means;  // num_classes x dims
  double sigma = 1.0;
  std::uint64_t seed = 0;
  // OOD variant knobs: every sample is offset by `shift` (empty = none) plus
  // its class's entry of `class_shifts` (empty = none), and its noise is
  // multiplied by `noise_scale`.
  std::vector<double> shift;
  std::vector<std::vector<double>> class_shifts;
  double noise_scale = 1.0;
};

// Samples are laid out class by class (labels 0,0,..,1,1,..). For fixed seed
// and noise_scale == 1, sample i with a shift is exactly sample i without it
// plus the shift.
LabeledDataset GenBlobs(const BlobSpec& spec);

// Class means with iid N(0, spread^2) coordinates.
std::vector<std::vector<double>> RandomMeans(int num_classes, int dims,
                                             double spread, std::uint64_t seed);

// Seeded unit vector, used as the direction of an OOD mean shift.
std::vector<double> RandomDirection(int dims, std::uint64_t seed);

// Per-class offsets of length `distance` pointing from each class mean to the
// centroid of all class means (zero for a mean already at the centroid).
std::vector<std::vector<double>> ShiftsTowardCentroid(
    const std::vector<std::vector<double>>& means, double distance);

}  // namespace pathsig

#endif  // PATHSIG_MLP_H_
