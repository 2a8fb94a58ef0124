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

#ifndef PATHSIG_REPORT_H_
#define PATHSIG_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathsig/class_stats.h"
#include "pathsig/divergences.h"
#include "pathsig/dump.h"
#include "pathsig/interactions.h"
#include "pathsig/mlp.h"

namespace pathsig {

// Desk-scale memorisation experiment: Gaussian blobs, a small ReLU network
// and three training conditions that share one initialisation.
struct SyntheticConfig {
  int classes = 3;
  int dims = 8;
  int per_class = 200;       // training samples per class
  int test_per_class = 200;  // analysed samples per class
  double sigma = 1.0;
  double mean_spread = 2.0;  // class-mean coordinates ~ N(0, spread^2)
  std::vector<int> hidden = {32};
  TrainConfig train;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 2;
  std::uint64_t shuffle_seed = 3;
  // OOD copy of the analysed set: every class mean moves ood_shift_sigmas *
  // sigma, either toward the centroid of the class means ("toward_centroid")
  // or all along one seeded random direction ("random_direction"); noise is
  // scaled by ood_noise_scale.
  double ood_shift_sigmas = 2.0;
  std::string ood_shift_mode = "toward_centroid";
  double ood_noise_scale = 1.0;
};

inline const std::vector<std::string>& AllMetrics() {
  static const std::vector<std::string> metrics = {"path_kl", "prototype_kl",
                                                   "softmax_kl", "energy"};
  return metrics;
}

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::string> layer;
  ThresholdMode threshold_mode;
  double alpha = kDefaultAlpha;
  int bins = 50;
  std::vector<std::string> metrics = AllMetrics();
  std::filesystem::path out_dir = "pathsig_out";
  std::uint64_t seed = 0;
  bool shared_scale = true;
  bool export_masks = false;
  std::size_t max_pairs = 0;  // 0 = enumerate every pair
  int heatmap_cell = 8;
  ManifestMode manifest_mode = ManifestMode::kStrict;
  SyntheticConfig synthetic;

  bool HasMetric(const std::string& name) const;
};

// Parses the JSON config. Relative input and output paths resolve against
// `base_dir`. Unknown keys are rejected. Throws kUsage.
RunConfig ParseRunConfig(const std::string& json_text,
                         const std::filesystem::path& base_dir = {});
void ValidateRunConfig(const RunConfig& cfg);
nlohmann::json RunConfigJson(const RunConfig& cfg);

// Everything computed for one dump. Pure: no files touched.
struct Analysis {
  std::string model_id;
  std::string layer_id;
  std::size_t sample_count = 0;
  ClassModelSet models;
  DivergenceMatrix matrix;
  std::optional<double> mean_inter_class_kl;  // absent for a single class
  double mean_class_entropy = 0.0;
  double overall_entropy = 0.0;
  double mean_significant_fraction = 0.0;
  std::vector<double> tail_mass_09;  // per populated class, t = 0.9
  nlohmann::json ablations;          // keyed by metric name
};

Analysis AnalyzeDump(const ActivationDump& dump, const RunConfig& cfg);

struct AnalyzeResult {
  std::vector<Analysis> runs;
  std::vector<std::string> run_dirs;  // relative to cfg.out_dir
  HeatmapScale shared_scale;
};

// Writes one directory per input (kl_matrix.csv/json, heatmaps, histograms,
// class models, ablations.json, summary.json) plus index.json.
AnalyzeResult CmdAnalyze(const RunConfig& cfg);

struct CompareResult {
  Analysis id;
  Analysis ood;
  IdOodResult distance;
  nlohmann::json report;
};

// inputs[0] is the in-distribution dump, inputs[1] the shifted one.
CompareResult CmdCompare(const RunConfig& cfg);

struct ConditionRow {
  std::string condition;  // untrained | shuffled | true
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  Analysis analysis;
};

struct MemorisationResult {
  std::vector<ConditionRow> rows;
  CompareResult ood;  // true-label model: analysed set vs shifted copy
  nlohmann::json report;
};

MemorisationResult CmdMemorisation(const RunConfig& cfg);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Built-in oracle suite, plus validation of every dump listed in
// cfg.inputs (strict load and the N row-sum identity).
std::vector<CheckOutcome> RunSelfcheck(const RunConfig& cfg);

}  // namespace pathsig

#endif  // PATHSIG_REPORT_H_
