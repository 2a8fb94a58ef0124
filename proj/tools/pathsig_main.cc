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

// pathsig: path-significance diagnostics for dense layers.
//
//   pathsig analyze      --config run.json [--layer id] [--out dir] ...
//   pathsig compare      --config run.json   (inputs: [id, ood])
//   pathsig memorisation [--config run.json]
//   pathsig selfcheck    [--config run.json]
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 check failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pathsig/error.h"
#include "pathsig/npy.h"
#include "pathsig/report.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheck = 3;

struct Flags {
  std::string config;
  std::optional<std::string> layer;
  std::optional<std::string> threshold_mode;
  std::optional<double> alpha;
  std::optional<int> bins;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool export_masks = false;
};

void AddCommonFlags(CLI::App* cmd, Flags& f, bool config_required) {
  auto* config = cmd->add_option("--config", f.config, "run configuration (JSON)");
  if (config_required) config->required();
  cmd->add_option("--layer", f.layer, "layer id to analyse (default: final)");
  cmd->add_option("--threshold-mode", f.threshold_mode,
                  "literal | row-mean-abs | quantile:<q>");
  cmd->add_option("--alpha", f.alpha, "Bernoulli smoothing pseudo-count");
  cmd->add_option("--bins", f.bins, "sparsity histogram bins");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "seed for pair sub-sampling");
  cmd->add_flag("--export-masks", f.export_masks,
                "write every per-sample significance mask as NPY");
}

pathsig::RunConfig BuildConfig(const Flags& f) {
  pathsig::RunConfig cfg;
  if (!f.config.empty()) {
    const std::filesystem::path path(f.config);
    cfg = pathsig::ParseRunConfig(pathsig::ReadFileBytes(path),
                                  path.parent_path());
  }
  if (f.layer) cfg.layer = *f.layer;
  if (f.threshold_mode) {
    cfg.threshold_mode = pathsig::ThresholdMode::Parse(*f.threshold_mode);
  }
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.bins) cfg.bins = *f.bins;
  if (f.out) cfg.out_dir = *f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.export_masks) cfg.export_masks = true;
  pathsig::ValidateRunConfig(cfg);
  return cfg;
}

std::string Scalar(const std::optional<double>& v) {
  return v ? std::to_string(*v) : "n/a";
}

int RunAnalyze(const Flags& f) {
  const auto result = pathsig::CmdAnalyze(BuildConfig(f));
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& run = result.runs[i];
    std::cout << result.run_dirs[i] << ": mean inter-class KL "
              << Scalar(run.mean_inter_class_kl) << ", mean class entropy "
              << run.mean_class_entropy << "\n";
  }
  return kExitOk;
}

int RunCompare(const Flags& f) {
  const auto result = pathsig::CmdCompare(BuildConfig(f));
  std::cout << "ID  : mean inter-class KL " << Scalar(result.id.mean_inter_class_kl)
            << ", mean class entropy " << result.id.mean_class_entropy << "\n"
            << "OOD : mean inter-class KL " << Scalar(result.ood.mean_inter_class_kl)
            << ", mean class entropy " << result.ood.mean_class_entropy << "\n";
  for (std::size_t c = 0; c < result.distance.classes.size(); ++c) {
    std::cout << "  KL(ID || OOD) " << result.distance.classes[c] << " = "
              << result.distance.per_class[c] << "\n";
  }
  return kExitOk;
}

int RunMemorisation(const Flags& f) {
  const auto result = pathsig::CmdMemorisation(BuildConfig(f));
  std::printf("%-10s %20s %20s %10s\n", "condition", "mean inter-class KL",
              "mean class entropy", "train acc");
  for (const auto& row : result.rows) {
    std::printf("%-10s %20.6g %20.6g %10.3f\n", row.condition.c_str(),
                *row.analysis.mean_inter_class_kl,
                row.analysis.mean_class_entropy, row.train_accuracy);
  }
  std::printf("OOD (true-label model, shifted data): inter-class KL %.6g -> %.6g, "
              "entropy %.6g -> %.6g\n",
              *result.ood.id.mean_inter_class_kl,
              *result.ood.ood.mean_inter_class_kl,
              result.ood.id.mean_class_entropy, result.ood.ood.mean_class_entropy);
  return kExitOk;
}

int RunSelfcheck(const Flags& f) {
  const auto outcomes = pathsig::RunSelfcheck(BuildConfig(f));
  bool ok = true;
  for (const auto& o : outcomes) {
    std::cout << (o.passed ? "PASS " : "FAIL ") << o.name;
    if (!o.passed) std::cout << ": " << o.detail;
    std::cout << "\n";
    ok = ok && o.passed;
  }
  return ok ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"path-significance diagnostics for dense layers"};
  app.require_subcommand(1);
  Flags analyze_flags, compare_flags, memo_flags, check_flags;
  auto* analyze = app.add_subcommand("analyze", "KL heatmaps, entropies, histograms");
  AddCommonFlags(analyze, analyze_flags, true);
  auto* compare = app.add_subcommand("compare", "in- vs out-of-distribution report");
  AddCommonFlags(compare, compare_flags, true);
  auto* memo = app.add_subcommand("memorisation",
                                  "untrained / shuffled / true-label experiment");
  AddCommonFlags(memo, memo_flags, false);
  auto* check = app.add_subcommand("selfcheck", "run the bundled oracle checks");
  AddCommonFlags(check, check_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return RunAnalyze(analyze_flags);
    if (*compare) return RunCompare(compare_flags);
    if (*memo) return RunMemorisation(memo_flags);
    return RunSelfcheck(check_flags);
  } catch (const pathsig::Error& e) {
    std::cerr << "pathsig: " << pathsig::ErrorCodeName(e.code())
              << " error: " << e.what() << "\n";
    switch (e.code()) {
      case pathsig::ErrorCode::kUsage: return kExitUsage;
      case pathsig::ErrorCode::kCheck: return kExitCheck;
      default: return kExitData;
    }
  } catch (const std::exception& e) {
    std::cerr << "pathsig: error: " << e.what() << "\n";
    return kExitData;
  }
}
