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

#include "pathsig/report.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "pathsig/ablations.h"
#include "pathsig/error.h"
#include "pathsig/npy.h"
#include "pathsig/outputs.h"
#include "pathsig/sparsity.h"

namespace pathsig {
namespace {

using nlohmann::json;

constexpr double kTailThreshold = 0.9;

template <typename T>
T Get(const json& doc, const char* key, const T& fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kUsage,
                std::string("config field '") + key + "' has the wrong type");
  }
}

void RejectUnknown(const json& doc, const std::set<std::string>& known,
                   const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::kUsage,
                  "unknown " + where + " config key '" + key + "'");
    }
  }
}

SyntheticConfig ParseSynthetic(const json& doc) {
  RejectUnknown(doc,
                {"classes", "dims", "per_class", "test_per_class", "sigma",
                 "mean_spread", "hidden", "epochs", "batch_size", "lr0",
                 "lr_decay", "train_seed", "data_seed", "init_seed",
                 "shuffle_seed", "ood_shift_sigmas", "ood_shift_mode",
                 "ood_noise_scale"},
                "synthetic");
  SyntheticConfig s;
  s.classes = Get(doc, "classes", s.classes);
  s.dims = Get(doc, "dims", s.dims);
  s.per_class = Get(doc, "per_class", s.per_class);
  s.test_per_class = Get(doc, "test_per_class", s.test_per_class);
  s.sigma = Get(doc, "sigma", s.sigma);
  s.mean_spread = Get(doc, "mean_spread", s.mean_spread);
  s.hidden = Get(doc, "hidden", s.hidden);
  s.train.epochs = Get(doc, "epochs", s.train.epochs);
  s.train.batch_size = Get(doc, "batch_size", s.train.batch_size);
  s.train.lr0 = Get(doc, "lr0", s.train.lr0);
  s.train.lr_decay_per_epoch = Get(doc, "lr_decay", s.train.lr_decay_per_epoch);
  s.train.seed = Get(doc, "train_seed", s.train.seed);
  s.data_seed = Get(doc, "data_seed", s.data_seed);
  s.init_seed = Get(doc, "init_seed", s.init_seed);
  s.shuffle_seed = Get(doc, "shuffle_seed", s.shuffle_seed);
  s.ood_shift_sigmas = Get(doc, "ood_shift_sigmas", s.ood_shift_sigmas);
  s.ood_shift_mode = Get(doc, "ood_shift_mode", s.ood_shift_mode);
  s.ood_noise_scale = Get(doc, "ood_noise_scale", s.ood_noise_scale);
  if (s.ood_shift_mode != "toward_centroid" &&
      s.ood_shift_mode != "random_direction") {
    throw Error(ErrorCode::kUsage,
                "ood_shift_mode must be toward_centroid or random_direction");
  }
  return s;
}

json SyntheticJson(const SyntheticConfig& s) {
  return {{"classes", s.classes},
          {"dims", s.dims},
          {"per_class", s.per_class},
          {"test_per_class", s.test_per_class},
          {"sigma", s.sigma},
          {"mean_spread", s.mean_spread},
          {"hidden", s.hidden},
          {"epochs", s.train.epochs},
          {"batch_size", s.train.batch_size},
          {"lr0", s.train.lr0},
          {"lr_decay", s.train.lr_decay_per_epoch},
          {"train_seed", s.train.seed},
          {"data_seed", s.data_seed},
          {"init_seed", s.init_seed},
          {"shuffle_seed", s.shuffle_seed},
          {"ood_shift_sigmas", s.ood_shift_sigmas},
          {"ood_shift_mode", s.ood_shift_mode},
          {"ood_noise_scale", s.ood_noise_scale}};
}

std::string Sanitize(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' ||
                    ch == '.';
    out.push_back(ok ? ch : '_');
  }
  return out.empty() ? "_" : out;
}

json ScaleJson(const HeatmapScale& s) { return {{"lo", s.lo}, {"hi", s.hi}}; }

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json();
}

json SpreadJson(const CloudSpread& s, const std::vector<std::string>& names) {
  json intra_per_class = json::object();
  for (std::size_t c = 0; c < names.size(); ++c) {
    intra_per_class[names[c]] = OptionalJson(s.intra_per_class[c]);
  }
  return {{"inter", OptionalJson(s.inter)},
          {"intra", OptionalJson(s.intra)},
          {"classes", names},
          {"pairwise", MatrixJson(s.pairwise)},
          {"intra_per_class", intra_per_class}};
}

json Conventions(const RunConfig& cfg) {
  return {{"kl_scalar", "per-coordinate mean"},
          {"entropy_aggregate", "per-coordinate mean"},
          {"entropy_units", "nats"},
          {"inter_class_mean", "ordered pairs"},
          {"threshold_mode", cfg.threshold_mode.ToString()},
          {"alpha", cfg.alpha},
          {"bins", cfg.bins}};
}

json SummaryJson(const Analysis& a, const RunConfig& cfg,
                 const HeatmapScale& own, const HeatmapScale& shared) {
  json class_counts = json::object();
  for (std::size_t c = 0; c < a.models.class_names.size(); ++c) {
    class_counts[a.models.class_names[c]] = a.models.models[c].sample_count();
  }
  json tails = json::object();
  const auto populated = a.models.PopulatedClasses();
  double tail_mean = 0.0;
  for (std::size_t i = 0; i < populated.size(); ++i) {
    tails[a.models.class_names[populated[i]]] = a.tail_mass_09[i];
    tail_mean += a.tail_mass_09[i];
  }
  tail_mean /= static_cast<double>(populated.size());
  return {{"model_id", a.model_id},
          {"layer_id", a.layer_id},
          {"sample_count", a.sample_count},
          {"class_sample_counts", class_counts},
          {"mean_inter_class_kl", OptionalJson(a.mean_inter_class_kl)},
          {"mean_class_entropy", a.mean_class_entropy},
          {"overall_entropy", a.overall_entropy},
          {"mean_significant_fraction", a.mean_significant_fraction},
          {"tail_mass_0.9", tails},
          {"mean_tail_mass_0.9", tail_mean},
          {"heatmap_scale", ScaleJson(own)},
          {"heatmap_shared_scale", ScaleJson(shared)},
          {"conventions", Conventions(cfg)},
          {"seed", cfg.seed}};
}

void WriteAnalysis(OutputBundle& bundle, const std::string& dir,
                   const Analysis& a, const ActivationDump& dump,
                   const RunConfig& cfg, const HeatmapScale& shared) {
  const std::filesystem::path root(dir);
  const DivergenceMatrix& dm = a.matrix;
  bundle.Write(root / "kl_matrix.csv", MatrixCsv(dm.kl, dm.labels, dm.labels));
  bundle.WriteJson(root / "kl_matrix.json",
                   {{"labels", dm.labels},
                    {"kl", MatrixJson(dm.kl)},
                    {"diagonal", "class entropy"},
                    {"last_row_col", "overall (label-agnostic) model"},
                    {"conventions", Conventions(cfg)}});
  const HeatmapScale own = MinMaxScale(dm.kl);
  bundle.Write(root / "kl_heatmap.ppm",
               EncodeHeatmapPpm(dm.kl, own, cfg.heatmap_cell));
  bundle.Write(root / "kl_heatmap_shared.ppm",
               EncodeHeatmapPpm(dm.kl, shared, cfg.heatmap_cell));

  json hist_doc = json::object();
  const auto populated = a.models.PopulatedClasses();
  for (std::size_t c : populated) {
    const std::string& name = a.models.class_names[c];
    const Histogram h = BuildHistogram(PathFrequencies(a.models.models[c]), cfg.bins);
    bundle.Write(root / "histograms" /
                     (std::to_string(c) + "_" + Sanitize(name) + ".csv"),
                 HistogramCsv(h));
    hist_doc[name] = HistogramJson(h);
  }
  const Histogram overall =
      BuildHistogram(PathFrequencies(a.models.overall), cfg.bins);
  bundle.Write(root / "histograms" / "overall.csv", HistogramCsv(overall));
  bundle.WriteJson(root / "histograms.json",
                   {{"classes", hist_doc}, {"overall", HistogramJson(overall)}});

  for (std::size_t c : populated) {
    const std::filesystem::path stem =
        root / "models" / ("class_" + std::to_string(c));
    std::filesystem::create_directories(bundle.root() / stem.parent_path());
    SaveModel(a.models.models[c], cfg.alpha, bundle.root() / stem);
    bundle.Adopt(stem.string() + ".npy");
    bundle.Adopt(stem.string() + ".json");
  }
  SaveModel(a.models.overall, cfg.alpha, bundle.root() / root / "models" / "overall");
  bundle.Adopt(root / "models" / "overall.npy");
  bundle.Adopt(root / "models" / "overall.json");

  if (!a.ablations.empty()) bundle.WriteJson(root / "ablations.json", a.ablations);

  if (cfg.export_masks) {
    ForEachSampleMask(dump, cfg.threshold_mode,
                      [&](std::size_t s, int, const SignificanceMask& mask) {
                        bundle.Write(root / "masks" /
                                         ("sample_" + std::to_string(s) + ".npy"),
                                     EncodeNpy(mask.ToMatrix(), Dtype::kF32));
                      });
  }
  bundle.WriteJson(root / "summary.json", SummaryJson(a, cfg, own, shared));
}

void AdoptTree(OutputBundle& bundle, const std::filesystem::path& relative) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(bundle.root() / relative)) {
    if (entry.is_regular_file()) {
      files.push_back(std::filesystem::relative(entry.path(), bundle.root()));
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) bundle.Adopt(f);
}

ActivationDump LoadInput(const std::filesystem::path& input,
                         const RunConfig& cfg) {
  return LoadDump(ResolveManifest(input, cfg.layer), cfg.manifest_mode);
}

CompareResult CompareAnalyses(Analysis id, Analysis ood, const RunConfig& cfg) {
  CompareResult out;
  out.distance = IdOodDistance(id.models, ood.models, cfg.alpha);
  double mean_distance = 0.0;
  for (double v : out.distance.per_class) mean_distance += v;
  mean_distance /= static_cast<double>(out.distance.per_class.size());

  json per_class = json::object();
  for (std::size_t c = 0; c < out.distance.classes.size(); ++c) {
    per_class[out.distance.classes[c]] = out.distance.per_class[c];
  }
  json deltas = {
      {"mean_class_entropy", ood.mean_class_entropy - id.mean_class_entropy},
      {"entropy_increased", ood.mean_class_entropy > id.mean_class_entropy}};
  if (id.mean_inter_class_kl && ood.mean_inter_class_kl) {
    deltas["mean_inter_class_kl"] =
        *ood.mean_inter_class_kl - *id.mean_inter_class_kl;
    deltas["inter_class_kl_decreased"] =
        *ood.mean_inter_class_kl < *id.mean_inter_class_kl;
  }
  deltas["mean_significant_fraction"] =
      ood.mean_significant_fraction - id.mean_significant_fraction;
  out.report = {
      {"id", {{"model_id", id.model_id},
              {"layer_id", id.layer_id},
              {"mean_inter_class_kl", OptionalJson(id.mean_inter_class_kl)},
              {"mean_class_entropy", id.mean_class_entropy},
              {"mean_significant_fraction", id.mean_significant_fraction}}},
      {"ood", {{"model_id", ood.model_id},
               {"layer_id", ood.layer_id},
               {"mean_inter_class_kl", OptionalJson(ood.mean_inter_class_kl)},
               {"mean_class_entropy", ood.mean_class_entropy},
               {"mean_significant_fraction", ood.mean_significant_fraction}}},
      {"shared_classes", out.distance.classes},
      {"id_ood_kl", per_class},
      {"mean_id_ood_kl", mean_distance},
      {"cross_matrix", MatrixJson(out.distance.cross)},
      {"deltas", deltas},
      {"conventions", Conventions(cfg)}};
  out.id = std::move(id);
  out.ood = std::move(ood);
  return out;
}

void WriteCompare(OutputBundle& bundle, const std::filesystem::path& dir,
                  const CompareResult& r) {
  std::string csv = "class,kl_id_ood\n";
  for (std::size_t c = 0; c < r.distance.classes.size(); ++c) {
    csv += r.distance.classes[c] + "," + FormatDouble(r.distance.per_class[c]) + "\n";
  }
  bundle.Write(dir / "id_ood.csv", csv);
  bundle.Write(dir / "id_ood_cross.csv",
               MatrixCsv(r.distance.cross, r.distance.classes, r.distance.classes));
  bundle.WriteJson(dir / "compare.json", r.report);
}

// Per-layer dumps of `data` pushed through `model`: layer l sees the
// post-activations of layer l - 1 (the raw input for l == 0).
void WriteModelDumps(const std::filesystem::path& dir, const std::string& model_id,
                     const Model& model, const LabeledDataset& data,
                     const std::vector<std::string>& class_names) {
  std::vector<DenseMatrix> inputs;
  for (const LayerSpec& layer : model) {
    inputs.emplace_back(data.size(), layer.weights.cols());
  }
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto x = data.inputs.row(s);
    const auto trace = Forward(model, x);
    for (std::size_t l = 0; l < model.size(); ++l) {
      std::span<const double> a =
          l == 0 ? x : std::span<const double>(trace[l - 1].post_activation);
      std::copy(a.begin(), a.end(), inputs[l].mutable_row(s).begin());
    }
  }
  for (std::size_t l = 0; l < model.size(); ++l) {
    const std::string layer_id =
        l + 1 == model.size() ? "final" : "fc" + std::to_string(l + 1);
    WriteDump(dir, model_id, layer_id, model[l].weights, model[l].bias,
              inputs[l], data.labels, class_names);
  }
}

std::string TraceCsv(const std::vector<EpochStats>& trace) {
  std::string out = "epoch,learning_rate,loss,train_accuracy\n";
  for (const auto& e : trace) {
    out += std::to_string(e.epoch) + "," + FormatDouble(e.learning_rate) + "," +
           FormatDouble(e.loss) + "," + FormatDouble(e.accuracy) + "\n";
  }
  return out;
}

}  // namespace

bool RunConfig::HasMetric(const std::string& name) const {
  return std::find(metrics.begin(), metrics.end(), name) != metrics.end();
}

RunConfig ParseRunConfig(const std::string& json_text,
                         const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kUsage, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kUsage, "config must be a JSON object");
  RejectUnknown(doc,
                {"inputs", "layer", "threshold_mode", "alpha", "bins", "metrics",
                 "out_dir", "seed", "shared_scale", "export_masks", "max_pairs",
                 "heatmap_cell", "lenient_manifest", "synthetic"},
                "run");
  auto resolve = [&](const std::filesystem::path& p) {
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  RunConfig cfg;
  for (const auto& p : Get<std::vector<std::string>>(doc, "inputs", {})) {
    cfg.inputs.push_back(resolve(p));
  }
  if (doc.contains("layer") && !doc.at("layer").is_null()) {
    cfg.layer = Get<std::string>(doc, "layer", "");
  }
  cfg.threshold_mode =
      ThresholdMode::Parse(Get<std::string>(doc, "threshold_mode", "literal"));
  cfg.alpha = Get(doc, "alpha", cfg.alpha);
  cfg.bins = Get(doc, "bins", cfg.bins);
  cfg.metrics = Get(doc, "metrics", cfg.metrics);
  cfg.out_dir = resolve(Get<std::string>(doc, "out_dir", cfg.out_dir.string()));
  cfg.seed = Get(doc, "seed", cfg.seed);
  cfg.shared_scale = Get(doc, "shared_scale", cfg.shared_scale);
  cfg.export_masks = Get(doc, "export_masks", cfg.export_masks);
  cfg.max_pairs = Get(doc, "max_pairs", cfg.max_pairs);
  cfg.heatmap_cell = Get(doc, "heatmap_cell", cfg.heatmap_cell);
  if (Get(doc, "lenient_manifest", false)) cfg.manifest_mode = ManifestMode::kLenient;
  if (doc.contains("synthetic")) cfg.synthetic = ParseSynthetic(doc.at("synthetic"));
  return cfg;
}

void ValidateRunConfig(const RunConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) {
    throw Error(ErrorCode::kUsage, "alpha must be >= 0");
  }
  if (cfg.bins < 1) throw Error(ErrorCode::kUsage, "bins must be >= 1");
  if (cfg.heatmap_cell < 1) throw Error(ErrorCode::kUsage, "heatmap_cell must be >= 1");
  for (const auto& m : cfg.metrics) {
    if (std::find(AllMetrics().begin(), AllMetrics().end(), m) == AllMetrics().end()) {
      throw Error(ErrorCode::kUsage, "unknown metric '" + m + "'");
    }
  }
}

json RunConfigJson(const RunConfig& cfg) {
  std::vector<std::string> inputs;
  for (const auto& p : cfg.inputs) inputs.push_back(p.generic_string());
  return {{"inputs", inputs},
          {"layer", cfg.layer ? json(*cfg.layer) : json()},
          {"threshold_mode", cfg.threshold_mode.ToString()},
          {"alpha", cfg.alpha},
          {"bins", cfg.bins},
          {"metrics", cfg.metrics},
          {"seed", cfg.seed},
          {"shared_scale", cfg.shared_scale},
          {"export_masks", cfg.export_masks},
          {"max_pairs", cfg.max_pairs},
          {"heatmap_cell", cfg.heatmap_cell},
          {"lenient_manifest", cfg.manifest_mode == ManifestMode::kLenient},
          {"synthetic", SyntheticJson(cfg.synthetic)}};
}

Analysis AnalyzeDump(const ActivationDump& dump, const RunConfig& cfg) {
  Analysis a;
  a.model_id = dump.manifest.model_id;
  a.layer_id = dump.manifest.layer_id;
  a.sample_count = dump.sample_count();
  a.models = AccumulateDump(dump, cfg.threshold_mode);
  a.matrix = PairwiseMatrix(a.models, cfg.alpha);

  const auto populated = a.models.PopulatedClasses();
  std::vector<BernoulliClassModel> present;
  for (std::size_t c : populated) present.push_back(a.models.models[c]);
  if (present.size() >= 2) a.mean_inter_class_kl = MeanInterClass(a.matrix);
  a.mean_class_entropy = MeanClassEntropy(present, cfg.alpha);
  a.overall_entropy = a.matrix.kl(a.matrix.kl.rows() - 1, a.matrix.kl.cols() - 1);

  double significant = 0.0;
  for (double v : a.models.overall.counts().values()) significant += v;
  a.mean_significant_fraction =
      significant / (static_cast<double>(a.models.overall.sample_count()) *
                     static_cast<double>(a.models.overall.counts().size()));
  for (const auto& m : present) {
    a.tail_mass_09.push_back(TailMass(PathFrequencies(m), kTailThreshold));
  }

  a.ablations = json::object();
  std::vector<std::string> names;
  for (std::size_t c : populated) names.push_back(a.models.class_names[c]);
  const PairSampling sampling{cfg.max_pairs, cfg.seed};
  if (cfg.HasMetric("path_kl")) {
    a.ablations["path_kl"] = {{"inter", OptionalJson(a.mean_inter_class_kl)},
                              {"intra", a.mean_class_entropy}};
  }
  if (cfg.HasMetric("prototype_kl")) {
    const PrototypeKlResult r = PrototypeInteractionKl(ClassPrototypes(dump));
    a.ablations["prototype_kl"] = {
        {"inter", present.size() >= 2 ? json(r.inter) : json()},
        {"intra", r.intra},
        {"classes", names},
        {"pairwise", MatrixJson(r.pairwise)}};
  }
  if (cfg.HasMetric("softmax_kl")) {
    a.ablations["softmax_kl"] =
        SpreadJson(SoftmaxOutputKl(SoftmaxClouds(dump), kSoftmaxClamp, sampling),
                   names);
  }
  if (cfg.HasMetric("energy")) {
    a.ablations["energy"] =
        SpreadJson(EnergyDistances(ActivationClouds(dump), sampling), names);
  }
  return a;
}

AnalyzeResult CmdAnalyze(const RunConfig& cfg) {
  ValidateRunConfig(cfg);
  if (cfg.inputs.empty()) throw Error(ErrorCode::kUsage, "analyze needs at least one input");
  std::vector<ActivationDump> dumps;
  AnalyzeResult result;
  for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
    dumps.push_back(LoadInput(cfg.inputs[i], cfg));
    result.runs.push_back(AnalyzeDump(dumps.back(), cfg));
    result.run_dirs.push_back("run" + std::to_string(i) + "_" +
                              Sanitize(dumps.back().manifest.model_id) + "_" +
                              Sanitize(dumps.back().manifest.layer_id));
  }
  std::vector<const DenseMatrix*> matrices;
  for (const auto& run : result.runs) matrices.push_back(&run.matrix.kl);
  result.shared_scale = SharedScale(matrices);

  OutputBundle bundle(cfg.out_dir);
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const HeatmapScale scale = cfg.shared_scale ? result.shared_scale
                                                : MinMaxScale(result.runs[i].matrix.kl);
    WriteAnalysis(bundle, result.run_dirs[i], result.runs[i], dumps[i], cfg, scale);
  }
  json runs = json::array();
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    runs.push_back({{"dir", result.run_dirs[i]},
                    {"model_id", result.runs[i].model_id},
                    {"layer_id", result.runs[i].layer_id},
                    {"mean_inter_class_kl",
                     OptionalJson(result.runs[i].mean_inter_class_kl)},
                    {"mean_class_entropy", result.runs[i].mean_class_entropy}});
  }
  bundle.WriteJson("analysis.json",
                   {{"command", "analyze"},
                    {"runs", runs},
                    {"shared_scale", ScaleJson(result.shared_scale)},
                    {"config", RunConfigJson(cfg)}});
  bundle.WriteIndex();
  return result;
}

CompareResult CmdCompare(const RunConfig& cfg) {
  ValidateRunConfig(cfg);
  if (cfg.inputs.size() != 2) {
    throw Error(ErrorCode::kUsage, "compare needs exactly two inputs (ID, OOD)");
  }
  const ActivationDump id_dump = LoadInput(cfg.inputs[0], cfg);
  const ActivationDump ood_dump = LoadInput(cfg.inputs[1], cfg);
  CompareResult result = CompareAnalyses(AnalyzeDump(id_dump, cfg),
                                         AnalyzeDump(ood_dump, cfg), cfg);

  const DenseMatrix* mats[] = {&result.id.matrix.kl, &result.ood.matrix.kl};
  const HeatmapScale shared = SharedScale(mats);
  OutputBundle bundle(cfg.out_dir);
  WriteAnalysis(bundle, "id", result.id, id_dump, cfg,
                cfg.shared_scale ? shared : MinMaxScale(result.id.matrix.kl));
  WriteAnalysis(bundle, "ood", result.ood, ood_dump, cfg,
                cfg.shared_scale ? shared : MinMaxScale(result.ood.matrix.kl));
  WriteCompare(bundle, "", result);
  bundle.WriteIndex();
  return result;
}

MemorisationResult CmdMemorisation(const RunConfig& cfg) {
  ValidateRunConfig(cfg);
  const SyntheticConfig& syn = cfg.synthetic;
  if (syn.classes < 2 || syn.hidden.empty()) {
    throw Error(ErrorCode::kUsage,
                "memorisation needs >= 2 classes and >= 1 hidden layer");
  }
  std::vector<std::string> class_names;
  for (int c = 0; c < syn.classes; ++c) class_names.push_back("class" + std::to_string(c));

  BlobSpec train_spec;
  train_spec.num_classes = syn.classes;
  train_spec.dims = syn.dims;
  train_spec.per_class = syn.per_class;
  train_spec.means = RandomMeans(syn.classes, syn.dims, syn.mean_spread, syn.data_seed);
  train_spec.sigma = syn.sigma;
  train_spec.seed = syn.data_seed;
  const LabeledDataset train = GenBlobs(train_spec);

  BlobSpec test_spec = train_spec;
  test_spec.per_class = syn.test_per_class;
  test_spec.seed = syn.data_seed + 1;
  const LabeledDataset test = GenBlobs(test_spec);

  BlobSpec ood_spec = test_spec;
  const double shift = syn.ood_shift_sigmas * syn.sigma;
  if (syn.ood_shift_mode == "random_direction") {
    ood_spec.shift = RandomDirection(syn.dims, syn.data_seed + 2);
    for (double& v : ood_spec.shift) v *= shift;
  } else {
    ood_spec.class_shifts = ShiftsTowardCentroid(train_spec.means, shift);
  }
  ood_spec.noise_scale = syn.ood_noise_scale;
  const LabeledDataset ood = GenBlobs(ood_spec);

  std::vector<int> sizes = {syn.dims};
  sizes.insert(sizes.end(), syn.hidden.begin(), syn.hidden.end());
  sizes.push_back(syn.classes);
  const Model init = InitModel(sizes, syn.init_seed);

  struct Condition {
    std::string name;
    Model model;
    std::vector<EpochStats> trace;
    double train_accuracy;
  };
  std::vector<Condition> conditions;
  conditions.push_back({"untrained", init, {}, Accuracy(init, train)});
  const LabeledDataset shuffled = ShuffleLabels(train, syn.shuffle_seed);
  TrainResult r = TrainSgd(init, shuffled, syn.train);
  conditions.push_back({"shuffled", r.model, r.trace, Accuracy(r.model, shuffled)});
  r = TrainSgd(init, train, syn.train);
  conditions.push_back({"true", r.model, r.trace, Accuracy(r.model, train)});

  OutputBundle bundle(cfg.out_dir);
  MemorisationResult result;
  std::vector<ActivationDump> dumps;
  for (const Condition& cond : conditions) {
    const std::filesystem::path data_dir = std::filesystem::path(cond.name) / "data";
    WriteModelDumps(bundle.root() / data_dir, "mlp_" + cond.name, cond.model, test,
                    class_names);
    AdoptTree(bundle, data_dir);
    if (!cond.trace.empty()) {
      bundle.Write(std::filesystem::path(cond.name) / "train_trace.csv",
                   TraceCsv(cond.trace));
    }
    dumps.push_back(LoadInput(bundle.root() / data_dir, cfg));
    ConditionRow row;
    row.condition = cond.name;
    row.train_accuracy = cond.train_accuracy;
    row.test_accuracy = Accuracy(cond.model, test);
    row.analysis = AnalyzeDump(dumps.back(), cfg);
    result.rows.push_back(std::move(row));
  }

  std::vector<const DenseMatrix*> matrices;
  for (const auto& row : result.rows) matrices.push_back(&row.analysis.matrix.kl);
  const HeatmapScale shared = SharedScale(matrices);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    WriteAnalysis(bundle, result.rows[i].condition + "/analysis",
                  result.rows[i].analysis, dumps[i], cfg,
                  cfg.shared_scale ? shared
                                   : MinMaxScale(result.rows[i].analysis.matrix.kl));
  }

  // Distribution shift: the true-label model on a mean-shifted copy of the
  // analysed set.
  const std::filesystem::path ood_data = std::filesystem::path("ood") / "data";
  WriteModelDumps(bundle.root() / ood_data, "mlp_true_ood", conditions.back().model,
                  ood, class_names);
  AdoptTree(bundle, ood_data);
  const ActivationDump ood_dump = LoadInput(bundle.root() / ood_data, cfg);
  result.ood = CompareAnalyses(result.rows.back().analysis,
                               AnalyzeDump(ood_dump, cfg), cfg);
  const DenseMatrix* ood_mats[] = {&result.ood.id.matrix.kl, &result.ood.ood.matrix.kl};
  WriteAnalysis(bundle, "ood/analysis", result.ood.ood, ood_dump, cfg,
                cfg.shared_scale ? SharedScale(ood_mats)
                                 : MinMaxScale(result.ood.ood.matrix.kl));
  WriteCompare(bundle, "ood", result.ood);

  auto ablation_inter = [](const Analysis& a, const char* metric) -> json {
    if (!a.ablations.contains(metric)) return json();
    return a.ablations.at(metric).at("inter");
  };
  std::string csv =
      "condition,mean_inter_class_kl,mean_class_entropy,train_accuracy,"
      "test_accuracy,mean_significant_fraction,prototype_kl_inter,"
      "softmax_kl_inter,energy_inter\n";
  json rows = json::array();
  for (const auto& row : result.rows) {
    const Analysis& a = row.analysis;
    auto cell = [](const json& v) {
      return v.is_number() ? FormatDouble(v.get<double>()) : std::string();
    };
    csv += row.condition + "," + FormatDouble(*a.mean_inter_class_kl) + "," +
           FormatDouble(a.mean_class_entropy) + "," +
           FormatDouble(row.train_accuracy) + "," + FormatDouble(row.test_accuracy) +
           "," + FormatDouble(a.mean_significant_fraction) + "," +
           cell(ablation_inter(a, "prototype_kl")) + "," +
           cell(ablation_inter(a, "softmax_kl")) + "," +
           cell(ablation_inter(a, "energy")) + "\n";
    rows.push_back({{"condition", row.condition},
                    {"mean_inter_class_kl", *a.mean_inter_class_kl},
                    {"mean_class_entropy", a.mean_class_entropy},
                    {"train_accuracy", row.train_accuracy},
                    {"test_accuracy", row.test_accuracy},
                    {"mean_significant_fraction", a.mean_significant_fraction},
                    {"ablations", a.ablations}});
  }
  const double untrained_kl = *result.rows[0].analysis.mean_inter_class_kl;
  result.report = {
      {"command", "memorisation"},
      {"rows", rows},
      {"ratios",
       {{"true_over_untrained",
         *result.rows[2].analysis.mean_inter_class_kl / untrained_kl},
        {"shuffled_over_untrained",
         *result.rows[1].analysis.mean_inter_class_kl / untrained_kl}}},
      {"ood", result.ood.report},
      {"heatmap_shared_scale", ScaleJson(shared)},
      {"config", RunConfigJson(cfg)}};
  bundle.Write("memorisation.csv", csv);
  bundle.WriteJson("memorisation.json", result.report);
  bundle.WriteIndex();
  return result;
}

}  // namespace pathsig
