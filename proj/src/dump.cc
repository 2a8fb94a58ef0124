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

#include "pathsig/dump.h"

#include <cmath>
#include <iostream>
#include <set>

#include "json.hpp"
#include "pathsig/error.h"

namespace pathsig {
namespace {

using nlohmann::json;

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "model_id",   "layer_id",        "weight_file", "bias_file",
      "activation_file", "label_file", "class_names", "dtype",
      "sample_count"};
  return keys;
}

template <typename T>
T Required(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw Error(ErrorCode::kFormat,
                std::string("manifest missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kFormat,
                std::string("manifest field '") + key + "' has the wrong type");
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

NpyArray LoadReferenced(const std::filesystem::path& path, const char* role) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo,
                std::string(role) + " file does not exist: " + path.string());
  }
  return ReadNpy(path);
}

void CheckFloatDtype(const NpyArray& array, Dtype expected, const char* role) {
  const char* want = expected == Dtype::kF64 ? "<f8" : "<f4";
  if (array.descr != want) {
    throw Error(ErrorCode::kFormat, std::string(role) + " file has dtype " +
                                        array.descr + " but manifest says " +
                                        DtypeName(expected));
  }
}

}  // namespace

DumpManifest ParseManifest(const std::string& json_text, ManifestMode mode) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat,
                std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kFormat, "manifest must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (KnownKeys().count(key)) continue;
    if (mode == ManifestMode::kStrict) {
      throw Error(ErrorCode::kFormat, "manifest has unknown key '" + key + "'");
    }
    std::cerr << "warning: ignoring unknown manifest key '" << key << "'\n";
  }

  DumpManifest m;
  m.model_id = Required<std::string>(doc, "model_id");
  m.layer_id = Required<std::string>(doc, "layer_id");
  m.weight_file = Required<std::string>(doc, "weight_file");
  if (doc.contains("bias_file") && !doc.at("bias_file").is_null()) {
    m.bias_file = Required<std::string>(doc, "bias_file");
  }
  m.activation_file = Required<std::string>(doc, "activation_file");
  m.label_file = Required<std::string>(doc, "label_file");
  m.class_names = Required<std::vector<std::string>>(doc, "class_names");
  m.dtype = ParseDtype(Required<std::string>(doc, "dtype"));
  const json& count = doc.contains("sample_count") ? doc.at("sample_count")
                                                   : json();
  if (!count.is_number_unsigned() && !count.is_number_integer()) {
    throw Error(ErrorCode::kFormat,
                "manifest field 'sample_count' must be an integer");
  }
  const auto raw_count = count.get<long long>();
  if (raw_count < 1) {
    throw Error(ErrorCode::kRange, "manifest sample_count must be >= 1");
  }
  m.sample_count = static_cast<std::size_t>(raw_count);
  if (m.class_names.empty()) {
    throw Error(ErrorCode::kFormat, "manifest class_names is empty");
  }
  return m;
}

std::string SerializeManifest(const DumpManifest& m) {
  json doc;
  doc["model_id"] = m.model_id;
  doc["layer_id"] = m.layer_id;
  doc["weight_file"] = m.weight_file.generic_string();
  doc["bias_file"] = m.bias_file ? json(m.bias_file->generic_string()) : json();
  doc["activation_file"] = m.activation_file.generic_string();
  doc["label_file"] = m.label_file.generic_string();
  doc["class_names"] = m.class_names;
  doc["dtype"] = DtypeName(m.dtype);
  doc["sample_count"] = m.sample_count;
  return doc.dump(2) + "\n";
}

ActivationDump LoadDump(const std::filesystem::path& manifest_path,
                        ManifestMode mode) {
  if (!std::filesystem::is_regular_file(manifest_path)) {
    throw Error(ErrorCode::kIo,
                "manifest does not exist: " + manifest_path.string());
  }
  ActivationDump dump;
  dump.manifest_path = manifest_path;
  dump.manifest = ParseManifest(ReadFileBytes(manifest_path), mode);
  const DumpManifest& m = dump.manifest;
  const std::filesystem::path base = manifest_path.parent_path();

  NpyArray weights = LoadReferenced(Resolve(base, m.weight_file), "weight");
  CheckFloatDtype(weights, m.dtype, "weight");
  if (weights.ndim != 2) {
    throw Error(ErrorCode::kShape, "weight file must be 2-D");
  }
  dump.weights = std::move(weights.matrix);

  if (m.bias_file) {
    NpyArray bias = LoadReferenced(Resolve(base, *m.bias_file), "bias");
    CheckFloatDtype(bias, m.dtype, "bias");
    if (bias.ndim == 2 && bias.matrix.rows() != 1 && bias.matrix.cols() != 1) {
      throw Error(ErrorCode::kShape, "bias file must be a vector");
    }
    auto v = bias.matrix.values();
    dump.bias.assign(v.begin(), v.end());
    if (dump.bias.size() != dump.weights.rows()) {
      throw Error(ErrorCode::kShape,
                  "bias length " + std::to_string(dump.bias.size()) +
                      " != weight rows " + std::to_string(dump.weights.rows()));
    }
  }

  NpyArray acts =
      LoadReferenced(Resolve(base, m.activation_file), "activation");
  CheckFloatDtype(acts, m.dtype, "activation");
  if (acts.ndim != 2) {
    throw Error(ErrorCode::kShape, "activation file must be 2-D");
  }
  dump.activations = std::move(acts.matrix);
  if (dump.activations.cols() != dump.weights.cols()) {
    throw Error(ErrorCode::kShape,
                "weight cols " + std::to_string(dump.weights.cols()) +
                    " != activation cols " +
                    std::to_string(dump.activations.cols()));
  }

  NpyArray labels = LoadReferenced(Resolve(base, m.label_file), "label");
  if (labels.ndim == 2 && labels.matrix.rows() != 1 &&
      labels.matrix.cols() != 1) {
    throw Error(ErrorCode::kShape, "label file must be a vector");
  }
  const auto raw_labels = labels.matrix.values();
  if (raw_labels.size() != dump.activations.rows()) {
    throw Error(ErrorCode::kShape,
                "label length " + std::to_string(raw_labels.size()) +
                    " != activation rows " +
                    std::to_string(dump.activations.rows()));
  }
  if (raw_labels.size() != m.sample_count) {
    throw Error(ErrorCode::kShape,
                "manifest sample_count " + std::to_string(m.sample_count) +
                    " != label length " + std::to_string(raw_labels.size()));
  }
  dump.labels.reserve(raw_labels.size());
  for (std::size_t s = 0; s < raw_labels.size(); ++s) {
    const double v = raw_labels[s];
    if (v != std::floor(v) || v < 0 ||
        v >= static_cast<double>(m.class_names.size())) {
      throw Error(ErrorCode::kRange,
                  "label " + std::to_string(v) + " at sample " +
                      std::to_string(s) + " outside [0, " +
                      std::to_string(m.class_names.size()) + ")");
    }
    dump.labels.push_back(static_cast<int>(v));
  }
  return dump;
}

std::filesystem::path WriteDump(const std::filesystem::path& dir,
                                const std::string& model_id,
                                const std::string& layer_id,
                                const DenseMatrix& weights,
                                const std::vector<double>& bias,
                                const DenseMatrix& activations,
                                const std::vector<int>& labels,
                                const std::vector<std::string>& class_names,
                                Dtype dtype) {
  std::filesystem::create_directories(dir);
  DumpManifest m;
  m.model_id = model_id;
  m.layer_id = layer_id;
  m.weight_file = layer_id + "_weights.npy";
  if (!bias.empty()) m.bias_file = layer_id + "_bias.npy";
  m.activation_file = layer_id + "_activations.npy";
  m.label_file = layer_id + "_labels.npy";
  m.class_names = class_names;
  m.dtype = dtype;
  m.sample_count = labels.size();

  WriteArray(weights, dir / m.weight_file, dtype);
  if (m.bias_file) WriteVector(bias, dir / *m.bias_file, dtype);
  WriteArray(activations, dir / m.activation_file, dtype);
  std::vector<double> label_values(labels.begin(), labels.end());
  WriteVector(label_values, dir / m.label_file, dtype);

  const std::filesystem::path manifest = dir / ("manifest_" + layer_id + ".json");
  WriteFileBytes(manifest, SerializeManifest(m));
  return manifest;
}

std::filesystem::path ResolveManifest(const std::filesystem::path& input,
                                      const std::optional<std::string>& layer) {
  if (std::filesystem::is_directory(input)) {
    const std::filesystem::path manifest =
        input / ("manifest_" + layer.value_or("final") + ".json");
    if (!std::filesystem::exists(manifest)) {
      throw Error(ErrorCode::kIo, "no manifest for layer '" +
                                      layer.value_or("final") + "' in " +
                                      input.string());
    }
    return manifest;
  }
  if (layer) {
    const DumpManifest m =
        ParseManifest(ReadFileBytes(input), ManifestMode::kLenient);
    if (m.layer_id != *layer) {
      throw Error(ErrorCode::kUsage, input.string() + " holds layer '" +
                                         m.layer_id + "', not '" + *layer +
                                         "'");
    }
  }
  return input;
}

}  // namespace pathsig
