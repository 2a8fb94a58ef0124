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

#ifndef PATHSIG_DUMP_H_
#define PATHSIG_DUMP_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pathsig/matrix.h"
#include "pathsig/npy.h"

namespace pathsig {

// The manifest document. File paths are stored as written; relative paths
// resolve against the manifest's directory.
struct DumpManifest {
  std::string model_id;
  std::string layer_id;
  std::filesystem::path weight_file;
  std::optional<std::filesystem::path> bias_file;
  std::filesystem::path activation_file;
  std::filesystem::path label_file;
  std::vector<std::string> class_names;
  Dtype dtype = Dtype::kF64;
  std::size_t sample_count = 0;
};

// A validated dump with its arrays in memory. Activations are the layer's
// inputs, one row per sample.
struct ActivationDump {
  DumpManifest manifest;
  std::filesystem::path manifest_path;
  DenseMatrix weights;        // m x n
  std::vector<double> bias;   // m, or empty when the manifest has none
  DenseMatrix activations;    // S x n
  std::vector<int> labels;    // S

  std::size_t sample_count() const { return labels.size(); }
  std::size_t num_classes() const { return manifest.class_names.size(); }
};

enum class ManifestMode {
  kStrict,   // unknown keys are an error
  kLenient,  // unknown keys are reported on stderr and ignored
};

DumpManifest ParseManifest(const std::string& json_text, ManifestMode mode);
std::string SerializeManifest(const DumpManifest& manifest);

// Parses the manifest, loads every referenced array and checks the cross
// invariants (shapes, label range, dtype agreement). Throws Error with kIo for
// missing files, kFormat for schema problems, kShape for dimension mismatches
// and kRange for bad labels.
ActivationDump LoadDump(const std::filesystem::path& manifest_path,
                        ManifestMode mode = ManifestMode::kStrict);

// Writes weights/bias/activations/labels next to a manifest named
// `manifest_<layer_id>.json` inside `dir` and returns the manifest path.
// File names in the manifest are relative to `dir`.
std::filesystem::path WriteDump(const std::filesystem::path& dir,
                                const std::string& model_id,
                                const std::string& layer_id,
                                const DenseMatrix& weights,
                                const std::vector<double>& bias,
                                const DenseMatrix& activations,
                                const std::vector<int>& labels,
                                const std::vector<std::string>& class_names,
                                Dtype dtype = Dtype::kF64);

// Resolves an input given on the command line or in a config: a manifest file
// is returned as is (after checking `layer`, when given, against its
// layer_id); a directory resolves to `manifest_<layer>.json` inside it, with
// `layer` defaulting to "final".
std::filesystem::path ResolveManifest(const std::filesystem::path& input,
                                      const std::optional<std::string>& layer);

}  // namespace pathsig

#endif  // PATHSIG_DUMP_H_
