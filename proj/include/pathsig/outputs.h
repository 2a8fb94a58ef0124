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

#ifndef PATHSIG_OUTPUTS_H_
#define PATHSIG_OUTPUTS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pathsig/matrix.h"
#include "pathsig/sparsity.h"

namespace pathsig {

// Shortest decimal that round-trips to the same double.
std::string FormatDouble(double v);

std::string Sha256Hex(std::string_view bytes);

// Labelled CSV: header "label,<col labels...>", then one row per matrix row.
std::string MatrixCsv(const DenseMatrix& m, std::span<const std::string> row_labels,
                      std::span<const std::string> col_labels);

// "bin_lo,bin_hi,count" rows.
std::string HistogramCsv(const Histogram& h);
nlohmann::json HistogramJson(const Histogram& h);
nlohmann::json MatrixJson(const DenseMatrix& m);

// Collects the files of one report directory and writes index.json listing
// each with its size and SHA-256. Paths in the index are relative to root.
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void Write(const std::filesystem::path& relative, std::string_view bytes);
  void WriteJson(const std::filesystem::path& relative,
                 const nlohmann::json& doc);
  // Registers a file some other writer already produced under root.
  void Adopt(const std::filesystem::path& relative);

  void WriteIndex() const;

 private:
  struct Entry {
    std::size_t bytes = 0;
    std::string sha256;
  };

  std::filesystem::path root_;
  std::map<std::string, Entry> entries_;
};

}  // namespace pathsig

#endif  // PATHSIG_OUTPUTS_H_
