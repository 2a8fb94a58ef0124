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

#include "pathsig/outputs.h"

#include <openssl/evp.h>

#include <charconv>
#include <memory>

#include "pathsig/error.h"
#include "pathsig/npy.h"

namespace pathsig {

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string MatrixCsv(const DenseMatrix& m,
                      std::span<const std::string> row_labels,
                      std::span<const std::string> col_labels) {
  if (row_labels.size() != m.rows() || col_labels.size() != m.cols()) {
    throw Error(ErrorCode::kShape, "CSV labels do not match matrix shape");
  }
  std::string out = "label";
  for (const auto& l : col_labels) out += "," + l;
  out += "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += row_labels[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out += "," + FormatDouble(m(r, c));
    out += "\n";
  }
  return out;
}

std::string HistogramCsv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out += FormatDouble(h.bin_edges[k]) + "," + FormatDouble(h.bin_edges[k + 1]) +
           "," + std::to_string(h.counts[k]) + "\n";
  }
  return out;
}

nlohmann::json HistogramJson(const Histogram& h) {
  return {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"total", h.total}};
}

nlohmann::json MatrixJson(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

OutputBundle::OutputBundle(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputBundle::Write(const std::filesystem::path& relative,
                         std::string_view bytes) {
  const std::filesystem::path full = root_ / relative;
  std::filesystem::create_directories(full.parent_path());
  WriteFileBytes(full, bytes);
  entries_[relative.generic_string()] = {bytes.size(), Sha256Hex(bytes)};
}

void OutputBundle::WriteJson(const std::filesystem::path& relative,
                             const nlohmann::json& doc) {
  Write(relative, doc.dump(2) + "\n");
}

void OutputBundle::Adopt(const std::filesystem::path& relative) {
  const std::string bytes = ReadFileBytes(root_ / relative);
  entries_[relative.generic_string()] = {bytes.size(), Sha256Hex(bytes)};
}

void OutputBundle::WriteIndex() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [path, entry] : entries_) {
    files.push_back(
        {{"path", path}, {"bytes", entry.bytes}, {"sha256", entry.sha256}});
  }
  nlohmann::json index = {{"files", files}};
  WriteFileBytes(root_ / "index.json", index.dump(2) + "\n");
}

}  // namespace pathsig
