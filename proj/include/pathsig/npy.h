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

#ifndef PATHSIG_NPY_H_
#define PATHSIG_NPY_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "pathsig/matrix.h"

namespace pathsig {

enum class Dtype { kF32, kF64 };

const char* DtypeName(Dtype dtype);      // "f32" / "f64"
Dtype ParseDtype(std::string_view name);  // throws kFormat

// Contents of an NPY file after decoding. A 1-D array of length n decodes to
// a 1 x n matrix with ndim == 1.
struct NpyArray {
  DenseMatrix matrix;
  std::string descr;  // as it appeared in the header, e.g. "<f8"
  int ndim = 2;
};

// NPY v1.0 encoding: magic, version 1.0, little-endian u16 header length,
// space-padded dict header ending in '\n' so that the preamble is a multiple
// of 64 bytes, then the little-endian row-major payload.
std::string EncodeNpy(const DenseMatrix& matrix, Dtype dtype);
std::string EncodeNpyVector(std::span<const double> values, Dtype dtype);

// Accepts versions 1.0 and 2.0, C order, 1-D or 2-D shapes with positive
// extents. Float payloads must be '<f4' or '<f8'; little-endian or
// single-byte integer payloads ('<i8', '|u1', ...) are widened to f64 so that
// label files written with numpy's default integer dtype load too. Anything
// else, including big-endian data, is rejected.
NpyArray DecodeNpy(std::string_view bytes);

void WriteArray(const DenseMatrix& matrix, const std::filesystem::path& path,
                Dtype dtype);
void WriteVector(std::span<const double> values,
                 const std::filesystem::path& path, Dtype dtype);

NpyArray ReadNpy(const std::filesystem::path& path);
DenseMatrix ReadArray(const std::filesystem::path& path);

// Whole-file helpers shared by the writers in this library.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace pathsig

#endif  // PATHSIG_NPY_H_
