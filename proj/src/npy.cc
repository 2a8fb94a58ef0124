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

#include "pathsig/npy.h"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "pathsig/error.h"

namespace pathsig {
namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

template <typename U>
void AppendLittleEndian(std::string& out, U bits) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

template <typename U>
U LoadLittleEndian(const unsigned char* p) {
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bits |= static_cast<U>(p[i]) << (8 * i);
  }
  return bits;
}

std::string ShapeTuple(std::size_t rows, std::size_t cols, bool vector) {
  if (vector) return "(" + std::to_string(cols) + ",)";
  return "(" + std::to_string(rows) + ", " + std::to_string(cols) + ")";
}

std::string Encode(std::span<const double> values, std::size_t rows,
                   std::size_t cols, bool vector, Dtype dtype) {
  std::string header = "{'descr': '";
  header += dtype == Dtype::kF64 ? "<f8" : "<f4";
  header += "', 'fortran_order': False, 'shape': ";
  header += ShapeTuple(rows, cols, vector);
  header += ", }";
  // magic(6) + version(2) + length(2) + header + '\n' padded to 64.
  const std::size_t unpadded = kMagicLen + 2 + 2 + header.size() + 1;
  const std::size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');

  const std::size_t width = dtype == Dtype::kF64 ? 8 : 4;
  std::string out;
  out.reserve(padded + values.size() * width);
  out.append(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  AppendLittleEndian(out, static_cast<std::uint16_t>(header.size()));
  out += header;
  for (double v : values) {
    if (dtype == Dtype::kF64) {
      AppendLittleEndian(out, std::bit_cast<std::uint64_t>(v));
    } else {
      AppendLittleEndian(out,
                         std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

// Minimal reader for the python-literal dict numpy writes.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  std::string_view ValueOf(std::string_view key) const {
    const std::string quoted = "'" + std::string(key) + "'";
    std::size_t pos = text_.find(quoted);
    if (pos == std::string_view::npos) {
      throw Error(ErrorCode::kFormat,
                  "npy header missing key " + std::string(key));
    }
    pos = text_.find(':', pos + quoted.size());
    if (pos == std::string_view::npos) {
      throw Error(ErrorCode::kFormat, "npy header malformed near " + quoted);
    }
    ++pos;
    while (pos < text_.size() && text_[pos] == ' ') ++pos;
    if (pos >= text_.size()) {
      throw Error(ErrorCode::kFormat, "npy header truncated");
    }
    std::size_t end;
    if (text_[pos] == '\'') {
      end = text_.find('\'', pos + 1);
      if (end == std::string_view::npos) {
        throw Error(ErrorCode::kFormat, "npy header unterminated string");
      }
      return text_.substr(pos + 1, end - pos - 1);
    }
    if (text_[pos] == '(') {
      end = text_.find(')', pos);
      if (end == std::string_view::npos) {
        throw Error(ErrorCode::kFormat, "npy header unterminated shape");
      }
      return text_.substr(pos, end - pos + 1);
    }
    end = text_.find_first_of(",}", pos);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view v = text_.substr(pos, end - pos);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    return v;
  }

 private:
  std::string_view text_;
};

std::vector<std::size_t> ParseShape(std::string_view tuple) {
  // tuple includes the parentheses.
  std::vector<std::size_t> dims;
  std::string_view body = tuple.substr(1, tuple.size() - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == ',')) ++pos;
    if (pos >= body.size()) break;
    std::size_t value = 0;
    auto [ptr, ec] =
        std::from_chars(body.data() + pos, body.data() + body.size(), value);
    if (ec != std::errc()) {
      throw Error(ErrorCode::kFormat,
                  "npy shape is not a tuple of integers: " +
                      std::string(tuple));
    }
    dims.push_back(value);
    pos = static_cast<std::size_t>(ptr - body.data());
  }
  return dims;
}

struct ElementType {
  char kind;  // 'f', 'i', 'u', 'b'
  std::size_t width;
};

ElementType ParseDescr(std::string_view descr) {
  if (descr.size() < 3) {
    throw Error(ErrorCode::kFormat, "unsupported dtype " + std::string(descr));
  }
  const char order = descr[0];
  const char kind = descr[1];
  std::size_t width = 0;
  auto [ptr, ec] =
      std::from_chars(descr.data() + 2, descr.data() + descr.size(), width);
  if (ec != std::errc() || ptr != descr.data() + descr.size()) {
    throw Error(ErrorCode::kFormat, "unsupported dtype " + std::string(descr));
  }
  const bool little = order == '<' || (order == '|' && width == 1);
  if (!little) {
    throw Error(ErrorCode::kFormat,
                "unsupported byte order in dtype " + std::string(descr));
  }
  const bool ok =
      (kind == 'f' && (width == 4 || width == 8)) ||
      ((kind == 'i' || kind == 'u') &&
       (width == 1 || width == 2 || width == 4 || width == 8)) ||
      (kind == 'b' && width == 1);
  if (!ok) {
    throw Error(ErrorCode::kFormat, "unsupported dtype " + std::string(descr));
  }
  return {kind, width};
}

double LoadElement(const unsigned char* p, ElementType type) {
  switch (type.kind) {
    case 'f':
      if (type.width == 8) {
        return std::bit_cast<double>(LoadLittleEndian<std::uint64_t>(p));
      }
      return std::bit_cast<float>(LoadLittleEndian<std::uint32_t>(p));
    case 'b':
      return p[0] != 0 ? 1.0 : 0.0;
    case 'u':
      switch (type.width) {
        case 1: return p[0];
        case 2: return LoadLittleEndian<std::uint16_t>(p);
        case 4: return LoadLittleEndian<std::uint32_t>(p);
        default: return static_cast<double>(LoadLittleEndian<std::uint64_t>(p));
      }
    default:
      switch (type.width) {
        case 1: return static_cast<std::int8_t>(p[0]);
        case 2:
          return static_cast<std::int16_t>(LoadLittleEndian<std::uint16_t>(p));
        case 4:
          return static_cast<std::int32_t>(LoadLittleEndian<std::uint32_t>(p));
        default:
          return static_cast<double>(
              static_cast<std::int64_t>(LoadLittleEndian<std::uint64_t>(p)));
      }
  }
}

}  // namespace

const char* DtypeName(Dtype dtype) {
  return dtype == Dtype::kF64 ? "f64" : "f32";
}

Dtype ParseDtype(std::string_view name) {
  if (name == "f64") return Dtype::kF64;
  if (name == "f32") return Dtype::kF32;
  throw Error(ErrorCode::kFormat,
              "dtype must be f32 or f64, got '" + std::string(name) + "'");
}

std::string EncodeNpy(const DenseMatrix& matrix, Dtype dtype) {
  return Encode(matrix.values(), matrix.rows(), matrix.cols(), false, dtype);
}

std::string EncodeNpyVector(std::span<const double> values, Dtype dtype) {
  return Encode(values, 1, values.size(), true, dtype);
}

NpyArray DecodeNpy(std::string_view bytes) {
  if (bytes.size() < 10 || bytes.substr(0, kMagicLen) !=
                               std::string_view(kMagic, kMagicLen)) {
    throw Error(ErrorCode::kFormat, "not an npy file (bad magic)");
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const int major = raw[6];
  std::size_t header_len;
  std::size_t preamble;
  if (major == 1) {
    header_len = LoadLittleEndian<std::uint16_t>(raw + 8);
    preamble = 10;
  } else if (major == 2) {
    if (bytes.size() < 12) throw Error(ErrorCode::kFormat, "npy truncated");
    header_len = LoadLittleEndian<std::uint32_t>(raw + 8);
    preamble = 12;
  } else {
    throw Error(ErrorCode::kFormat,
                "unsupported npy version " + std::to_string(major));
  }
  if (bytes.size() < preamble + header_len) {
    throw Error(ErrorCode::kFormat, "npy header truncated");
  }
  const std::string_view header = bytes.substr(preamble, header_len);
  HeaderParser parser(header);

  NpyArray out;
  out.descr = std::string(parser.ValueOf("descr"));
  const ElementType type = ParseDescr(out.descr);
  if (parser.ValueOf("fortran_order") != "False") {
    throw Error(ErrorCode::kFormat, "fortran-ordered arrays are unsupported");
  }
  const std::vector<std::size_t> dims = ParseShape(parser.ValueOf("shape"));
  if (dims.empty() || dims.size() > 2) {
    throw Error(ErrorCode::kShape, "unsupported npy shape: " +
                                       std::to_string(dims.size()) +
                                       " dimensions (need 1 or 2)");
  }
  out.ndim = static_cast<int>(dims.size());
  const std::size_t rows = dims.size() == 2 ? dims[0] : 1;
  const std::size_t cols = dims.back();
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kShape, "npy arrays must have positive extents");
  }

  const std::size_t count = rows * cols;
  const std::size_t payload = bytes.size() - preamble - header_len;
  if (payload != count * type.width) {
    throw Error(ErrorCode::kShape,
                "npy payload has " + std::to_string(payload) +
                    " bytes, shape needs " +
                    std::to_string(count * type.width));
  }
  std::vector<double> values(count);
  const unsigned char* p = raw + preamble + header_len;
  for (std::size_t i = 0; i < count; ++i, p += type.width) {
    values[i] = LoadElement(p, type);
  }
  out.matrix = DenseMatrix(rows, cols, std::move(values));
  return out;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return std::move(buffer).str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot open for writing " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void WriteArray(const DenseMatrix& matrix, const std::filesystem::path& path,
                Dtype dtype) {
  WriteFileBytes(path, EncodeNpy(matrix, dtype));
}

void WriteVector(std::span<const double> values,
                 const std::filesystem::path& path, Dtype dtype) {
  WriteFileBytes(path, EncodeNpyVector(values, dtype));
}

NpyArray ReadNpy(const std::filesystem::path& path) {
  try {
    return DecodeNpy(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

DenseMatrix ReadArray(const std::filesystem::path& path) {
  return ReadNpy(path).matrix;
}

}  // namespace pathsig
