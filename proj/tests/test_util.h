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

#ifndef PATHSIG_TESTS_TEST_UTIL_H_
#define PATHSIG_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pathsig/dump.h"
#include "pathsig/error.h"
#include "pathsig/matrix.h"

namespace pathsig::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pathsig_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const {
    return path_ / rel;
  }

 private:
  std::filesystem::path path_;
};

inline DenseMatrix RandomMatrix(std::size_t rows, std::size_t cols,
                                std::mt19937_64& rng, double lo = -1.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseMatrix m(rows, cols);
  for (double& v : m.mutable_values()) v = u(rng);
  return m;
}

// Small random dump: `classes` classes, m x n weights, non-negative
// activations (ReLU outputs), labels cycling over the classes.
inline std::filesystem::path MakeRandomDump(const std::filesystem::path& dir,
                                            std::uint64_t seed,
                                            std::size_t m = 6,
                                            std::size_t n = 5,
                                            std::size_t samples = 30,
                                            int classes = 3,
                                            const std::string& layer = "final") {
  std::mt19937_64 rng(seed);
  const DenseMatrix w = RandomMatrix(m, n, rng);
  std::vector<double> b(m);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& v : b) v = u(rng);
  DenseMatrix a = RandomMatrix(samples, n, rng, 0.0, 2.0);
  std::vector<int> labels(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    labels[s] = static_cast<int>(s % static_cast<std::size_t>(classes));
  }
  std::vector<std::string> names;
  for (int c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
  return WriteDump(dir, "rand", layer, w, b, a, labels, names);
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected pathsig::Error");
}

}  // namespace pathsig::testing

#endif  // PATHSIG_TESTS_TEST_UTIL_H_
