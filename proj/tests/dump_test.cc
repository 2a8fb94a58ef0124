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

#include <cstring>
#include <functional>
#include <limits>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pathsig/dump.h"
#include "pathsig/error.h"
#include "pathsig/npy.h"
#include "test_util.h"

namespace pathsig {
namespace {

using nlohmann::json;
using testing::CodeOf;
using testing::TempDir;

TEST_CASE("written dump loads back unchanged") {
  TempDir dir("dump");
  const auto w = DenseMatrix::FromRows({{1, -1}, {2, 0}, {0.5, 0.25}});
  const std::vector<double> b = {0.1, 0.2, 0.3};
  const auto a = DenseMatrix::FromRows({{1, 1}, {0, 2}, {3, 0}, {1, 0.5}});
  const std::vector<int> labels = {0, 1, 1, 0};
  const auto path = WriteDump(dir.path(), "toy", "fc2", w, b, a, labels, {"cat", "dog"});
  CHECK(path.filename() == "manifest_fc2.json");

  const ActivationDump d = LoadDump(path);
  CHECK(d.manifest.model_id == "toy");
  CHECK(d.manifest.layer_id == "fc2");
  CHECK(d.weights == w);
  CHECK(d.bias == b);
  CHECK(d.activations == a);
  CHECK(d.labels == labels);
  CHECK(d.num_classes() == 2);
  CHECK(d.sample_count() == 4);
}

TEST_CASE("manifest serialisation round trips") {
  DumpManifest m;
  m.model_id = "m";
  m.layer_id = "final";
  m.weight_file = "w.npy";
  m.activation_file = "a.npy";
  m.label_file = "y.npy";
  m.class_names = {"a", "b", "c"};
  m.dtype = Dtype::kF32;
  m.sample_count = 12;
  const DumpManifest back = ParseManifest(SerializeManifest(m), ManifestMode::kStrict);
  CHECK(back.model_id == m.model_id);
  CHECK(!back.bias_file.has_value());
  CHECK(back.class_names == m.class_names);
  CHECK(back.dtype == Dtype::kF32);
  CHECK(back.sample_count == 12);
}

TEST_CASE("unknown manifest keys: strict rejects, lenient ignores") {
  TempDir dir("dump");
  const auto path = testing::MakeRandomDump(dir.path(), 1);
  json doc = json::parse(ReadFileBytes(path));
  doc["extra"] = 1;
  const std::string text = doc.dump();
  CHECK(CodeOf([&] { ParseManifest(text, ManifestMode::kStrict); }) ==
        ErrorCode::kFormat);
  CHECK(ParseManifest(text, ManifestMode::kLenient).model_id == "rand");
}

// Every single violation of a cross-file invariant must be caught.
TEST_CASE("property: each manifest mutation is rejected") {
  TempDir dir("dump");
  const auto path = testing::MakeRandomDump(dir.path(), 2, 4, 3, 6, 2);
  const json base = json::parse(ReadFileBytes(path));
  const auto rewrite = [&](const std::function<void(json&)>& mutate) {
    json doc = base;
    mutate(doc);
    WriteFileBytes(path, doc.dump());
  };
  const auto w_path = dir / base["weight_file"].get<std::string>();

  struct Mutation {
    std::string name;
    std::function<void()> apply;
    ErrorCode expected;
  };
  const std::vector<Mutation> mutations = {
      {"sample_count too large",
       [&] { rewrite([](json& d) { d["sample_count"] = 7; }); }, ErrorCode::kShape},
      {"sample_count zero", [&] { rewrite([](json& d) { d["sample_count"] = 0; }); },
       ErrorCode::kRange},
      {"negative sample_count",
       [&] { rewrite([](json& d) { d["sample_count"] = -1; }); }, ErrorCode::kRange},
      {"fractional sample_count",
       [&] { rewrite([](json& d) { d["sample_count"] = 6.5; }); }, ErrorCode::kFormat},
      {"dtype disagrees", [&] { rewrite([](json& d) { d["dtype"] = "f32"; }); },
       ErrorCode::kFormat},
      {"unknown dtype", [&] { rewrite([](json& d) { d["dtype"] = "i4"; }); },
       ErrorCode::kFormat},
      {"too few classes for labels",
       [&] { rewrite([](json& d) { d["class_names"] = {"only"}; }); }, ErrorCode::kRange},
      {"no classes", [&] { rewrite([](json& d) { d["class_names"] = json::array(); }); },
       ErrorCode::kFormat},
      {"missing weight file",
       [&] { rewrite([](json& d) { d["weight_file"] = "nope.npy"; }); }, ErrorCode::kIo},
      {"missing key", [&] { rewrite([](json& d) { d.erase("label_file"); }); },
       ErrorCode::kFormat},
      {"wrong type", [&] { rewrite([](json& d) { d["model_id"] = 3; }); },
       ErrorCode::kFormat},
      {"not an object", [&] { WriteFileBytes(path, "[1, 2]"); }, ErrorCode::kFormat},
      {"not json", [&] { WriteFileBytes(path, "{model_id"); }, ErrorCode::kFormat},
      {"weights swapped for activations",
       [&] {
         rewrite([](json& d) { d["weight_file"] = d["activation_file"]; });
       },
       ErrorCode::kShape},
      {"bias length",
       [&] {
         rewrite([](json&) {});
         WriteVector(std::vector<double>{1, 2, 3}, dir / base["bias_file"].get<std::string>(),
                     Dtype::kF64);
       },
       ErrorCode::kShape},
      {"fractional label",
       [&] {
         rewrite([](json&) {});
         WriteVector(std::vector<double>{0, 1, 0.5, 1, 0, 1},
                     dir / base["label_file"].get<std::string>(), Dtype::kF64);
       },
       ErrorCode::kRange},
      {"negative label",
       [&] {
         rewrite([](json&) {});
         WriteVector(std::vector<double>{0, 1, -1, 1, 0, 1},
                     dir / base["label_file"].get<std::string>(), Dtype::kF64);
       },
       ErrorCode::kRange},
      {"non-finite weight",
       [&] {
         rewrite([](json&) {});
         std::string bytes = EncodeNpy(DenseMatrix(4, 3, 1.0), Dtype::kF64);
         const double inf = std::numeric_limits<double>::infinity();
         std::memcpy(bytes.data() + bytes.size() - 8, &inf, 8);
         WriteFileBytes(w_path, bytes);
       },
       ErrorCode::kNumeric},
  };

  for (const auto& m : mutations) {
    CAPTURE(m.name);
    // Restore a clean dump before each mutation.
    testing::MakeRandomDump(dir.path(), 2, 4, 3, 6, 2);
    REQUIRE_NOTHROW(LoadDump(path));
    m.apply();
    CHECK(CodeOf([&] { LoadDump(path); }) == m.expected);
  }
}

TEST_CASE("manifest without bias loads with empty bias") {
  TempDir dir("dump");
  const auto path = testing::MakeRandomDump(dir.path(), 3);
  json doc = json::parse(ReadFileBytes(path));
  doc["bias_file"] = nullptr;
  WriteFileBytes(path, doc.dump());
  CHECK(LoadDump(path).bias.empty());
}

TEST_CASE("relative paths resolve against the manifest directory") {
  TempDir dir("dump");
  std::filesystem::create_directories(dir / "sub");
  const auto path = testing::MakeRandomDump(dir / "sub", 4);
  const auto cwd = std::filesystem::current_path();
  std::filesystem::current_path(dir.path());
  CHECK_NOTHROW(LoadDump(std::filesystem::path("sub") / path.filename()));
  std::filesystem::current_path(cwd);
}

TEST_CASE("input resolution") {
  TempDir dir("dump");
  const auto final_path = testing::MakeRandomDump(dir.path(), 5);
  const auto fc1_path = testing::MakeRandomDump(dir.path(), 5, 6, 5, 30, 3, "fc1");
  CHECK(ResolveManifest(dir.path(), std::nullopt) == final_path);
  CHECK(ResolveManifest(dir.path(), "fc1") == fc1_path);
  CHECK(ResolveManifest(fc1_path, std::nullopt) == fc1_path);
  CHECK(ResolveManifest(fc1_path, "fc1") == fc1_path);
  CHECK(CodeOf([&] { ResolveManifest(fc1_path, "final"); }) == ErrorCode::kUsage);
  CHECK(CodeOf([&] { ResolveManifest(dir.path(), "fc9"); }) == ErrorCode::kIo);
}

}  // namespace
}  // namespace pathsig
