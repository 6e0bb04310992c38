// Copyright 2026 The Lomia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "test_support.h"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace lomia::testing {

AttributeSpec Attr(const std::string& name, std::size_t k, Role role) {
  AttributeSpec a{name, {}, role};
  for (std::size_t i = 0; i < k; ++i) a.levels.push_back(fmt::format("L{}", i));
  return a;
}

AttributeSpec BinaryTarget(const std::string& name) {
  return {name, {"0", "1"}, Role::kTarget};
}

Dataset RandomDataset(const Schema& schema, std::size_t n, Seed seed) {
  Rng rng(seed);
  std::vector<Level> cells;
  cells.reserve(n * schema.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (const AttributeSpec& a : schema.attributes()) {
      std::uniform_int_distribution<std::size_t> d(0, a.num_levels() - 1);
      cells.push_back(static_cast<Level>(d(rng)));
    }
  }
  std::vector<std::int64_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Dataset(schema, std::move(ids), std::move(cells));
}

Dataset FromRows(const Schema& schema, const std::vector<std::vector<Level>>& rows) {
  std::vector<Level> cells;
  for (const auto& r : rows) cells.insert(cells.end(), r.begin(), r.end());
  std::vector<std::int64_t> ids(rows.size());
  std::iota(ids.begin(), ids.end(), 0);
  return Dataset(schema, std::move(ids), std::move(cells));
}

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          fmt::format("lomia_{}_{}_{}", tag, rd(), counter++);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lomia::testing
