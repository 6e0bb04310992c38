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

#ifndef LOMIA_TESTS_TEST_SUPPORT_H_
#define LOMIA_TESTS_TEST_SUPPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "lomia/data.h"

namespace lomia::testing {

// Attribute with levels "L0".."L{k-1}".
AttributeSpec Attr(const std::string& name, std::size_t k,
                   Role role = Role::kNonSensitive);
AttributeSpec BinaryTarget(const std::string& name = "y");

// Uniformly random cells, ids 0..n-1.
Dataset RandomDataset(const Schema& schema, std::size_t n, Seed seed);

Dataset FromRows(const Schema& schema, const std::vector<std::vector<Level>>& rows);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::filesystem::path& path);

}  // namespace lomia::testing

#endif  // LOMIA_TESTS_TEST_SUPPORT_H_
