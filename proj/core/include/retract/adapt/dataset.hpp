// Copyright 2026 The Retract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "retract/render/frame.hpp"
#include "retract/sim/scene.hpp"

namespace retract::adapt {

enum class Split : uint8_t { Train = 0, Val = 1, Test = 2 };

struct ManifestEntry {
  std::string file;   // relative to the dataset directory
  sim::DomainTag domain = sim::DomainTag::S;
  int lighting = 0;   // condition index {0,1,2}
  Split split = Split::Train;
};

// Image directory manifest: one dataset per domain, 90/5/5 train/val/test
// split assigned by a seeded shuffle at creation time.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  uint64_t seed = 0;
  std::string config_hash;

  void save(const std::filesystem::path& dir) const;
  static DatasetManifest load(const std::filesystem::path& dir);
};

// Assigns splits 90/5/5 by seeded shuffle (in-place, deterministic).
void assignSplits(std::vector<ManifestEntry>& entries, uint64_t seed);

// Unpaired two-domain image collection, loaded eagerly for fitting.
struct UnpairedImageSet {
  std::vector<render::Frame> source;  // domain S
  std::vector<int> source_lighting;
  std::vector<Split> source_split;
  std::vector<render::Frame> target;  // domain R
  std::vector<int> target_lighting;
  std::vector<Split> target_split;

  static UnpairedImageSet load(const std::filesystem::path& source_dir,
                               const std::filesystem::path& target_dir);
};

}  // namespace retract::adapt
