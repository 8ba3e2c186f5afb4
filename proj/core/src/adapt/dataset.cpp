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

#include "retract/adapt/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "retract/rng.hpp"

namespace retract::adapt {

using nlohmann::json;

void DatasetManifest::save(const std::filesystem::path& dir) const {
  json j;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  json items = json::array();
  for (const auto& e : entries) {
    items.push_back({{"file", e.file},
                     {"domain", e.domain == sim::DomainTag::S ? "S" : "R"},
                     {"lighting", e.lighting},
                     {"split", e.split == Split::Train  ? "train"
                               : e.split == Split::Val ? "val"
                                                        : "test"}});
  }
  j["images"] = std::move(items);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << j.dump(2) << "\n";
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("missing manifest.json in " + dir.string());
  json j;
  in >> j;
  DatasetManifest m;
  m.seed = j.value("seed", 0ULL);
  m.config_hash = j.value("config_hash", "");
  for (const auto& item : j.at("images")) {
    ManifestEntry e;
    e.file = item.at("file").get<std::string>();
    e.domain = item.at("domain").get<std::string>() == "R" ? sim::DomainTag::R
                                                           : sim::DomainTag::S;
    e.lighting = item.at("lighting").get<int>();
    const std::string split = item.at("split").get<std::string>();
    e.split = split == "train" ? Split::Train
              : split == "val" ? Split::Val
                               : Split::Test;
    m.entries.push_back(std::move(e));
  }
  return m;
}

void assignSplits(std::vector<ManifestEntry>& entries, uint64_t seed) {
  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(deriveSeed(seed, 0x517));
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniformIndex(i)]);
  }
  const size_t n = entries.size();
  const size_t n_train = (n * 90) / 100;
  const size_t n_val = (n * 5) / 100;
  for (size_t rank = 0; rank < n; ++rank) {
    Split s = Split::Test;
    if (rank < n_train) {
      s = Split::Train;
    } else if (rank < n_train + n_val) {
      s = Split::Val;
    }
    entries[order[rank]].split = s;
  }
}

UnpairedImageSet UnpairedImageSet::load(const std::filesystem::path& source_dir,
                                        const std::filesystem::path& target_dir) {
  UnpairedImageSet set;
  auto loadSide = [](const std::filesystem::path& dir, std::vector<render::Frame>& frames,
                     std::vector<int>& lighting, std::vector<Split>& splits) {
    const DatasetManifest m = DatasetManifest::load(dir);
    for (const auto& e : m.entries) {
      frames.push_back(render::readPng(dir / e.file));
      frames.back().requireStandardSize();
      lighting.push_back(e.lighting);
      splits.push_back(e.split);
    }
  };
  loadSide(source_dir, set.source, set.source_lighting, set.source_split);
  loadSide(target_dir, set.target, set.target_lighting, set.target_split);
  return set;
}

}  // namespace retract::adapt
