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
#include <optional>
#include <vector>

#include "retract/adapt/dataset.hpp"
#include "retract/geometry.hpp"
#include "retract/render/frame.hpp"
#include "retract/rng.hpp"

namespace retract::adapt {

// Channel statistics of one image batch, accumulated over all pixels.
struct ChannelStats {
  Vec3 mean{Vec3::Zero()};
  Mat3 covariance{Mat3::Zero()};
  long pixel_count = 0;
};

struct FitStats {
  ChannelStats source;
  ChannelStats target;
  Vec3 translated_train_mean{Vec3::Zero()};
  double regularization_epsilon = 0.0;
  bool regularized = false;
  uint64_t seed = 0;
};

// Pixel-level map from the S observation domain into the R domain: a global
// affine color transform fitted by matching channel means and covariances
// (closed-form whitening-coloring), plus a grid of per-patch offset
// corrections for spatially varying lighting. Deterministic and
// shape-preserving; consumers depend only on apply().
struct TranslatorParams {
  Mat3 color_matrix{Mat3::Identity()};
  Vec3 offset{Vec3::Zero()};
  int patch_grid = 0;                 // k (k x k cells); 0 disables patches
  std::vector<Vec3> patch_offsets;    // row-major k*k entries
  FitStats stats;

  static TranslatorParams identity();

  // Offset correction at pixel (x, y), bilinearly interpolated between patch
  // cell centers.
  Vec3 patchOffsetAt(int x, int y, int width, int height) const;
};

struct FitOptions {
  int patch_grid = 8;
  double subsample_fraction = 0.6;  // of the train split, per lighting class
  double covariance_epsilon = 1e-6;
};

// Fits one translator on the train split of unpaired image data. Different
// seeds subsample different (lighting-stratified) image batches, so ensemble
// members differ while all matching the target statistics.
TranslatorParams fitTranslator(const UnpairedImageSet& data, uint64_t seed,
                               const FitOptions& options = {});

// Applies the map; output clamped to the valid pixel range.
render::Frame translate(const TranslatorParams& params, const render::Frame& frame);

// Mean absolute pixel distance |G(f) - f| in [0, 1]; the fit-quality gate for
// the identity-mapping property on target-domain frames.
double identityResidual(const TranslatorParams& params, const render::Frame& frame);

// Channel means of a set of frames (values in [0, 1]).
Vec3 channelMeans(const std::vector<render::Frame>& frames);
Vec3 channelStds(const std::vector<render::Frame>& frames);

struct TranslatorEnsemble {
  std::vector<TranslatorParams> members;

  static constexpr int kStandardSize = 7;

  void requireStandardSize() const {
    if (static_cast<int>(members.size()) != kStandardSize) {
      throw ConfigError("translator ensemble must have exactly 7 members");
    }
  }

  const TranslatorParams& sample(Rng& rng) const {
    if (members.empty()) throw ContractError("empty translator ensemble");
    return members[rng.uniformIndex(members.size())];
  }

  void save(const std::filesystem::path& path) const;
  static TranslatorEnsemble load(const std::filesystem::path& path);
};

// Fits `count` members with seeds derived from `master_seed`.
TranslatorEnsemble fitEnsemble(const UnpairedImageSet& data, uint64_t master_seed,
                               int count = TranslatorEnsemble::kStandardSize,
                               const FitOptions& options = {});

}  // namespace retract::adapt
