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

#include <vector>

#include "retract/render/frame.hpp"
#include "retract/render/style.hpp"
#include "retract/sim/scene.hpp"

namespace retract::render {

// Fixed calibrated orthographic camera shared by both domains: in front of
// and above the board, looking down at the scene.
struct OrthoCamera {
  double elevation_deg = 40.0;
  double pixels_per_mm = 1.25;
  double center_x = 128.0;
  double center_y = 170.0;

  // Returns screen x, screen y, and view depth (smaller = closer).
  void project(const Vec3& p, double& sx, double& sy, double& depth) const;
  Vec3 forward() const;
};

enum class ObjectId : uint8_t {
  Background = 0,
  Board = 1,
  Marker = 2,
  Tissue = 3,
  Gripper = 4,
};

struct RenderOptions {
  bool skip_tissue = false;
};

// Flat-shaded software rasterization of the scene into a 256x256 RGB frame.
// Deterministic for fixed (scene, style, condition).
Frame renderFrame(const sim::Scene& scene, const RenderStyle& style,
                  const LightingCondition& condition,
                  const RenderOptions& options = {});

// Per-pixel object ids from the same geometry pass (no shading).
std::vector<uint8_t> renderIds(const sim::Scene& scene,
                               const RenderOptions& options = {});

// Fraction of the target-marker pixels that are visible given the current
// tissue configuration, relative to a render with the tissue removed.
double markerVisibleFraction(const sim::Scene& scene);

}  // namespace retract::render
