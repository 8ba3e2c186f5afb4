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

#include <array>
#include <cstdint>

#include "retract/geometry.hpp"
#include "retract/sim/scene.hpp"

namespace retract::render {

using Rgb = Eigen::Vector3d;  // linear color in [0, 1]

// Visual appearance of one observation domain. The S and R defaults differ
// in palette tint, light direction, hue, board texture, and sensor noise, so
// frames of the same scene are visibly different while aggregate channel
// statistics stay close.
struct RenderStyle {
  sim::DomainTag domain = sim::DomainTag::S;
  Rgb tissue_color{0.85, 0.72, 0.25};
  Rgb board_color{0.38, 0.40, 0.46};
  Rgb gripper_color{0.80, 0.82, 0.86};
  Rgb marker_color{0.78, 0.12, 0.10};
  Vec3 light_direction{-0.3, 0.25, -0.9};  // direction light travels
  double ambient = 0.55;                   // [0, 1]
  double shadow_strength = 0.35;           // [0, 1]
  uint64_t background_texture_seed = 1;
  double texture_amplitude = 0.07;
  double hue_shift_deg = 0.0;
  double noise_amplitude = 0.0;            // [0, 1]
  uint64_t noise_seed = 7;

  void validate() const;

  static RenderStyle domainS();
  static RenderStyle domainR();
};

// One of the three predefined lighting conditions.
struct LightingCondition {
  int index = 0;  // {0, 1, 2}
  double brightness = 1.0;
  double hue_offset_deg = 0.0;

  static constexpr int kCount = 3;
  static LightingCondition preset(int index);
};

// Color rotation about the gray axis, used for hue shifts.
Mat3 hueRotationMatrix(double degrees);

}  // namespace retract::render
