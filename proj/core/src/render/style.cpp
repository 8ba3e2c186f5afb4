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

#include "retract/render/style.hpp"

#include <cmath>
#include <numbers>

namespace retract::render {

void RenderStyle::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(ambient) || !in01(shadow_strength) || !in01(noise_amplitude)) {
    throw DomainError("render style: scalar fields must lie in [0, 1]");
  }
  auto colorOk = [&](const Rgb& c) {
    return in01(c.x()) && in01(c.y()) && in01(c.z());
  };
  if (!colorOk(tissue_color) || !colorOk(board_color) ||
      !colorOk(gripper_color) || !colorOk(marker_color)) {
    throw DomainError("render style: palette entries must lie in [0, 1]");
  }
  if (light_direction.norm() < 1e-9 || light_direction.z() >= 0.0) {
    throw DomainError("render style: light must point downward");
  }
}

RenderStyle RenderStyle::domainS() {
  RenderStyle s;
  s.domain = sim::DomainTag::S;
  return s;
}

RenderStyle RenderStyle::domainR() {
  // Tuned against domainS(): strong pixelwise differences (texture pattern,
  // light direction, hue, noise) with per-channel image means kept within a
  // few percent so an affine color map stays close to the identity on
  // R-domain inputs.
  RenderStyle s;
  s.domain = sim::DomainTag::R;
  s.tissue_color = Rgb{0.82, 0.68, 0.30};
  s.board_color = Rgb{0.40, 0.39, 0.44};
  s.gripper_color = Rgb{0.76, 0.80, 0.84};
  s.marker_color = Rgb{0.74, 0.14, 0.13};
  s.light_direction = Vec3{0.35, -0.2, -0.85};
  s.ambient = 0.50;
  s.shadow_strength = 0.45;
  s.background_texture_seed = 2;
  s.texture_amplitude = 0.07;
  s.hue_shift_deg = 10.0;
  s.noise_amplitude = 0.035;
  s.noise_seed = 11;
  return s;
}

LightingCondition LightingCondition::preset(int index) {
  if (index < 0 || index >= kCount) {
    throw DomainError("lighting condition index must be 0, 1, or 2");
  }
  switch (index) {
    case 0: return LightingCondition{0, 1.0, 0.0};
    case 1: return LightingCondition{1, 0.88, -6.0};
    default: return LightingCondition{2, 1.10, 7.0};
  }
}

Mat3 hueRotationMatrix(double degrees) {
  // Rodrigues rotation about the normalized gray axis (1,1,1)/sqrt(3).
  const double theta = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double k = 1.0 / 3.0;
  Mat3 m;
  const double a = c + (1.0 - c) * k;
  const double b1 = (1.0 - c) * k - s / std::sqrt(3.0);
  const double b2 = (1.0 - c) * k + s / std::sqrt(3.0);
  m << a, b1, b2,
       b2, a, b1,
       b1, b2, a;
  return m;
}

}  // namespace retract::render
