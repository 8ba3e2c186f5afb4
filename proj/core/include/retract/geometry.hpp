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

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "retract/errors.hpp"

namespace retract {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Axis-aligned box, all coordinates in millimeters.
struct Aabb {
  Vec3 lo{Vec3::Zero()};
  Vec3 hi{Vec3::Zero()};

  bool contains(const Vec3& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() &&
           p.y() <= hi.y() && p.z() >= lo.z() && p.z() <= hi.z();
  }

  Vec3 clamp(const Vec3& p) const {
    return Vec3(std::clamp(p.x(), lo.x(), hi.x()),
                std::clamp(p.y(), lo.y(), hi.y()),
                std::clamp(p.z(), lo.z(), hi.z()));
  }

  Aabb expanded(double margin) const {
    return Aabb{lo - Vec3::Constant(margin), hi + Vec3::Constant(margin)};
  }

  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  double diagonal() const { return (hi - lo).norm(); }
};

// Gripper motion box: 140 mm wide (x), 180 mm deep (y), 83 mm high (z).
struct WorkspaceBox {
  Vec3 min_corner{-70.0, -90.0, 0.0};
  Vec3 max_corner{70.0, 90.0, 83.0};

  static constexpr double kWidth = 140.0;
  static constexpr double kDepth = 180.0;
  static constexpr double kHeight = 83.0;

  Aabb box() const { return Aabb{min_corner, max_corner}; }
  double diagonal() const { return (max_corner - min_corner).norm(); }

  void validate() const {
    const Vec3 e = max_corner - min_corner;
    if (!(e.x() > 0 && e.y() > 0 && e.z() > 0)) {
      throw DomainError("workspace: min_corner must be strictly below max_corner");
    }
    const bool dims_ok = std::abs(e.x() - kWidth) < 1e-9 &&
                         std::abs(e.y() - kDepth) < 1e-9 &&
                         std::abs(e.z() - kHeight) < 1e-9;
    if (!dims_ok) {
      throw DomainError("workspace: dimensions must be 140 x 180 x 83 mm");
    }
  }
};

// Componentwise clamp of position+displacement into the box. `violated` is
// true iff any component had to be clamped.
struct ClampResult {
  Vec3 position;
  bool violated = false;
};

inline ClampResult clampToBox(const Aabb& box, const Vec3& position,
                              const Vec3& displacement) {
  const Vec3 target = position + displacement;
  const Vec3 clamped = box.clamp(target);
  return ClampResult{clamped, (clamped.array() != target.array()).any()};
}

}  // namespace retract
