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

#include <cstdint>
#include <vector>

#include "retract/geometry.hpp"

namespace retract::sim {

enum class SpringKind : uint8_t { Structural = 0, Shear = 1, Bend = 2, Layer = 3 };

struct Spring {
  int32_t a = 0;
  int32_t b = 0;
  double rest_length = 0.0;
  SpringKind kind = SpringKind::Structural;
};

// Geometry of the sprung sheet. The sheet is a two-layer grid of point
// masses lying on the board; a rectangular block of nodes at the rear-right
// corner is fixed to the board.
struct SheetParams {
  int nodes_x = 12;
  int nodes_y = 12;
  int layers = 2;
  double x_min = -50.0;
  double x_max = 50.0;
  double y_min = -86.0;
  double y_max = 54.0;
  double thickness = 5.0;   // mm between bottom and top layer
  double node_mass = 1.0;   // scaled mass units
  // Attached block: grid columns ix >= nodes_x - attach_cols and rows
  // iy < attach_rows (rear-right corner, both layers).
  int attach_cols = 3;
  int attach_rows = 3;
};

struct TissueMesh {
  SheetParams sheet;
  std::vector<Vec3> nodes;       // current positions, mm
  std::vector<Vec3> velocities;  // mm/s
  std::vector<Spring> springs;
  std::vector<uint8_t> attached;  // per node, fixed to board
  Aabb rest_aabb;                 // bounding box of the non-deformed sheet

  int nodeCount() const { return static_cast<int>(nodes.size()); }
  int index(int layer, int iy, int ix) const {
    return (layer * sheet.nodes_y + iy) * sheet.nodes_x + ix;
  }
  int topLayer() const { return sheet.layers - 1; }

  // Sheet surface height at (x, y): bilinear interpolation of the current
  // top-layer node heights on the rest-shape grid, clamped to the sheet
  // extent.
  double surfaceHeightAt(double x, double y) const;

  // Per-kind stiffness in scaled force units per mm of extension.
  static double stiffnessFor(SpringKind kind, double scale);

  void validate() const;  // rest lengths > 0, attached region non-empty
};

TissueMesh buildTissueSheet(const SheetParams& params);

}  // namespace retract::sim
