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

#include "retract/sim/tissue_mesh.hpp"

#include <algorithm>
#include <cmath>

namespace retract::sim {

double TissueMesh::stiffnessFor(SpringKind kind, double scale) {
  // Base stiffnesses chosen for stability at the 0.01 s substep; shear and
  // bend springs are softer than structural ones, as in common cloth models.
  switch (kind) {
    case SpringKind::Structural: return 400.0 * scale;
    case SpringKind::Shear: return 200.0 * scale;
    case SpringKind::Bend: return 120.0 * scale;
    case SpringKind::Layer: return 400.0 * scale;
  }
  return 400.0 * scale;
}

void TissueMesh::validate() const {
  for (const Spring& s : springs) {
    if (!(s.rest_length > 0.0)) {
      throw DomainError("tissue mesh: spring rest lengths must be positive");
    }
  }
  if (std::find(attached.begin(), attached.end(), uint8_t{1}) == attached.end()) {
    throw DomainError("tissue mesh: attached region must be non-empty");
  }
}

double TissueMesh::surfaceHeightAt(double x, double y) const {
  const SheetParams& p = sheet;
  const double fx = (std::clamp(x, p.x_min, p.x_max) - p.x_min) /
                    (p.x_max - p.x_min) * (p.nodes_x - 1);
  const double fy = (std::clamp(y, p.y_min, p.y_max) - p.y_min) /
                    (p.y_max - p.y_min) * (p.nodes_y - 1);
  const int ix = std::min(static_cast<int>(fx), p.nodes_x - 2);
  const int iy = std::min(static_cast<int>(fy), p.nodes_y - 2);
  const double tx = fx - ix;
  const double ty = fy - iy;
  const int top = topLayer();
  const double z00 = nodes[index(top, iy, ix)].z();
  const double z01 = nodes[index(top, iy, ix + 1)].z();
  const double z10 = nodes[index(top, iy + 1, ix)].z();
  const double z11 = nodes[index(top, iy + 1, ix + 1)].z();
  return (1 - ty) * ((1 - tx) * z00 + tx * z01) +
         ty * ((1 - tx) * z10 + tx * z11);
}

TissueMesh buildTissueSheet(const SheetParams& p) {
  TissueMesh mesh;
  mesh.sheet = p;
  const int per_layer = p.nodes_x * p.nodes_y;
  mesh.nodes.resize(static_cast<size_t>(per_layer) * p.layers);
  mesh.velocities.assign(mesh.nodes.size(), Vec3::Zero());
  mesh.attached.assign(mesh.nodes.size(), 0);

  const double dx = (p.x_max - p.x_min) / (p.nodes_x - 1);
  const double dy = (p.y_max - p.y_min) / (p.nodes_y - 1);
  const double dz = p.layers > 1 ? p.thickness / (p.layers - 1) : 0.0;

  for (int l = 0; l < p.layers; ++l) {
    for (int iy = 0; iy < p.nodes_y; ++iy) {
      for (int ix = 0; ix < p.nodes_x; ++ix) {
        const int i = mesh.index(l, iy, ix);
        mesh.nodes[i] = Vec3(p.x_min + dx * ix, p.y_min + dy * iy, dz * l);
        if (ix >= p.nodes_x - p.attach_cols && iy < p.attach_rows) {
          mesh.attached[i] = 1;
        }
      }
    }
  }

  auto addSpring = [&](int a, int b, SpringKind kind) {
    const double rest = (mesh.nodes[a] - mesh.nodes[b]).norm();
    mesh.springs.push_back(Spring{a, b, rest, kind});
  };

  for (int l = 0; l < p.layers; ++l) {
    for (int iy = 0; iy < p.nodes_y; ++iy) {
      for (int ix = 0; ix < p.nodes_x; ++ix) {
        const int i = mesh.index(l, iy, ix);
        // Structural: grid neighbors.
        if (ix + 1 < p.nodes_x) addSpring(i, mesh.index(l, iy, ix + 1), SpringKind::Structural);
        if (iy + 1 < p.nodes_y) addSpring(i, mesh.index(l, iy + 1, ix), SpringKind::Structural);
        // Shear: in-plane diagonals.
        if (ix + 1 < p.nodes_x && iy + 1 < p.nodes_y) {
          addSpring(i, mesh.index(l, iy + 1, ix + 1), SpringKind::Shear);
          addSpring(mesh.index(l, iy, ix + 1), mesh.index(l, iy + 1, ix), SpringKind::Shear);
        }
        // Bend: skip-one links resist folding.
        if (ix + 2 < p.nodes_x) addSpring(i, mesh.index(l, iy, ix + 2), SpringKind::Bend);
        if (iy + 2 < p.nodes_y) addSpring(i, mesh.index(l, iy + 2, ix), SpringKind::Bend);
      }
    }
  }
  // Inter-layer links: verticals plus diagonals for shear coupling.
  for (int l = 0; l + 1 < p.layers; ++l) {
    for (int iy = 0; iy < p.nodes_y; ++iy) {
      for (int ix = 0; ix < p.nodes_x; ++ix) {
        const int i = mesh.index(l, iy, ix);
        addSpring(i, mesh.index(l + 1, iy, ix), SpringKind::Layer);
        if (ix + 1 < p.nodes_x) {
          addSpring(i, mesh.index(l + 1, iy, ix + 1), SpringKind::Layer);
          addSpring(mesh.index(l, iy, ix + 1), mesh.index(l + 1, iy, ix), SpringKind::Layer);
        }
        if (iy + 1 < p.nodes_y) {
          addSpring(i, mesh.index(l + 1, iy + 1, ix), SpringKind::Layer);
          addSpring(mesh.index(l, iy + 1, ix), mesh.index(l + 1, iy, ix), SpringKind::Layer);
        }
      }
    }
  }

  mesh.rest_aabb = Aabb{Vec3(p.x_min, p.y_min, 0.0),
                        Vec3(p.x_max, p.y_max, p.layers > 1 ? p.thickness : 0.0)};
  mesh.validate();
  return mesh;
}

}  // namespace retract::sim
