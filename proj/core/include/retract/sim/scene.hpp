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

#include "retract/geometry.hpp"
#include "retract/rng.hpp"
#include "retract/sim/tissue_mesh.hpp"

namespace retract::sim {

enum class DomainTag : uint8_t { S = 0, R = 1 };

struct PhysicsParams {
  double stiffness_scale = 1.0;
  double damping = 4.0;              // global viscous coefficient, 1/s
  Vec3 gravity{0.0, 0.0, -100.0};    // mm/s^2, scaled units
  int substeps = 10;
  double substep_dt = 0.01;          // s
  DomainTag domain = DomainTag::S;
  double actuation_noise_std = 0.0;  // mm/s, added per control step
  double collision_margin = 0.0;     // mm added around the tissue rest box
  double velocity_bound = 1e5;       // mm/s, integrator divergence guard

  double controlDt() const { return substeps * substep_dt; }
  void validate() const;
};

// Physical-gap counterpart of a set of S-domain parameters: softer springs,
// heavier damping, and actuation noise on the commanded velocity.
PhysicsParams perturbedDomainR(PhysicsParams base);

struct TaskPoints {
  Vec3 grasp{-20.0, 10.0, 5.0};
  Vec3 end{30.0, 40.0, 55.0};
  Vec3 target_marker{-20.0, 10.0, 0.0};
  double marker_radius = 8.0;  // mm, for rendering and exposure checks

  void validate(const WorkspaceBox& workspace, const SheetParams& sheet) const;
};

enum class TaskPhase : uint8_t { Grasping = 0, Retraction = 1 };

struct CollisionInfo {
  bool in_collision = false;
  double lateral_displacement_in_collision = 0.0;  // mm, accumulated
  double contact_depth = 0.0;                      // mm inside the box
};

struct GripperState {
  Vec3 position{Vec3::Zero()};
  std::optional<int> grasped_node;
  TaskPhase phase = TaskPhase::Grasping;
};

// Distance thresholds quoted for the task: the grasp engages when the
// gripper comes strictly closer than 3 mm to the grasping point while below
// the sheet surface; the episode succeeds when the distance to the end point
// reduces to 3 mm or less.
inline constexpr double kGraspDistanceMm = 3.0;
inline constexpr double kSuccessDistanceMm = 3.0;

// Deterministic retraction scene: sprung tissue sheet on a board, a point
// gripper constrained to the workspace box, and a two-phase grasp/retract
// state machine. One instance is single-threaded; independent instances may
// run concurrently. All randomness comes from the per-instance seeded
// generator (used only for domain-R actuation noise).
class Scene {
 public:
  // Builds the scene with the tissue settled to its supported rest shape and
  // all velocities zero. `min_start_z`, when supplied, rejects starts below
  // that height (training-time sampling enforces 40 mm).
  static Scene init(const PhysicsParams& params, const TaskPoints& task,
                    const WorkspaceBox& workspace, const SheetParams& sheet,
                    const Vec3& start, std::optional<double> min_start_z,
                    uint64_t seed);

  // Advances one control step: the gripper moves by velocity * controlDt
  // clamped to the workspace, the sheet integrates over the substeps, and the
  // collision accumulators update. Returns true if the workspace clamped the
  // motion.
  bool step(const Vec3& gripper_velocity);

  // Phase transition check; returns true if the grasp engaged this call.
  bool tryGrasp();

  bool checkSuccess() const;

  CollisionInfo collisionInfo() const { return collision_; }

  // Static query against the tissue rest bounding box (plus margin).
  bool pointInCollision(const Vec3& p) const;

  const TissueMesh& tissue() const { return tissue_; }
  const GripperState& gripper() const { return gripper_; }
  const PhysicsParams& params() const { return params_; }
  const TaskPoints& task() const { return task_; }
  const WorkspaceBox& workspace() const { return workspace_; }
  int controlSteps() const { return control_steps_; }

  // Digital-twin synchronization: place the gripper (no dynamics), mirror the
  // phase flag, and bind the nearest node when entering retraction.
  void syncGripper(const Vec3& position);
  void syncPhase(TaskPhase phase);

  // One control step with zero commanded velocity (twin relaxation).
  void relax() { step(Vec3::Zero()); }

  // Versioned binary snapshot for twin synchronization and replay.
  void saveSnapshot(const std::filesystem::path& path) const;
  static Scene loadSnapshot(const std::filesystem::path& path);

  bool operator==(const Scene& other) const;

 private:
  Scene() = default;

  void settleToRest();
  void substep(const Vec3& gripper_target, const Vec3& gripper_velocity);
  void checkFinite() const;
  int nearestNode(const Vec3& p) const;

  PhysicsParams params_;
  TaskPoints task_;
  WorkspaceBox workspace_;
  TissueMesh tissue_;
  GripperState gripper_;
  CollisionInfo collision_;
  bool was_in_collision_ = false;
  Vec3 prev_gripper_{Vec3::Zero()};
  int control_steps_ = 0;
  Rng rng_;
  std::vector<double> spring_stiffness_;  // cached per spring
};

}  // namespace retract::sim
