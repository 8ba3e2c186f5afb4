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

#include "retract/sim/scene.hpp"

#include <cmath>
#include <limits>

#include "retract/serial.hpp"

namespace retract::sim {

namespace {
constexpr char kSnapshotMagic[4] = {'R', 'T', 'S', 'N'};
constexpr uint32_t kSnapshotVersion = 1;

void writeVec3(BinaryWriter& w, const Vec3& v) {
  w.pod(v.x());
  w.pod(v.y());
  w.pod(v.z());
}

Vec3 readVec3(BinaryReader& r) {
  const double x = r.pod<double>();
  const double y = r.pod<double>();
  const double z = r.pod<double>();
  return Vec3(x, y, z);
}

void writeVec3Array(BinaryWriter& w, const std::vector<Vec3>& vs) {
  w.pod<uint64_t>(vs.size());
  for (const Vec3& v : vs) writeVec3(w, v);
}

std::vector<Vec3> readVec3Array(BinaryReader& r) {
  const auto n = r.pod<uint64_t>();
  std::vector<Vec3> vs(n);
  for (auto& v : vs) v = readVec3(r);
  return vs;
}

void writePhysics(BinaryWriter& w, const PhysicsParams& p) {
  w.pod(p.stiffness_scale);
  w.pod(p.damping);
  writeVec3(w, p.gravity);
  w.pod<int32_t>(p.substeps);
  w.pod(p.substep_dt);
  w.pod<uint8_t>(static_cast<uint8_t>(p.domain));
  w.pod(p.actuation_noise_std);
  w.pod(p.collision_margin);
  w.pod(p.velocity_bound);
}

PhysicsParams readPhysics(BinaryReader& r) {
  PhysicsParams p;
  p.stiffness_scale = r.pod<double>();
  p.damping = r.pod<double>();
  p.gravity = readVec3(r);
  p.substeps = r.pod<int32_t>();
  p.substep_dt = r.pod<double>();
  p.domain = static_cast<DomainTag>(r.pod<uint8_t>());
  p.actuation_noise_std = r.pod<double>();
  p.collision_margin = r.pod<double>();
  p.velocity_bound = r.pod<double>();
  return p;
}
}  // namespace

void PhysicsParams::validate() const {
  if (!(substep_dt > 0.0)) throw DomainError("physics: substep_dt must be > 0");
  if (substeps < 1) throw DomainError("physics: substeps must be >= 1");
  if (damping < 0.0) throw DomainError("physics: damping must be >= 0");
  if (!(stiffness_scale > 0.0)) throw DomainError("physics: stiffness_scale must be > 0");
}

PhysicsParams perturbedDomainR(PhysicsParams base) {
  base.stiffness_scale *= 0.8;
  base.damping *= 1.2;
  base.actuation_noise_std = 0.1;
  base.domain = DomainTag::R;
  return base;
}

void TaskPoints::validate(const WorkspaceBox& workspace,
                          const SheetParams& sheet) const {
  const bool grasp_on_sheet =
      grasp.x() >= sheet.x_min && grasp.x() <= sheet.x_max &&
      grasp.y() >= sheet.y_min && grasp.y() <= sheet.y_max &&
      std::abs(grasp.z() - sheet.thickness) <= 2.0;
  if (!grasp_on_sheet) {
    throw DomainError("task: grasp point must lie on the tissue surface");
  }
  if (!workspace.box().contains(end)) {
    throw DomainError("task: end point must lie inside the workspace");
  }
}

Scene Scene::init(const PhysicsParams& params, const TaskPoints& task,
                  const WorkspaceBox& workspace, const SheetParams& sheet,
                  const Vec3& start, std::optional<double> min_start_z,
                  uint64_t seed) {
  params.validate();
  workspace.validate();
  task.validate(workspace, sheet);
  if (!workspace.box().contains(start)) {
    throw DomainError("scene: start position outside the workspace");
  }
  if (min_start_z && start.z() < *min_start_z) {
    throw DomainError("scene: start height below the sampling minimum");
  }

  Scene s;
  s.params_ = params;
  s.task_ = task;
  s.workspace_ = workspace;
  s.tissue_ = buildTissueSheet(sheet);
  s.spring_stiffness_.reserve(s.tissue_.springs.size());
  for (const Spring& sp : s.tissue_.springs) {
    s.spring_stiffness_.push_back(
        TissueMesh::stiffnessFor(sp.kind, params.stiffness_scale));
  }
  s.settleToRest();
  s.gripper_.position = start;
  s.gripper_.phase = TaskPhase::Grasping;
  s.gripper_.grasped_node.reset();
  s.collision_ = CollisionInfo{};
  s.collision_.in_collision = s.pointInCollision(start);
  s.was_in_collision_ = s.collision_.in_collision;
  s.prev_gripper_ = start;
  s.rng_ = Rng(seed);
  return s;
}

void Scene::settleToRest() {
  // Static pre-solve: relax under gravity and board contact with strong
  // damping until the residual acceleration is negligible, then zero the
  // velocities. The settled shape is the episode rest shape, so a step with
  // zero gripper velocity leaves the sheet unchanged to well below 1e-9 mm.
  const double dt = params_.substep_dt;
  const double m = tissue_.sheet.node_mass;
  const double settle_damping = 2.0 * std::sqrt(400.0 * params_.stiffness_scale / m);
  const int n = tissue_.nodeCount();
  std::vector<Vec3> forces(n);

  const int max_iters = 200000;
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int i = 0; i < n; ++i) forces[i] = m * params_.gravity;
    for (size_t si = 0; si < tissue_.springs.size(); ++si) {
      const Spring& sp = tissue_.springs[si];
      const Vec3 d = tissue_.nodes[sp.b] - tissue_.nodes[sp.a];
      const double len = d.norm();
      if (len <= 1e-12) continue;
      const Vec3 f = (spring_stiffness_[si] * (len - sp.rest_length) / len) * d;
      forces[sp.a] += f;
      forces[sp.b] -= f;
    }
    double max_accel = 0.0;
    double max_speed = 0.0;
    for (int i = 0; i < n; ++i) {
      if (tissue_.attached[i]) {
        tissue_.velocities[i].setZero();
        continue;
      }
      Vec3 accel = forces[i] / m;
      Vec3& v = tissue_.velocities[i];
      Vec3& x = tissue_.nodes[i];
      v += dt * accel;
      v *= std::max(0.0, 1.0 - settle_damping * dt);
      x += dt * v;
      if (x.z() < 0.0) {  // board support
        x.z() = 0.0;
        if (v.z() < 0.0) v.z() = 0.0;
        accel.z() = std::max(0.0, accel.z());
      }
      max_accel = std::max(max_accel, accel.norm());
      max_speed = std::max(max_speed, v.norm());
    }
    if (max_accel < 1e-8 && max_speed < 1e-10) break;
  }
  for (auto& v : tissue_.velocities) v.setZero();
}

bool Scene::pointInCollision(const Vec3& p) const {
  return tissue_.rest_aabb.expanded(params_.collision_margin).contains(p);
}

void Scene::substep(const Vec3& gripper_target, const Vec3& gripper_velocity) {
  const double dt = params_.substep_dt;
  const double m = tissue_.sheet.node_mass;
  const int n = tissue_.nodeCount();
  static thread_local std::vector<Vec3> forces;
  forces.assign(n, m * params_.gravity);

  for (size_t si = 0; si < tissue_.springs.size(); ++si) {
    const Spring& sp = tissue_.springs[si];
    const Vec3 d = tissue_.nodes[sp.b] - tissue_.nodes[sp.a];
    const double len = d.norm();
    if (len <= 1e-12) continue;
    const Vec3 f = (spring_stiffness_[si] * (len - sp.rest_length) / len) * d;
    forces[sp.a] += f;
    forces[sp.b] -= f;
  }

  const double damp = std::max(0.0, 1.0 - params_.damping * dt);
  const int grasped = gripper_.grasped_node.value_or(-1);
  for (int i = 0; i < n; ++i) {
    if (tissue_.attached[i]) {
      tissue_.velocities[i].setZero();
      continue;
    }
    if (i == grasped) {
      tissue_.nodes[i] = gripper_target;
      tissue_.velocities[i] = gripper_velocity;
      continue;
    }
    Vec3& v = tissue_.velocities[i];
    Vec3& x = tissue_.nodes[i];
    v += (dt / m) * forces[i];
    v *= damp;
    x += dt * v;
    if (x.z() < 0.0) {
      x.z() = 0.0;
      if (v.z() < 0.0) v.z() = 0.0;
    }
  }
}

bool Scene::step(const Vec3& gripper_velocity) {
  checkFinite();
  if (!gripper_velocity.allFinite()) {
    throw NumericsError("scene: non-finite gripper velocity");
  }

  Vec3 commanded = gripper_velocity;
  if (params_.actuation_noise_std > 0.0) {
    commanded += Vec3(rng_.normal(0.0, params_.actuation_noise_std),
                      rng_.normal(0.0, params_.actuation_noise_std),
                      rng_.normal(0.0, params_.actuation_noise_std));
  }

  const double control_dt = params_.controlDt();
  const Vec3 start = gripper_.position;
  const auto clamp = clampToBox(workspace_.box(), start, commanded * control_dt);
  const Vec3 target = clamp.position;
  const Vec3 effective_velocity = (target - start) / control_dt;

  for (int k = 0; k < params_.substeps; ++k) {
    const double t = static_cast<double>(k + 1) / params_.substeps;
    const Vec3 sub_target = start + t * (target - start);
    substep(sub_target, effective_velocity);
  }
  gripper_.position = target;

  // Collision metering: XY travel accumulates only while the gripper stays
  // inside the tissue box across consecutive control steps.
  const bool now_in = pointInCollision(gripper_.position);
  if (was_in_collision_ && now_in) {
    const Vec3 d = gripper_.position - prev_gripper_;
    collision_.lateral_displacement_in_collision +=
        std::sqrt(d.x() * d.x() + d.y() * d.y());
  }
  collision_.in_collision = now_in;
  collision_.contact_depth = 0.0;
  if (now_in) {
    const Aabb box = tissue_.rest_aabb.expanded(params_.collision_margin);
    const Vec3 lo = gripper_.position - box.lo;
    const Vec3 hi = box.hi - gripper_.position;
    collision_.contact_depth =
        std::min({lo.x(), lo.y(), lo.z(), hi.x(), hi.y(), hi.z()});
  }
  was_in_collision_ = now_in;
  prev_gripper_ = gripper_.position;
  ++control_steps_;

  for (const Vec3& v : tissue_.velocities) {
    if (v.norm() > params_.velocity_bound) {
      throw NumericsError("scene: integrator diverged (velocity bound exceeded)");
    }
  }
  return clamp.violated;
}

void Scene::checkFinite() const {
  if (!gripper_.position.allFinite()) {
    throw NumericsError("scene: non-finite gripper position");
  }
  for (const Vec3& x : tissue_.nodes) {
    if (!x.allFinite()) throw NumericsError("scene: non-finite node position");
  }
}

int Scene::nearestNode(const Vec3& p) const {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < tissue_.nodeCount(); ++i) {
    const double d2 = (tissue_.nodes[i] - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

bool Scene::tryGrasp() {
  if (gripper_.phase != TaskPhase::Grasping) return false;
  const double dist = (gripper_.position - task_.grasp).norm();
  if (dist >= kGraspDistanceMm) return false;
  const double surface_z =
      tissue_.surfaceHeightAt(gripper_.position.x(), gripper_.position.y());
  if (gripper_.position.z() >= surface_z) return false;
  gripper_.grasped_node = nearestNode(gripper_.position);
  gripper_.phase = TaskPhase::Retraction;
  return true;
}

bool Scene::checkSuccess() const {
  return gripper_.phase == TaskPhase::Retraction &&
         (gripper_.position - task_.end).norm() <= kSuccessDistanceMm;
}

void Scene::syncGripper(const Vec3& position) {
  gripper_.position = workspace_.box().clamp(position);
  const bool now_in = pointInCollision(gripper_.position);
  if (was_in_collision_ && now_in) {
    const Vec3 d = gripper_.position - prev_gripper_;
    collision_.lateral_displacement_in_collision +=
        std::sqrt(d.x() * d.x() + d.y() * d.y());
  }
  collision_.in_collision = now_in;
  was_in_collision_ = now_in;
  prev_gripper_ = gripper_.position;
}

void Scene::syncPhase(TaskPhase phase) {
  if (phase == gripper_.phase) return;
  if (phase == TaskPhase::Retraction) {
    gripper_.grasped_node = nearestNode(gripper_.position);
    gripper_.phase = TaskPhase::Retraction;
  }
  // Retraction -> Grasping never happens within an episode; ignore.
}

void Scene::saveSnapshot(const std::filesystem::path& path) const {
  BinaryWriter w(path);
  w.header(kSnapshotMagic, kSnapshotVersion);
  writePhysics(w, params_);
  writeVec3(w, task_.grasp);
  writeVec3(w, task_.end);
  writeVec3(w, task_.target_marker);
  w.pod(task_.marker_radius);
  writeVec3(w, workspace_.min_corner);
  writeVec3(w, workspace_.max_corner);
  w.pod(tissue_.sheet);
  writeVec3Array(w, tissue_.nodes);
  writeVec3Array(w, tissue_.velocities);
  w.vec(tissue_.attached);
  writeVec3(w, gripper_.position);
  w.pod<int32_t>(gripper_.grasped_node.value_or(-1));
  w.pod<uint8_t>(static_cast<uint8_t>(gripper_.phase));
  w.pod(collision_);
  w.pod<uint8_t>(was_in_collision_ ? 1 : 0);
  writeVec3(w, prev_gripper_);
  w.pod<int32_t>(control_steps_);
  w.str(rng_.saveState());
  w.close();
}

Scene Scene::loadSnapshot(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.header(kSnapshotMagic, kSnapshotVersion);
  Scene s;
  s.params_ = readPhysics(r);
  s.task_.grasp = readVec3(r);
  s.task_.end = readVec3(r);
  s.task_.target_marker = readVec3(r);
  s.task_.marker_radius = r.pod<double>();
  s.workspace_.min_corner = readVec3(r);
  s.workspace_.max_corner = readVec3(r);
  const SheetParams sheet = r.pod<SheetParams>();
  s.tissue_ = buildTissueSheet(sheet);
  s.tissue_.nodes = readVec3Array(r);
  s.tissue_.velocities = readVec3Array(r);
  s.tissue_.attached = r.vec<uint8_t>();
  if (s.tissue_.nodes.size() != s.tissue_.velocities.size() ||
      s.tissue_.nodes.size() != s.tissue_.attached.size()) {
    throw IoError("scene snapshot: inconsistent node arrays");
  }
  s.spring_stiffness_.clear();
  for (const Spring& sp : s.tissue_.springs) {
    s.spring_stiffness_.push_back(
        TissueMesh::stiffnessFor(sp.kind, s.params_.stiffness_scale));
  }
  s.gripper_.position = readVec3(r);
  const int32_t grasped = r.pod<int32_t>();
  if (grasped >= 0) s.gripper_.grasped_node = grasped;
  s.gripper_.phase = static_cast<TaskPhase>(r.pod<uint8_t>());
  s.collision_ = r.pod<CollisionInfo>();
  s.was_in_collision_ = r.pod<uint8_t>() != 0;
  s.prev_gripper_ = readVec3(r);
  s.control_steps_ = r.pod<int32_t>();
  s.rng_.loadState(r.str());
  return s;
}

bool Scene::operator==(const Scene& other) const {
  if (tissue_.nodes.size() != other.tissue_.nodes.size()) return false;
  for (size_t i = 0; i < tissue_.nodes.size(); ++i) {
    if (tissue_.nodes[i] != other.tissue_.nodes[i]) return false;
    if (tissue_.velocities[i] != other.tissue_.velocities[i]) return false;
  }
  return gripper_.position == other.gripper_.position &&
         gripper_.grasped_node == other.gripper_.grasped_node &&
         gripper_.phase == other.gripper_.phase &&
         control_steps_ == other.control_steps_;
}

}  // namespace retract::sim
