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

#include "retract/serial.hpp"

namespace retract::rl {

// Scales rewards by the running standard deviation of the per-environment
// discounted returns. Updates are applied in environment order, one batch per
// step, so the statistics are deterministic for a fixed rollout layout.
class RewardNormalizer {
 public:
  RewardNormalizer(int num_envs, double gamma, double epsilon = 1e-8);

  // Updates the running returns with this step's rewards (environment order),
  // folds them into the variance estimate, and returns the scaled rewards.
  // `dones[i]` resets env i's return after the update.
  std::vector<double> scale(const std::vector<double>& rewards,
                            const std::vector<uint8_t>& dones);

  double scaleOne(double reward, int env, bool done);

  double variance() const;
  uint64_t count() const { return count_; }

  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  void push(double value);

  double gamma_;
  double epsilon_;
  std::vector<double> returns_;  // per-env discounted return
  double mean_ = 0.0;
  double m2_ = 0.0;
  uint64_t count_ = 0;
};

}  // namespace retract::rl
