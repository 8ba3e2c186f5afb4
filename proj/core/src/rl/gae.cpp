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

#include "retract/rl/gae.hpp"

#include <cmath>

#include "retract/errors.hpp"

namespace retract::rl {

GaeResult computeGae(const std::vector<double>& rewards,
                     const std::vector<double>& values,
                     const std::vector<uint8_t>& episode_ends,
                     double bootstrap_value, double gamma, double lambda) {
  const size_t n = rewards.size();
  if (values.size() != n || episode_ends.size() != n) {
    throw ContractError("computeGae: input lengths must match");
  }
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);

  double gae = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double not_done = episode_ends[i] ? 0.0 : 1.0;
    const double next_value = (i + 1 < n) ? values[i + 1] : bootstrap_value;
    const double delta = rewards[i] + gamma * not_done * next_value - values[i];
    gae = delta + gamma * lambda * not_done * gae;
    out.advantages[i] = gae;
    out.returns[i] = gae + values[i];
  }
  return out;
}

void normalizeAdvantages(std::vector<double>& advantages) {
  if (advantages.empty()) return;
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= static_cast<double>(advantages.size());
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(advantages.size());
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : advantages) a = (a - mean) * inv;
}

}  // namespace retract::rl
