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

namespace retract::rl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Generalized advantage estimation over one trajectory segment.
// `episode_ends[t]` marks that the episode terminated after step t;
// `bootstrap_value` is V(s_T) for a segment truncated mid-episode (ignored
// when the last step ended an episode).
GaeResult computeGae(const std::vector<double>& rewards,
                     const std::vector<double>& values,
                     const std::vector<uint8_t>& episode_ends,
                     double bootstrap_value, double gamma, double lambda);

// In-place normalization to zero mean, unit std (over the whole batch).
void normalizeAdvantages(std::vector<double>& advantages);

}  // namespace retract::rl
