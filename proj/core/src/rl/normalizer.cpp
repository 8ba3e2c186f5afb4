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

#include "retract/rl/normalizer.hpp"

#include <cmath>

#include "retract/errors.hpp"

namespace retract::rl {

RewardNormalizer::RewardNormalizer(int num_envs, double gamma, double epsilon)
    : gamma_(gamma), epsilon_(epsilon), returns_(num_envs, 0.0) {}

void RewardNormalizer::push(double value) {
  // Welford update, one value at a time, in a fixed order.
  ++count_;
  const double delta = value - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (value - mean_);
}

double RewardNormalizer::variance() const {
  if (count_ == 0) return 0.0;
  return m2_ / static_cast<double>(count_);
}

double RewardNormalizer::scaleOne(double reward, int env, bool done) {
  if (env < 0 || env >= static_cast<int>(returns_.size())) {
    throw ContractError("reward normalizer: bad env index");
  }
  returns_[env] = gamma_ * returns_[env] + reward;
  push(returns_[env]);
  const double scaled = reward / std::sqrt(variance() + epsilon_);
  if (done) returns_[env] = 0.0;
  return scaled;
}

std::vector<double> RewardNormalizer::scale(const std::vector<double>& rewards,
                                            const std::vector<uint8_t>& dones) {
  if (rewards.size() != returns_.size() || dones.size() != returns_.size()) {
    throw ContractError("reward normalizer: batch size mismatch");
  }
  std::vector<double> out(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) {
    out[i] = scaleOne(rewards[i], static_cast<int>(i), dones[i] != 0);
  }
  return out;
}

void RewardNormalizer::save(BinaryWriter& w) const {
  w.pod(gamma_);
  w.pod(epsilon_);
  w.vec(returns_);
  w.pod(mean_);
  w.pod(m2_);
  w.pod(count_);
}

void RewardNormalizer::load(BinaryReader& r) {
  gamma_ = r.pod<double>();
  epsilon_ = r.pod<double>();
  returns_ = r.vec<double>();
  mean_ = r.pod<double>();
  m2_ = r.pod<double>();
  count_ = r.pod<uint64_t>();
}

}  // namespace retract::rl
