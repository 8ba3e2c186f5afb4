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

#include <array>
#include <deque>
#include <filesystem>
#include <vector>

#include "retract/render/frame.hpp"

namespace retract::render {

inline constexpr int kStackFrames = 4;
inline constexpr int kChannels = 3 * kStackFrames;  // 12

// Stacked, downscaled observation: `size` x `size` pixels, 12 channels
// (4 most recent RGB frames, newest last), values in [0, 1]. Stored as
// channel planes.
struct ObservationTensor {
  int size = 0;
  std::vector<float> data;  // [12][size][size]

  bool empty() const { return data.empty(); }
  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * size + y) * size + x];
  }
  void requireSize(int expected) const {
    if (size != expected || data.size() != static_cast<size_t>(kChannels) * expected * expected) {
      throw ContractError("observation tensor shape mismatch");
    }
  }
};

// Area-weighted average resampling from the 256-pixel frame edge to an
// arbitrary target edge (84 for the full-scale preset, 42 for the desk
// preset). Exact for constant images.
class AreaResampler {
 public:
  AreaResampler(int src, int dst);

  int src() const { return src_; }
  int dst() const { return dst_; }

  // Downscales an 8-bit frame into 3 float planes in [0, 1], appended to
  // `out` (which must have room for 3*dst*dst floats at `offset`).
  void downscale(const Frame& frame, float* out) const;

 private:
  struct Span {
    int begin;
    int end;                    // inclusive
    std::array<double, 16> weight;  // weights for [begin, end]
  };
  std::vector<Span> spans_;
  int src_;
  int dst_;
};

// Rolling window of the four most recent frames; each pushed frame is
// 8-bit quantized (as produced by the renderer) and downscaled once.
class FrameStack {
 public:
  explicit FrameStack(int observation_size);

  // Clears history and fills the window with four copies of `frame`.
  ObservationTensor reset(const Frame& frame);

  // Appends a frame, dropping the oldest beyond four.
  ObservationTensor push(const Frame& frame);

  int observationSize() const { return resampler_.dst(); }

 private:
  ObservationTensor assemble() const;

  AreaResampler resampler_;
  std::deque<std::vector<float>> planes_;  // each [3][size][size]
};

// Flat binary export with a small header (shape, dtype, scale).
void saveObservation(const std::filesystem::path& path, const ObservationTensor& obs);
ObservationTensor loadObservation(const std::filesystem::path& path);

}  // namespace retract::render
