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

#include "retract/render/observation.hpp"

#include <algorithm>
#include <cmath>

#include "retract/serial.hpp"

namespace retract::render {

namespace {
constexpr char kObsMagic[4] = {'R', 'T', 'O', 'B'};
constexpr uint32_t kObsVersion = 1;
}  // namespace

AreaResampler::AreaResampler(int src, int dst) : src_(src), dst_(dst) {
  if (dst < 1 || dst > src) throw ContractError("resampler: 1 <= dst <= src");
  const double ratio = static_cast<double>(src) / dst;
  spans_.resize(dst);
  for (int j = 0; j < dst; ++j) {
    const double lo = j * ratio;
    const double hi = (j + 1) * ratio;
    Span& s = spans_[j];
    s.begin = static_cast<int>(std::floor(lo));
    s.end = std::min(src - 1, static_cast<int>(std::ceil(hi)) - 1);
    if (s.end - s.begin + 1 > static_cast<int>(s.weight.size())) {
      throw ContractError("resampler: span exceeds weight capacity");
    }
    s.weight.fill(0.0);
    for (int i = s.begin; i <= s.end; ++i) {
      const double overlap = std::min<double>(i + 1, hi) - std::max<double>(i, lo);
      s.weight[i - s.begin] = std::max(0.0, overlap) / ratio;
    }
  }
}

void AreaResampler::downscale(const Frame& frame, float* out) const {
  frame.requireStandardSize();
  const size_t plane = static_cast<size_t>(dst_) * dst_;
  for (int dy = 0; dy < dst_; ++dy) {
    const Span& sy = spans_[dy];
    for (int dx = 0; dx < dst_; ++dx) {
      const Span& sx = spans_[dx];
      double acc[3] = {0.0, 0.0, 0.0};
      for (int y = sy.begin; y <= sy.end; ++y) {
        const double wy = sy.weight[y - sy.begin];
        const uint8_t* row = frame.rgb.data() + (static_cast<size_t>(y) * frame.width + sx.begin) * 3;
        double rx[3] = {0.0, 0.0, 0.0};
        for (int x = sx.begin; x <= sx.end; ++x) {
          const double wx = sx.weight[x - sx.begin];
          rx[0] += wx * row[0];
          rx[1] += wx * row[1];
          rx[2] += wx * row[2];
          row += 3;
        }
        acc[0] += wy * rx[0];
        acc[1] += wy * rx[1];
        acc[2] += wy * rx[2];
      }
      const size_t pi = static_cast<size_t>(dy) * dst_ + dx;
      out[0 * plane + pi] = static_cast<float>(acc[0] / 255.0);
      out[1 * plane + pi] = static_cast<float>(acc[1] / 255.0);
      out[2 * plane + pi] = static_cast<float>(acc[2] / 255.0);
    }
  }
}

FrameStack::FrameStack(int observation_size)
    : resampler_(Frame::kWidth, observation_size) {}

ObservationTensor FrameStack::reset(const Frame& frame) {
  planes_.clear();
  const int s = resampler_.dst();
  std::vector<float> p(static_cast<size_t>(3) * s * s);
  resampler_.downscale(frame, p.data());
  for (int i = 0; i < kStackFrames; ++i) planes_.push_back(p);
  return assemble();
}

ObservationTensor FrameStack::push(const Frame& frame) {
  if (planes_.empty()) return reset(frame);
  const int s = resampler_.dst();
  std::vector<float> p(static_cast<size_t>(3) * s * s);
  resampler_.downscale(frame, p.data());
  planes_.push_back(std::move(p));
  while (planes_.size() > kStackFrames) planes_.pop_front();
  return assemble();
}

ObservationTensor FrameStack::assemble() const {
  const int s = resampler_.dst();
  ObservationTensor obs;
  obs.size = s;
  obs.data.resize(static_cast<size_t>(kChannels) * s * s);
  const size_t per_frame = static_cast<size_t>(3) * s * s;
  for (int f = 0; f < kStackFrames; ++f) {
    std::copy(planes_[f].begin(), planes_[f].end(),
              obs.data.begin() + f * per_frame);
  }
  return obs;
}

void saveObservation(const std::filesystem::path& path, const ObservationTensor& obs) {
  BinaryWriter w(path);
  w.header(kObsMagic, kObsVersion);
  w.pod<int32_t>(obs.size);
  w.pod<int32_t>(obs.size);
  w.pod<int32_t>(kChannels);
  w.str("f32");
  w.pod<double>(1.0);  // values already scaled to [0, 1]
  w.vec(obs.data);
  w.close();
}

ObservationTensor loadObservation(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.header(kObsMagic, kObsVersion);
  ObservationTensor obs;
  obs.size = r.pod<int32_t>();
  const int w = r.pod<int32_t>();
  const int c = r.pod<int32_t>();
  const std::string dtype = r.str();
  r.pod<double>();
  if (w != obs.size || c != kChannels || dtype != "f32") {
    throw IoError("observation file has unexpected shape or dtype");
  }
  obs.data = r.vec<float>();
  obs.requireSize(obs.size);
  return obs;
}

}  // namespace retract::render
