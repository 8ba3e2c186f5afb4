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
#include <filesystem>
#include <vector>

#include "retract/errors.hpp"

namespace retract::render {

// 8-bit RGB image. Camera frames are always 256x256; loaders may produce
// other sizes, which the observation pipeline rejects.
struct Frame {
  static constexpr int kWidth = 256;
  static constexpr int kHeight = 256;

  int width = kWidth;
  int height = kHeight;
  std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

  Frame() : rgb(static_cast<size_t>(kWidth) * kHeight * 3, 0) {}
  Frame(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t& at(int x, int y, int c) {
    return rgb[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t at(int x, int y, int c) const {
    return rgb[(static_cast<size_t>(y) * width + x) * 3 + c];
  }

  void requireStandardSize() const {
    if (width != kWidth || height != kHeight) {
      throw ContractError("frame must be 256x256x3");
    }
  }

  bool operator==(const Frame& o) const {
    return width == o.width && height == o.height && rgb == o.rgb;
  }
};

void writePng(const std::filesystem::path& path, const Frame& frame);
Frame readPng(const std::filesystem::path& path);

}  // namespace retract::render
