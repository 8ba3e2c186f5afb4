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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "retract/errors.hpp"

namespace retract {

// Little-endian binary record writer. Every artifact starts with a 4-byte
// magic and a u32 version so readers can reject foreign or stale files.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path.string());
  }

  void header(const char magic[4], uint32_t version) {
    out_.write(magic, 4);
    pod(version);
  }

  template <typename T>
  void pod(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  void str(const std::string& s) {
    pod<uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  template <typename T>
  void vec(const std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    pod<uint64_t>(v.size());
    out_.write(reinterpret_cast<const char*>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(T)));
  }

  void close() {
    out_.close();
    if (!out_) throw IoError("write failed on close");
  }

 private:
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) throw IoError("cannot open for reading: " + path_);
  }

  uint32_t header(const char magic[4]) {
    char m[4];
    in_.read(m, 4);
    if (!in_ || std::memcmp(m, magic, 4) != 0) {
      throw IoError("bad magic in " + path_);
    }
    return pod<uint32_t>();
  }

  uint32_t header(const char magic[4], uint32_t expected_version) {
    const uint32_t v = header(magic);
    if (v != expected_version) {
      throw IoError("unsupported version in " + path_ + ": " +
                    std::to_string(v));
    }
    return v;
  }

  template <typename T>
  T pod() {
    static_assert(std::is_trivially_copyable_v<T>);
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw IoError("truncated read in " + path_);
    return v;
  }

  std::string str() {
    const auto n = pod<uint64_t>();
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw IoError("truncated read in " + path_);
    return s;
  }

  template <typename T>
  std::vector<T> vec() {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto n = pod<uint64_t>();
    std::vector<T> v(n);
    in_.read(reinterpret_cast<char*>(v.data()),
             static_cast<std::streamsize>(n * sizeof(T)));
    if (!in_) throw IoError("truncated read in " + path_);
    return v;
  }

 private:
  std::ifstream in_;
  std::string path_;
};

// FNV-1a over a byte string; used for config hashes embedded in artifacts.
uint64_t fnv1a(const std::string& bytes);
std::string hashHex(uint64_t h);

}  // namespace retract
