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

#include "retract/adapt/translator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "retract/serial.hpp"

namespace retract::adapt {

namespace {

constexpr char kEnsembleMagic[4] = {'R', 'T', 'E', 'N'};
constexpr uint32_t kEnsembleVersion = 1;

ChannelStats accumulateStats(const std::vector<render::Frame>& frames,
                             const std::vector<size_t>& indices) {
  ChannelStats st;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();
  long count = 0;
  for (size_t idx : indices) {
    const render::Frame& f = frames[idx];
    const size_t n = static_cast<size_t>(f.width) * f.height;
    for (size_t p = 0; p < n; ++p) {
      const Vec3 v(f.rgb[p * 3] / 255.0, f.rgb[p * 3 + 1] / 255.0,
                   f.rgb[p * 3 + 2] / 255.0);
      sum += v;
      outer += v * v.transpose();
      ++count;
    }
  }
  if (count == 0) throw DomainError("translator fit: empty image batch");
  st.pixel_count = count;
  st.mean = sum / count;
  st.covariance = outer / count - st.mean * st.mean.transpose();
  return st;
}

// Symmetric PSD square root via eigendecomposition, with an epsilon floor on
// the eigenvalues. Sets `regularized` if the floor engaged.
Mat3 psdSqrt(const Mat3& m, double epsilon, bool* regularized) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  Vec3 ev = es.eigenvalues();
  for (int i = 0; i < 3; ++i) {
    if (ev[i] < epsilon) {
      ev[i] = epsilon;
      if (regularized) *regularized = true;
    }
  }
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Mat3 psdInvSqrt(const Mat3& m, double epsilon, bool* regularized) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  Vec3 ev = es.eigenvalues();
  for (int i = 0; i < 3; ++i) {
    if (ev[i] < epsilon) {
      ev[i] = epsilon;
      if (regularized) *regularized = true;
    }
  }
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// Lighting-stratified subsample of the train-split indices.
std::vector<size_t> subsampleIndices(const std::vector<int>& lighting,
                                     const std::vector<Split>& splits,
                                     double fraction, Rng& rng) {
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == Split::Train) by_class[lighting[i]].push_back(i);
  }
  std::vector<size_t> chosen;
  for (auto& [cls, idx] : by_class) {
    for (size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniformIndex(i)]);
    }
    const size_t take = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(fraction * static_cast<double>(idx.size()))));
    for (size_t i = 0; i < std::min(take, idx.size()); ++i) chosen.push_back(idx[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

TranslatorParams TranslatorParams::identity() { return TranslatorParams{}; }

Vec3 TranslatorParams::patchOffsetAt(int x, int y, int width, int height) const {
  if (patch_grid <= 0) return Vec3::Zero();
  const int k = patch_grid;
  // Cell centers at ((i + 0.5) * width / k); bilinear between them, clamped
  // at the borders.
  const double fx = (x + 0.5) * k / width - 0.5;
  const double fy = (y + 0.5) * k / height - 0.5;
  const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, k - 2);
  const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, k - 2);
  const double tx = std::clamp(fx - ix, 0.0, 1.0);
  const double ty = std::clamp(fy - iy, 0.0, 1.0);
  const Vec3& o00 = patch_offsets[iy * k + ix];
  const Vec3& o01 = patch_offsets[iy * k + ix + 1];
  const Vec3& o10 = patch_offsets[(iy + 1) * k + ix];
  const Vec3& o11 = patch_offsets[(iy + 1) * k + ix + 1];
  return (1 - ty) * ((1 - tx) * o00 + tx * o01) + ty * ((1 - tx) * o10 + tx * o11);
}

TranslatorParams fitTranslator(const UnpairedImageSet& data, uint64_t seed,
                               const FitOptions& options) {
  if (data.source.size() < 100 || data.target.size() < 100) {
    throw DomainError("translator fit: need at least 100 images per domain");
  }

  Rng rng(deriveSeed(seed, 0xf17));
  const auto src_idx = subsampleIndices(data.source_lighting, data.source_split,
                                        options.subsample_fraction, rng);
  const auto tgt_idx = subsampleIndices(data.target_lighting, data.target_split,
                                        options.subsample_fraction, rng);
  if (src_idx.empty() || tgt_idx.empty()) {
    throw DomainError("translator fit: train split is empty");
  }

  TranslatorParams params;
  params.stats.seed = seed;
  params.stats.source = accumulateStats(data.source, src_idx);
  params.stats.target = accumulateStats(data.target, tgt_idx);
  params.stats.regularization_epsilon = options.covariance_epsilon;

  // Monge map between Gaussians: A = Cs^-1/2 (Cs^1/2 Cr Cs^1/2)^1/2 Cs^-1/2.
  bool regularized = false;
  const Mat3 cs = params.stats.source.covariance;
  const Mat3 cr = params.stats.target.covariance;
  const Mat3 cs_sqrt = psdSqrt(cs, options.covariance_epsilon, &regularized);
  const Mat3 cs_inv_sqrt = psdInvSqrt(cs, options.covariance_epsilon, &regularized);
  const Mat3 inner = psdSqrt(cs_sqrt * cr * cs_sqrt, options.covariance_epsilon * options.covariance_epsilon,
                             &regularized);
  params.color_matrix = cs_inv_sqrt * inner * cs_inv_sqrt;
  params.offset = params.stats.target.mean - params.color_matrix * params.stats.source.mean;
  params.stats.regularized = regularized;

  // Per-patch offsets: difference between target patch means and the patch
  // means of the affinely translated source batch.
  const int k = options.patch_grid;
  params.patch_grid = k;
  if (k > 0) {
    std::vector<Vec3> src_sum(static_cast<size_t>(k) * k, Vec3::Zero());
    std::vector<Vec3> tgt_sum(static_cast<size_t>(k) * k, Vec3::Zero());
    std::vector<long> src_cnt(static_cast<size_t>(k) * k, 0);
    std::vector<long> tgt_cnt(static_cast<size_t>(k) * k, 0);
    auto accumulate = [&](const render::Frame& f, std::vector<Vec3>& sum,
                          std::vector<long>& cnt) {
      for (int y = 0; y < f.height; ++y) {
        const int cy = std::min(k - 1, y * k / f.height);
        for (int x = 0; x < f.width; ++x) {
          const int cx = std::min(k - 1, x * k / f.width);
          const size_t cell = static_cast<size_t>(cy) * k + cx;
          sum[cell] += Vec3(f.at(x, y, 0) / 255.0, f.at(x, y, 1) / 255.0,
                            f.at(x, y, 2) / 255.0);
          ++cnt[cell];
        }
      }
    };
    for (size_t idx : src_idx) accumulate(data.source[idx], src_sum, src_cnt);
    for (size_t idx : tgt_idx) accumulate(data.target[idx], tgt_sum, tgt_cnt);
    params.patch_offsets.resize(static_cast<size_t>(k) * k);
    for (size_t c = 0; c < params.patch_offsets.size(); ++c) {
      if (src_cnt[c] == 0 || tgt_cnt[c] == 0) {
        params.patch_offsets[c] = Vec3::Zero();
        continue;
      }
      const Vec3 src_mean = src_sum[c] / src_cnt[c];
      const Vec3 tgt_mean = tgt_sum[c] / tgt_cnt[c];
      params.patch_offsets[c] =
          tgt_mean - (params.color_matrix * src_mean + params.offset);
    }
  }

  // Record the translated-batch mean for the fit report.
  Vec3 tmean = Vec3::Zero();
  long tcount = 0;
  for (size_t idx : src_idx) {
    const render::Frame& f = data.source[idx];
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        const Vec3 v(f.at(x, y, 0) / 255.0, f.at(x, y, 1) / 255.0, f.at(x, y, 2) / 255.0);
        Vec3 t = params.color_matrix * v + params.offset +
                 params.patchOffsetAt(x, y, f.width, f.height);
        tmean += t.cwiseMax(0.0).cwiseMin(1.0);
        ++tcount;
      }
    }
  }
  params.stats.translated_train_mean = tmean / tcount;
  return params;
}

render::Frame translate(const TranslatorParams& params, const render::Frame& frame) {
  render::Frame out(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const Vec3 v(frame.at(x, y, 0) / 255.0, frame.at(x, y, 1) / 255.0,
                   frame.at(x, y, 2) / 255.0);
      Vec3 t = params.color_matrix * v + params.offset;
      if (params.patch_grid > 0) {
        t += params.patchOffsetAt(x, y, frame.width, frame.height);
      }
      for (int c = 0; c < 3; ++c) {
        const double clamped = std::clamp(t[c], 0.0, 1.0);
        out.at(x, y, c) = static_cast<uint8_t>(std::lround(clamped * 255.0));
      }
    }
  }
  return out;
}

double identityResidual(const TranslatorParams& params, const render::Frame& frame) {
  const render::Frame t = translate(params, frame);
  double acc = 0.0;
  for (size_t i = 0; i < frame.rgb.size(); ++i) {
    acc += std::abs(static_cast<double>(t.rgb[i]) - static_cast<double>(frame.rgb[i]));
  }
  return acc / (255.0 * static_cast<double>(frame.rgb.size()));
}

Vec3 channelMeans(const std::vector<render::Frame>& frames) {
  Vec3 sum = Vec3::Zero();
  long count = 0;
  for (const auto& f : frames) {
    const size_t n = static_cast<size_t>(f.width) * f.height;
    for (size_t p = 0; p < n; ++p) {
      sum += Vec3(f.rgb[p * 3] / 255.0, f.rgb[p * 3 + 1] / 255.0, f.rgb[p * 3 + 2] / 255.0);
      ++count;
    }
  }
  if (count == 0) throw DomainError("channelMeans: no pixels");
  return sum / count;
}

Vec3 channelStds(const std::vector<render::Frame>& frames) {
  const Vec3 mean = channelMeans(frames);
  Vec3 sq = Vec3::Zero();
  long count = 0;
  for (const auto& f : frames) {
    const size_t n = static_cast<size_t>(f.width) * f.height;
    for (size_t p = 0; p < n; ++p) {
      const Vec3 v(f.rgb[p * 3] / 255.0, f.rgb[p * 3 + 1] / 255.0, f.rgb[p * 3 + 2] / 255.0);
      sq += (v - mean).cwiseProduct(v - mean);
      ++count;
    }
  }
  return (sq / count).cwiseSqrt();
}

void TranslatorEnsemble::save(const std::filesystem::path& path) const {
  BinaryWriter w(path);
  w.header(kEnsembleMagic, kEnsembleVersion);
  w.pod<uint32_t>(static_cast<uint32_t>(members.size()));
  auto writeVec = [&](const Vec3& v) {
    w.pod(v.x());
    w.pod(v.y());
    w.pod(v.z());
  };
  auto writeMat = [&](const Mat3& m) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) w.pod(m(r, c));
  };
  for (const auto& p : members) {
    writeMat(p.color_matrix);
    writeVec(p.offset);
    w.pod<int32_t>(p.patch_grid);
    w.pod<uint64_t>(p.patch_offsets.size());
    for (const auto& o : p.patch_offsets) writeVec(o);
    writeVec(p.stats.source.mean);
    writeMat(p.stats.source.covariance);
    w.pod<int64_t>(p.stats.source.pixel_count);
    writeVec(p.stats.target.mean);
    writeMat(p.stats.target.covariance);
    w.pod<int64_t>(p.stats.target.pixel_count);
    writeVec(p.stats.translated_train_mean);
    w.pod(p.stats.regularization_epsilon);
    w.pod<uint8_t>(p.stats.regularized ? 1 : 0);
    w.pod<uint64_t>(p.stats.seed);
  }
  w.close();
}

TranslatorEnsemble TranslatorEnsemble::load(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.header(kEnsembleMagic, kEnsembleVersion);
  const uint32_t count = r.pod<uint32_t>();
  auto readVec = [&]() {
    Vec3 v;
    v.x() = r.pod<double>();
    v.y() = r.pod<double>();
    v.z() = r.pod<double>();
    return v;
  };
  auto readMat = [&]() {
    Mat3 m;
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col) m(row, col) = r.pod<double>();
    return m;
  };
  TranslatorEnsemble ens;
  for (uint32_t i = 0; i < count; ++i) {
    TranslatorParams p;
    p.color_matrix = readMat();
    p.offset = readVec();
    p.patch_grid = r.pod<int32_t>();
    const auto n = r.pod<uint64_t>();
    p.patch_offsets.resize(n);
    for (auto& o : p.patch_offsets) o = readVec();
    p.stats.source.mean = readVec();
    p.stats.source.covariance = readMat();
    p.stats.source.pixel_count = r.pod<int64_t>();
    p.stats.target.mean = readVec();
    p.stats.target.covariance = readMat();
    p.stats.target.pixel_count = r.pod<int64_t>();
    p.stats.translated_train_mean = readVec();
    p.stats.regularization_epsilon = r.pod<double>();
    p.stats.regularized = r.pod<uint8_t>() != 0;
    p.stats.seed = r.pod<uint64_t>();
    ens.members.push_back(std::move(p));
  }
  return ens;
}

TranslatorEnsemble fitEnsemble(const UnpairedImageSet& data, uint64_t master_seed,
                               int count, const FitOptions& options) {
  TranslatorEnsemble ens;
  for (int i = 0; i < count; ++i) {
    ens.members.push_back(fitTranslator(data, deriveSeed(master_seed, 100 + i), options));
  }
  return ens;
}

}  // namespace retract::adapt
