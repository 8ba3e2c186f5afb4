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

#include "retract/render/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace retract::render {

namespace {

constexpr int kW = Frame::kWidth;
constexpr int kH = Frame::kHeight;

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hash of integer coordinates to [-1, 1].
inline double hashNoise(uint64_t seed, int64_t x, int64_t y, int64_t c) {
  uint64_t h = seed;
  h = mix64(h ^ (0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(x)));
  h = mix64(h ^ (0xc2b2ae3d27d4eb4fULL + static_cast<uint64_t>(y)));
  h = mix64(h ^ (0x165667b19e3779f9ULL + static_cast<uint64_t>(c)));
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Smooth low-frequency value noise for the board/backdrop texture.
double valueNoise(uint64_t seed, double x, double y) {
  constexpr double kCell = 24.0;
  const double fx = x / kCell;
  const double fy = y / kCell;
  const auto ix = static_cast<int64_t>(std::floor(fx));
  const auto iy = static_cast<int64_t>(std::floor(fy));
  const double tx = smoothstep(fx - static_cast<double>(ix));
  const double ty = smoothstep(fy - static_cast<double>(iy));
  const double v00 = hashNoise(seed, ix, iy, 0);
  const double v01 = hashNoise(seed, ix + 1, iy, 0);
  const double v10 = hashNoise(seed, ix, iy + 1, 0);
  const double v11 = hashNoise(seed, ix + 1, iy + 1, 0);
  return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11);
}

struct ScreenVertex {
  double x, y, depth;
  double attr;  // generic interpolated attribute (shadow falloff)
};

struct Buffers {
  std::vector<double> color;  // 3 per pixel, linear
  std::vector<double> depth;
  std::vector<uint8_t> id;

  Buffers()
      : color(static_cast<size_t>(kW) * kH * 3, 0.0),
        depth(static_cast<size_t>(kW) * kH, std::numeric_limits<double>::infinity()),
        id(static_cast<size_t>(kW) * kH, 0) {}
};

inline double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (px - a.x) * (b.y - a.y) - (py - a.y) * (b.x - a.x);
}

// Fills one triangle with a constant color (flat shading), z-buffered.
void rasterTriangle(Buffers& buf, const ScreenVertex& v0, const ScreenVertex& v1,
                    const ScreenVertex& v2, const Rgb& color, ObjectId id) {
  const double area = edge(v0, v1, v2.x, v2.y);
  if (std::abs(area) < 1e-12) return;
  const int min_x = std::max(0, static_cast<int>(std::floor(std::min({v0.x, v1.x, v2.x}))));
  const int max_x = std::min(kW - 1, static_cast<int>(std::ceil(std::max({v0.x, v1.x, v2.x}))));
  const int min_y = std::max(0, static_cast<int>(std::floor(std::min({v0.y, v1.y, v2.y}))));
  const int max_y = std::min(kH - 1, static_cast<int>(std::ceil(std::max({v0.y, v1.y, v2.y}))));
  const double inv_area = 1.0 / area;

  for (int py = min_y; py <= max_y; ++py) {
    for (int px = min_x; px <= max_x; ++px) {
      const double cx = px + 0.5;
      const double cy = py + 0.5;
      const double w0 = edge(v1, v2, cx, cy) * inv_area;
      const double w1 = edge(v2, v0, cx, cy) * inv_area;
      const double w2 = edge(v0, v1, cx, cy) * inv_area;
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      const double d = w0 * v0.depth + w1 * v1.depth + w2 * v2.depth;
      const size_t pi = static_cast<size_t>(py) * kW + px;
      if (d >= buf.depth[pi]) continue;
      buf.depth[pi] = d;
      buf.id[pi] = static_cast<uint8_t>(id);
      buf.color[pi * 3 + 0] = color.x();
      buf.color[pi * 3 + 1] = color.y();
      buf.color[pi * 3 + 2] = color.z();
    }
  }
}

// Multiplicative decal with an interpolated falloff attribute; depth-tested
// but does not write depth or id. Used for the gripper drop shadow.
void rasterShadowTriangle(Buffers& buf, const ScreenVertex& v0, const ScreenVertex& v1,
                          const ScreenVertex& v2, double strength) {
  const double area = edge(v0, v1, v2.x, v2.y);
  if (std::abs(area) < 1e-12) return;
  const int min_x = std::max(0, static_cast<int>(std::floor(std::min({v0.x, v1.x, v2.x}))));
  const int max_x = std::min(kW - 1, static_cast<int>(std::ceil(std::max({v0.x, v1.x, v2.x}))));
  const int min_y = std::max(0, static_cast<int>(std::floor(std::min({v0.y, v1.y, v2.y}))));
  const int max_y = std::min(kH - 1, static_cast<int>(std::ceil(std::max({v0.y, v1.y, v2.y}))));
  const double inv_area = 1.0 / area;

  for (int py = min_y; py <= max_y; ++py) {
    for (int px = min_x; px <= max_x; ++px) {
      const double cx = px + 0.5;
      const double cy = py + 0.5;
      const double w0 = edge(v1, v2, cx, cy) * inv_area;
      const double w1 = edge(v2, v0, cx, cy) * inv_area;
      const double w2 = edge(v0, v1, cx, cy) * inv_area;
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      const double d = w0 * v0.depth + w1 * v1.depth + w2 * v2.depth;
      const size_t pi = static_cast<size_t>(py) * kW + px;
      if (d >= buf.depth[pi]) continue;
      const double falloff = std::clamp(w0 * v0.attr + w1 * v1.attr + w2 * v2.attr, 0.0, 1.0);
      const double factor = 1.0 - strength * smoothstep(falloff);
      buf.color[pi * 3 + 0] *= factor;
      buf.color[pi * 3 + 1] *= factor;
      buf.color[pi * 3 + 2] *= factor;
    }
  }
}

class SceneRasterizer {
 public:
  SceneRasterizer(const sim::Scene& scene, const RenderStyle& style,
                  const RenderOptions& options)
      : scene_(scene), style_(style), options_(options) {
    light_ = style.light_direction.normalized();
    forward_ = camera_.forward();
  }

  void drawGeometry(Buffers& buf) {
    drawBoard(buf);
    drawMarker(buf);
    if (!options_.skip_tissue) drawTissue(buf);
    drawGripper(buf);
  }

  void drawShadow(Buffers& buf) {
    // Drop shadow of the gripper cast along the light direction onto the
    // board plane, slightly above the marker decal so both get darkened.
    const Vec3 g = scene_.gripper().position;
    if (light_.z() >= -1e-6) return;
    const double t = g.z() / -light_.z();
    const Vec3 center(g.x() + light_.x() * t, g.y() + light_.y() * t, 0.1);
    const double radius = 5.0;
    constexpr int kSegments = 16;
    ScreenVertex c = toScreen(center, 1.0);
    for (int i = 0; i < kSegments; ++i) {
      const double a0 = 2.0 * std::numbers::pi * i / kSegments;
      const double a1 = 2.0 * std::numbers::pi * (i + 1) / kSegments;
      ScreenVertex p0 = toScreen(center + Vec3(radius * std::cos(a0), radius * std::sin(a0), 0.0), 0.0);
      ScreenVertex p1 = toScreen(center + Vec3(radius * std::cos(a1), radius * std::sin(a1), 0.0), 0.0);
      rasterShadowTriangle(buf, c, p0, p1, style_.shadow_strength);
    }
  }

  Rgb backdropColor() const { return style_.board_color * 0.55; }

 private:
  ScreenVertex toScreen(const Vec3& p, double attr = 0.0) const {
    ScreenVertex v;
    camera_.project(p, v.x, v.y, v.depth);
    v.attr = attr;
    return v;
  }

  Rgb shade(const Rgb& base, Vec3 normal) const {
    const double len = normal.norm();
    if (len < 1e-12) return base * style_.ambient;
    normal /= len;
    if (normal.dot(forward_) > 0.0) normal = -normal;  // two-sided
    const double diffuse = std::max(0.0, normal.dot(-light_));
    return base * (style_.ambient + (1.0 - style_.ambient) * diffuse);
  }

  void drawTriangleWorld(Buffers& buf, const Vec3& a, const Vec3& b, const Vec3& c,
                         const Rgb& base, ObjectId id) {
    const Vec3 n = (b - a).cross(c - a);
    rasterTriangle(buf, toScreen(a), toScreen(b), toScreen(c), shade(base, n), id);
  }

  void drawBoard(Buffers& buf) {
    const Vec3 a(-90.0, -115.0, 0.0), b(90.0, -115.0, 0.0);
    const Vec3 c(90.0, 110.0, 0.0), d(-90.0, 110.0, 0.0);
    drawTriangleWorld(buf, a, b, c, style_.board_color, ObjectId::Board);
    drawTriangleWorld(buf, a, c, d, style_.board_color, ObjectId::Board);
  }

  void drawMarker(Buffers& buf) {
    const Vec3 center = scene_.task().target_marker + Vec3(0, 0, 0.05);
    const double r = scene_.task().marker_radius;
    constexpr int kSegments = 20;
    for (int i = 0; i < kSegments; ++i) {
      const double a0 = 2.0 * std::numbers::pi * i / kSegments;
      const double a1 = 2.0 * std::numbers::pi * (i + 1) / kSegments;
      drawTriangleWorld(buf, center,
                        center + Vec3(r * std::cos(a0), r * std::sin(a0), 0.0),
                        center + Vec3(r * std::cos(a1), r * std::sin(a1), 0.0),
                        style_.marker_color, ObjectId::Marker);
    }
  }

  void drawTissue(Buffers& buf) {
    const sim::TissueMesh& mesh = scene_.tissue();
    const int top = mesh.topLayer();
    const int nx = mesh.sheet.nodes_x;
    const int ny = mesh.sheet.nodes_y;
    auto node = [&](int layer, int iy, int ix) -> const Vec3& {
      return mesh.nodes[mesh.index(layer, iy, ix)];
    };
    for (int iy = 0; iy + 1 < ny; ++iy) {
      for (int ix = 0; ix + 1 < nx; ++ix) {
        const Vec3& p00 = node(top, iy, ix);
        const Vec3& p01 = node(top, iy, ix + 1);
        const Vec3& p10 = node(top, iy + 1, ix);
        const Vec3& p11 = node(top, iy + 1, ix + 1);
        drawTriangleWorld(buf, p00, p01, p11, style_.tissue_color, ObjectId::Tissue);
        drawTriangleWorld(buf, p00, p11, p10, style_.tissue_color, ObjectId::Tissue);
      }
    }
    // Perimeter skirt between top and bottom layers so lifted tissue reads
    // as a solid slab.
    const Rgb side = style_.tissue_color * 0.85;
    auto skirt = [&](int iy0, int ix0, int iy1, int ix1) {
      const Vec3& t0 = node(top, iy0, ix0);
      const Vec3& t1 = node(top, iy1, ix1);
      const Vec3& b0 = node(0, iy0, ix0);
      const Vec3& b1 = node(0, iy1, ix1);
      drawTriangleWorld(buf, t0, t1, b1, side, ObjectId::Tissue);
      drawTriangleWorld(buf, t0, b1, b0, side, ObjectId::Tissue);
    };
    for (int ix = 0; ix + 1 < nx; ++ix) {
      skirt(0, ix, 0, ix + 1);
      skirt(ny - 1, ix, ny - 1, ix + 1);
    }
    for (int iy = 0; iy + 1 < ny; ++iy) {
      skirt(iy, 0, iy + 1, 0);
      skirt(iy, nx - 1, iy + 1, nx - 1);
    }
  }

  void drawGripper(Buffers& buf) {
    const Vec3 g = scene_.gripper().position;
    const double r = 4.5;
    const Vec3 xp(r, 0, 0), yp(0, r, 0), zp(0, 0, r);
    const Vec3 verts[6] = {g + xp, g - xp, g + yp, g - yp, g + zp, g - zp};
    const int faces[8][3] = {{4, 0, 2}, {4, 2, 1}, {4, 1, 3}, {4, 3, 0},
                             {5, 2, 0}, {5, 1, 2}, {5, 3, 1}, {5, 0, 3}};
    for (const auto& f : faces) {
      drawTriangleWorld(buf, verts[f[0]], verts[f[1]], verts[f[2]],
                        style_.gripper_color, ObjectId::Gripper);
    }
    // Instrument shaft rising out of the top of the view.
    const double w = 1.6;
    const Vec3 lo = g + Vec3(0, 0, 3.0);
    const Vec3 hi = g + Vec3(0, 0, 120.0);
    const Vec3 corners[4] = {Vec3(-w, -w, 0), Vec3(w, -w, 0), Vec3(w, w, 0), Vec3(-w, w, 0)};
    const Rgb shaft = style_.gripper_color * 0.75;
    for (int i = 0; i < 4; ++i) {
      const Vec3 c0 = corners[i];
      const Vec3 c1 = corners[(i + 1) % 4];
      drawTriangleWorld(buf, lo + c0, lo + c1, hi + c1, shaft, ObjectId::Gripper);
      drawTriangleWorld(buf, lo + c0, hi + c1, hi + c0, shaft, ObjectId::Gripper);
    }
  }

  const sim::Scene& scene_;
  const RenderStyle& style_;
  const RenderOptions& options_;
  OrthoCamera camera_;
  Vec3 light_;
  Vec3 forward_;
};

}  // namespace

void OrthoCamera::project(const Vec3& p, double& sx, double& sy, double& depth) const {
  const double e = elevation_deg * std::numbers::pi / 180.0;
  const double ce = std::cos(e);
  const double se = std::sin(e);
  // forward = (0, -ce, -se); right = (1, 0, 0); up = (0, -se, ce) projected.
  sx = center_x + pixels_per_mm * p.x();
  sy = center_y - pixels_per_mm * (-se * p.y() + ce * p.z());
  depth = -ce * p.y() - se * p.z();
}

Vec3 OrthoCamera::forward() const {
  const double e = elevation_deg * std::numbers::pi / 180.0;
  return Vec3(0.0, -std::cos(e), -std::sin(e));
}

Frame renderFrame(const sim::Scene& scene, const RenderStyle& style,
                  const LightingCondition& condition, const RenderOptions& options) {
  Buffers buf;
  SceneRasterizer raster(scene, style, options);

  const Rgb backdrop = raster.backdropColor();
  for (size_t i = 0; i < static_cast<size_t>(kW) * kH; ++i) {
    buf.color[i * 3 + 0] = backdrop.x();
    buf.color[i * 3 + 1] = backdrop.y();
    buf.color[i * 3 + 2] = backdrop.z();
  }

  raster.drawGeometry(buf);
  raster.drawShadow(buf);

  const Mat3 hue = hueRotationMatrix(style.hue_shift_deg + condition.hue_offset_deg);
  Frame frame;
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      const size_t pi = static_cast<size_t>(y) * kW + x;
      Rgb c(buf.color[pi * 3], buf.color[pi * 3 + 1], buf.color[pi * 3 + 2]);
      // Board and backdrop carry the per-domain texture pattern.
      const auto id = static_cast<ObjectId>(buf.id[pi]);
      if (id == ObjectId::Board || id == ObjectId::Background) {
        c.array() += style.texture_amplitude *
                     valueNoise(style.background_texture_seed, x, y);
      }
      c = hue * c;
      c *= condition.brightness;
      if (style.noise_amplitude > 0.0) {
        for (int ch = 0; ch < 3; ++ch) {
          c[ch] += style.noise_amplitude * hashNoise(style.noise_seed, x, y, ch);
        }
      }
      for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(c[ch], 0.0, 1.0);
        frame.at(x, y, ch) = static_cast<uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return frame;
}

std::vector<uint8_t> renderIds(const sim::Scene& scene, const RenderOptions& options) {
  Buffers buf;
  const RenderStyle style = RenderStyle::domainS();
  SceneRasterizer raster(scene, style, options);
  raster.drawGeometry(buf);
  return std::move(buf.id);
}

double markerVisibleFraction(const sim::Scene& scene) {
  RenderOptions with_tissue;
  RenderOptions without_tissue;
  without_tissue.skip_tissue = true;
  const auto ids_now = renderIds(scene, with_tissue);
  const auto ids_clear = renderIds(scene, without_tissue);
  long visible = 0;
  long total = 0;
  for (size_t i = 0; i < ids_clear.size(); ++i) {
    if (ids_clear[i] == static_cast<uint8_t>(ObjectId::Marker)) {
      ++total;
      if (ids_now[i] == static_cast<uint8_t>(ObjectId::Marker)) ++visible;
    }
  }
  if (total == 0) return 0.0;
  return static_cast<double>(visible) / static_cast<double>(total);
}

}  // namespace retract::render
