// Copyright 2026 The DNSM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic shapes shared by the unit and acceptance suites.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "dnsm/core_model.hpp"
#include "dnsm/raster.hpp"

namespace dnsm::fixtures {

inline ShapeRaster paint(int width, int height,
                         const std::function<bool(int, int)>& inside) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      mask[static_cast<std::size_t>(r) * width + c] = inside(r, c) ? 1 : 0;
    }
  }
  return ShapeRaster(width, height, std::move(mask));
}

// Inclusive pixel rectangle test.
inline bool in_rect(int r, int c, int r0, int r1, int c0, int c1) {
  return r >= r0 && r <= r1 && c >= c0 && c <= c1;
}

inline ShapeRaster filled_disc(int size = 64) {
  const double center = 0.5 * (size - 1);
  const double radius = 0.35 * size;
  return paint(size, size, [&](int r, int c) {
    const double dr = r - center;
    const double dc = c - center;
    return dr * dr + dc * dc <= radius * radius;
  });
}

inline ShapeRaster filled_square(int size = 64) {
  const int lo = size / 5;
  const int hi = size - 1 - size / 5;
  return paint(size, size,
               [&](int r, int c) { return in_rect(r, c, lo, hi, lo, hi); });
}

inline ShapeRaster filled_rectangle(int width, int height, int r0, int r1,
                                    int c0, int c1) {
  return paint(width, height,
               [&](int r, int c) { return in_rect(r, c, r0, r1, c0, c1); });
}

// Union of a tall and a wide rectangle sharing the lower-left corner.
inline ShapeRaster l_shape(int size = 96) {
  const double s = size / 96.0;
  const int lo = static_cast<int>(12 * s);
  const int hi = static_cast<int>(83 * s);
  const int stem = static_cast<int>(39 * s);
  const int foot = static_cast<int>(56 * s);
  return paint(size, size, [&](int r, int c) {
    return in_rect(r, c, lo, hi, lo, stem) || in_rect(r, c, foot, hi, lo, hi);
  });
}

inline ShapeRaster plus_sign(int size = 96) {
  const double s = size / 96.0;
  const int lo = static_cast<int>(8 * s);
  const int hi = static_cast<int>(87 * s);
  const int bar0 = static_cast<int>(36 * s);
  const int bar1 = static_cast<int>(59 * s);
  return paint(size, size, [&](int r, int c) {
    return in_rect(r, c, lo, hi, bar0, bar1) ||
           in_rect(r, c, bar0, bar1, lo, hi);
  });
}

// 100x100 square (2 px margin) with a 1-pixel-wide slit cut 40 px down from
// the top edge.
inline ShapeRaster square_with_slit() {
  return paint(104, 104, [](int r, int c) {
    if (!in_rect(r, c, 2, 101, 2, 101)) return false;
    return !(c == 51 && r >= 2 && r < 42);
  });
}

// Axis-aligned box [x0, x1] x [y0, y1] in normalized coordinates as four
// half-spaces of the given slope.
inline Polytope box_polytope(double x0, double x1, double y0, double y1,
                             double slope) {
  Polytope p;
  p.discriminants = {{{slope, 0.0}, -slope * x0},
                     {{-slope, 0.0}, slope * x1},
                     {{0.0, slope}, -slope * y0},
                     {{0.0, -slope}, slope * y1}};
  return p;
}

// Box covering the inclusive pixel rectangle, with faces on pixel edges.
inline Polytope pixel_box(const ShapeRaster& shape, int r0, int r1, int c0,
                          int c1, double slope) {
  const double s = shape.frame().scale();
  return box_polytope(c0 * s, (c1 + 1) * s, r0 * s, (r1 + 1) * s, slope);
}

inline DnsmModel model_of(std::vector<Polytope> polytopes) {
  ModelConfig cfg;
  cfg.n_polytopes = static_cast<int>(polytopes.size());
  cfg.m_halfspaces = static_cast<int>(polytopes.front().discriminants.size());
  return DnsmModel(cfg, std::move(polytopes));
}

// Random half-spaces that each keep a random point of [0.2, 0.8]^2 inside
// with a margin, so g stays away from 0 on part of the unit square.
inline DnsmModel random_model(std::mt19937_64& rng, int n, int m,
                              double min_slope = 4.0,
                              double max_slope = 16.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Polytope> polytopes(static_cast<std::size_t>(n));
  for (auto& p : polytopes) {
    const double px = 0.2 + 0.6 * unit(rng);
    const double py = 0.2 + 0.6 * unit(rng);
    for (int j = 0; j < m; ++j) {
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double slope = min_slope + (max_slope - min_slope) * unit(rng);
      const double margin = 0.05 + 0.3 * unit(rng);
      const double nx = std::cos(angle), ny = std::sin(angle);
      p.discriminants.push_back(
          {{slope * nx, slope * ny}, slope * (margin - nx * px - ny * py)});
    }
  }
  ModelConfig cfg;
  cfg.n_polytopes = n;
  cfg.m_halfspaces = m;
  return DnsmModel(cfg, std::move(polytopes));
}

inline ShapeRaster random_raster(std::mt19937_64& rng, int width, int height,
                                 double fill = 0.5) {
  std::bernoulli_distribution on(fill);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height);
  for (auto& v : mask) v = on(rng);
  mask[0] = 1;
  return ShapeRaster(width, height, std::move(mask));
}

// Binary PGM with foreground 255 and background 0.
inline void write_pgm(const ShapeRaster& shape,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << shape.width() << " " << shape.height() << "\n255\n";
  for (std::size_t px = 0; px < shape.pixel_count(); ++px) {
    out.put(shape.at(px) ? '\xff' : '\0');
  }
}

}  // namespace dnsm::fixtures
