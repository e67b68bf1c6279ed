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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dnsm {

// Point in the normalized model frame.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pixel {
  int row = 0;
  int col = 0;
};

// Affine map between pixel indices and the normalized frame. The longest
// image side spans [0, 1]; pixel centers sit at (index + 0.5) * scale.
class CoordFrame {
 public:
  CoordFrame() = default;
  CoordFrame(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  // Normalized length of one pixel side.
  double scale() const { return scale_; }
  double pixel_area() const { return scale_ * scale_; }

  Point2 to_normalized(double row, double col) const {
    return {(col + 0.5) * scale_, (row + 0.5) * scale_};
  }
  Point2 to_normalized(Pixel p) const { return to_normalized(p.row, p.col); }

  // Inverse of to_normalized, returning fractional pixel indices.
  void to_pixel(Point2 p, double& row, double& col) const {
    row = p.y / scale_ - 0.5;
    col = p.x / scale_ - 0.5;
  }

  bool operator==(const CoordFrame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double scale_ = 1.0;
};

// Binary shape image I(x) in {0,1}, row-major, with its coordinate frame.
class ShapeRaster {
 public:
  // Throws InvalidArgument on size mismatch or empty foreground.
  ShapeRaster(int width, int height, std::vector<std::uint8_t> mask);

  int width() const { return frame_.width(); }
  int height() const { return frame_.height(); }
  std::size_t pixel_count() const { return mask_.size(); }
  const CoordFrame& frame() const { return frame_; }

  bool at(int row, int col) const {
    return mask_[static_cast<std::size_t>(row) * width() + col] != 0;
  }
  bool at(std::size_t index) const { return mask_[index] != 0; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  std::size_t foreground_count() const { return foreground_count_; }

  Point2 center_of(std::size_t index) const {
    const auto w = static_cast<std::size_t>(width());
    return frame_.to_normalized(static_cast<double>(index / w),
                                static_cast<double>(index % w));
  }

 private:
  CoordFrame frame_;
  std::vector<std::uint8_t> mask_;
  std::size_t foreground_count_ = 0;
};

}  // namespace dnsm
