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

#include "dnsm/raster.hpp"

#include <algorithm>
#include <string>

#include "dnsm/error.hpp"

namespace dnsm {

CoordFrame::CoordFrame(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("raster dimensions must be positive, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
  scale_ = 1.0 / static_cast<double>(std::max(width, height));
}

ShapeRaster::ShapeRaster(int width, int height, std::vector<std::uint8_t> mask)
    : frame_(width, height), mask_(std::move(mask)) {
  if (mask_.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidArgument("mask size does not match raster dimensions");
  }
  for (auto& v : mask_) {
    v = v != 0 ? 1 : 0;
    foreground_count_ += v;
  }
  if (foreground_count_ == 0) {
    throw InvalidArgument("shape has empty foreground");
  }
}

}  // namespace dnsm
