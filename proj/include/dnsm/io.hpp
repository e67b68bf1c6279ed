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

// Image ingestion, label-map output and the text model format.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "dnsm/core_model.hpp"
#include "dnsm/pipeline.hpp"
#include "dnsm/raster.hpp"

namespace dnsm {

inline constexpr std::uint8_t kDefaultThreshold = 128;

// Reads a PGM (P2 or P5, any maxval) or a PNG of any color type. Gray
// values are rescaled to 0..255; pixels >= threshold are foreground.
// Throws Error on I/O or format problems and when the foreground is empty.
ShapeRaster read_shape(const std::filesystem::path& path,
                       std::uint8_t threshold = kDefaultThreshold);

// Fixed label palette. Entry 0 is black; every other entry has luminance
// above 128, so a label image read back as a shape collapses to its
// foreground. Label L > 0 uses entry 1 + (L - 1) % 31.
inline constexpr std::size_t kPaletteSize = 32;
using Rgb = std::array<std::uint8_t, 3>;
const std::array<Rgb, kPaletteSize>& label_palette();
std::size_t palette_index(int label);

// Writes `path` as an 8-bit indexed PNG and `path` + ".txt" as a
// whitespace-separated integer matrix, one image row per line. Both files
// are written to a temporary name and renamed into place.
void write_label_map(const LabelMap& labels,
                     const std::filesystem::path& path);

// Text model file: a header, then N * M lines "w0 w1 b" in shortest
// round-trip decimal form.
//
//   dnsm-model 1
//   polytopes <N> halfspaces <M> dimension 2
//   slope <slope>
//   frame <width> <height>
struct ModelFile {
  DnsmModel model;
  int frame_width = 0;
  int frame_height = 0;

  bool operator==(const ModelFile&) const = default;
};

inline constexpr int kModelFormatVersion = 1;

std::string format_model(const ModelFile& file);
// Throws Error on malformed input.
ModelFile parse_model(std::string_view text);

void write_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile read_model(const std::filesystem::path& path);

// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace dnsm
