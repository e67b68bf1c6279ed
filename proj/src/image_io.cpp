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

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "dnsm/error.hpp"
#include "dnsm/io.hpp"

namespace dnsm {

namespace {

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error("cannot read " + path.string());
  }
  return data;
}

// Header tokens of a netpbm file, skipping whitespace and '#' comments.
class PnmHeader {
 public:
  explicit PnmHeader(const std::string& data) : data_(data) {}

  long next_int() {
    skip_space();
    if (pos_ >= data_.size() || !std::isdigit(uc(data_[pos_]))) {
      throw Error("malformed PGM header");
    }
    long value = 0;
    while (pos_ < data_.size() && std::isdigit(uc(data_[pos_]))) {
      value = value * 10 + (data_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw Error("PGM header value out of range");
      }
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const { return pos_; }

 private:
  static unsigned char uc(char c) { return static_cast<unsigned char>(c); }

  void skip_space() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(uc(data_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  std::size_t pos_ = 2;
};

std::uint8_t rescale(long value, long maxval) {
  if (value > maxval) {
    throw Error("PGM sample exceeds maxval");
  }
  return static_cast<std::uint8_t>((value * 255 + maxval / 2) / maxval);
}

ShapeRaster decode_pgm(const std::string& data, std::uint8_t threshold) {
  const bool ascii = data[1] == '2';
  PnmHeader header(data);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (width < 1 || height < 1) {
    throw Error("PGM has zero size");
  }
  if (maxval < 1 || maxval > 65535) {
    throw Error("PGM maxval out of range");
  }
  const auto count = static_cast<std::size_t>(width) *
                     static_cast<std::size_t>(height);
  std::vector<std::uint8_t> mask(count);

  if (ascii) {
    PnmHeader samples = header;
    for (auto& m : mask) {
      m = rescale(samples.next_int(), maxval) >= threshold;
    }
  } else {
    // A single whitespace byte separates the header from the raster.
    const std::size_t start = header.pos() + 1;
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    if (data.size() < start + count * bytes) {
      throw Error("PGM raster is truncated");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(data.data()) + start;
    for (std::size_t k = 0; k < count; ++k) {
      const long v = bytes == 2 ? (p[2 * k] << 8) | p[2 * k + 1] : p[k];
      mask[k] = rescale(v, maxval) >= threshold;
    }
  }
  return ShapeRaster(static_cast<int>(width), static_cast<int>(height),
                     std::move(mask));
}

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

ShapeRaster decode_png(const std::string& data, std::uint8_t threshold) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, data.data(),
                                        data.size())) {
    throw Error(std::string("PNG decode failed: ") + png.image.message);
  }
  png.image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, gray.data(), 0, nullptr)) {
    throw Error(std::string("PNG decode failed: ") + png.image.message);
  }
  for (auto& v : gray) {
    v = v >= threshold;
  }
  return ShapeRaster(static_cast<int>(png.image.width),
                     static_cast<int>(png.image.height), std::move(gray));
}

std::string encode_indexed_png(const LabelMap& labels) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(labels.width);
  png.image.height = static_cast<png_uint_32>(labels.height);
  png.image.format = PNG_FORMAT_RGB_COLORMAP;
  png.image.colormap_entries = kPaletteSize;

  std::vector<std::uint8_t> indices(labels.labels.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    indices[k] = static_cast<std::uint8_t>(palette_index(labels.labels[k]));
  }
  const auto& palette = label_palette();

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0,
                                 indices.data(), 0, palette.data())) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0,
                                 indices.data(), 0, palette.data())) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

ShapeRaster read_shape(const std::filesystem::path& path,
                       std::uint8_t threshold) {
  const std::string data = read_bytes(path);
  try {
    if (data.size() >= 2 && data[0] == 'P' &&
        (data[1] == '2' || data[1] == '5')) {
      return decode_pgm(data, threshold);
    }
    if (data.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(
                                            data.data()),
                                        0, 8) == 0) {
      return decode_png(data, threshold);
    }
  } catch (const InvalidArgument& e) {
    // An empty foreground is a property of the file, not of the caller.
    throw Error(path.string() + ": " + e.what());
  }
  throw Error("unsupported image format: " + path.string());
}

const std::array<Rgb, kPaletteSize>& label_palette() {
  // Every channel of every non-background entry is at least 128.
  static const std::array<Rgb, kPaletteSize> palette{{
      {0, 0, 0},       {255, 128, 128}, {128, 255, 128}, {128, 160, 255},
      {255, 255, 128}, {255, 128, 255}, {128, 255, 255}, {255, 192, 128},
      {192, 128, 255}, {128, 255, 192}, {255, 128, 192}, {192, 255, 128},
      {128, 192, 255}, {255, 224, 192}, {224, 192, 255}, {192, 255, 224},
      {255, 160, 160}, {160, 224, 160}, {176, 176, 240}, {240, 240, 176},
      {240, 176, 240}, {176, 240, 240}, {224, 160, 128}, {160, 128, 224},
      {128, 224, 160}, {224, 128, 160}, {160, 224, 128}, {128, 160, 224},
      {255, 255, 255}, {200, 200, 200}, {255, 208, 160}, {160, 208, 255},
  }};
  return palette;
}

std::size_t palette_index(int label) {
  if (label <= 0) {
    return 0;
  }
  return 1 + static_cast<std::size_t>(label - 1) % (kPaletteSize - 1);
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot create " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      throw Error("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename into " + path.string());
  }
}

void write_label_map(const LabelMap& labels,
                     const std::filesystem::path& path) {
  if (labels.width < 1 || labels.height < 1 ||
      labels.labels.size() != static_cast<std::size_t>(labels.width) *
                                  static_cast<std::size_t>(labels.height)) {
    throw InvalidArgument("label map size does not match its dimensions");
  }
  write_file_atomic(path, encode_indexed_png(labels));

  std::ostringstream text;
  for (int r = 0; r < labels.height; ++r) {
    for (int c = 0; c < labels.width; ++c) {
      if (c > 0) text << ' ';
      text << labels.at(r, c);
    }
    text << '\n';
  }
  auto sidecar = path;
  sidecar += ".txt";
  write_file_atomic(sidecar, text.str());
}

}  // namespace dnsm
