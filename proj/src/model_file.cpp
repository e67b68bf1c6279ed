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

#include <charconv>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>
#include <vector>

#include "dnsm/error.hpp"
#include "dnsm/io.hpp"

namespace dnsm {

namespace {

constexpr std::string_view kMagic = "dnsm-model";

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) {
    throw Error("cannot format parameter");
  }
  out.append(buf, end);
}

// Whitespace-separated token reader with line tracking for messages.
class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::string_view next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    if (start == pos_) {
      fail("unexpected end of model file");
    }
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    if (next() != word) {
      fail("expected '" + std::string(word) + "'");
    }
  }

  template <typename T>
  T number() {
    const auto tok = next();
    T value{};
    const auto [end, ec] =
        std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || end != tok.data() + tok.size()) {
      fail("bad number '" + std::string(tok) + "'");
    }
    return value;
  }

  bool at_end() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    return pos_ == text_.size();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("model file line " + std::to_string(line_) + ": " + what);
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::string format_model(const ModelFile& file) {
  const auto& cfg = file.model.config();
  std::string out;
  out += std::string(kMagic) + ' ' + std::to_string(kModelFormatVersion) + '\n';
  out += "polytopes " + std::to_string(cfg.n_polytopes) + " halfspaces " +
         std::to_string(cfg.m_halfspaces) + " dimension " +
         std::to_string(cfg.dimension) + '\n';
  out += "slope ";
  append_double(out, cfg.slope);
  out += "\nframe " + std::to_string(file.frame_width) + ' ' +
         std::to_string(file.frame_height) + '\n';
  for (const auto& p : file.model.polytopes()) {
    for (const auto& d : p.discriminants) {
      append_double(out, d.weights[0]);
      out += ' ';
      append_double(out, d.weights[1]);
      out += ' ';
      append_double(out, d.bias);
      out += '\n';
    }
  }
  return out;
}

ModelFile parse_model(std::string_view text) {
  Tokens in(text);
  in.expect(kMagic);
  if (in.number<int>() != kModelFormatVersion) {
    in.fail("unsupported format version");
  }
  ModelConfig cfg;
  in.expect("polytopes");
  cfg.n_polytopes = in.number<int>();
  in.expect("halfspaces");
  cfg.m_halfspaces = in.number<int>();
  in.expect("dimension");
  cfg.dimension = in.number<int>();
  in.expect("slope");
  cfg.slope = in.number<double>();
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }

  ModelFile file;
  in.expect("frame");
  file.frame_width = in.number<int>();
  file.frame_height = in.number<int>();
  if (file.frame_width < 1 || file.frame_height < 1) {
    in.fail("frame size must be positive");
  }

  const std::size_t count = static_cast<std::size_t>(cfg.n_polytopes) *
                            static_cast<std::size_t>(cfg.m_halfspaces) *
                            kParamsPerHalfspace;
  std::vector<double> params(count);
  for (auto& v : params) {
    v = in.number<double>();
  }
  if (!in.at_end()) {
    in.fail("trailing data after parameters");
  }
  try {
    file.model = DnsmModel::unflatten(cfg, params);
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }
  return file;
}

void write_model(const ModelFile& file, const std::filesystem::path& path) {
  write_file_atomic(path, format_model(file));
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return parse_model(text);
}

}  // namespace dnsm
