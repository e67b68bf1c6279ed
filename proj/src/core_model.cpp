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

#include "dnsm/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dnsm/error.hpp"

namespace dnsm {

void ModelConfig::validate() const {
  if (n_polytopes < 1) {
    throw InvalidArgument("n_polytopes must be >= 1");
  }
  if (m_halfspaces < 3) {
    throw InvalidArgument("m_halfspaces must be >= 3 to bound a 2D region");
  }
  if (dimension != kDim) {
    throw InvalidArgument("only dimension 2 is supported");
  }
  if (!(slope > 0.0) || !std::isfinite(slope)) {
    throw InvalidArgument("slope must be positive and finite");
  }
}

DnsmModel::DnsmModel(ModelConfig config, std::vector<Polytope> polytopes)
    : config_(config), polytopes_(std::move(polytopes)) {
  config_.validate();
  if (polytopes_.size() != static_cast<std::size_t>(config_.n_polytopes)) {
    throw InvalidArgument("expected " + std::to_string(config_.n_polytopes) +
                          " polytopes, got " +
                          std::to_string(polytopes_.size()));
  }
  for (const auto& p : polytopes_) {
    if (p.discriminants.size() !=
        static_cast<std::size_t>(config_.m_halfspaces)) {
      throw InvalidArgument("polytope has " +
                            std::to_string(p.discriminants.size()) +
                            " half-spaces, expected " +
                            std::to_string(config_.m_halfspaces));
    }
    for (const auto& d : p.discriminants) {
      if (!std::isfinite(d.weights[0]) || !std::isfinite(d.weights[1]) ||
          !std::isfinite(d.bias)) {
        throw InvalidArgument("discriminant parameters must be finite");
      }
    }
  }
}

std::size_t DnsmModel::parameter_count() const {
  return polytopes_.size() * static_cast<std::size_t>(config_.m_halfspaces) *
         kParamsPerHalfspace;
}

std::vector<double> DnsmModel::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& p : polytopes_) {
    for (const auto& d : p.discriminants) {
      out.push_back(d.weights[0]);
      out.push_back(d.weights[1]);
      out.push_back(d.bias);
    }
  }
  return out;
}

DnsmModel DnsmModel::unflatten(const ModelConfig& config,
                               std::span<const double> params) {
  const auto n = static_cast<std::size_t>(config.n_polytopes);
  const auto m = static_cast<std::size_t>(config.m_halfspaces);
  if (params.size() != n * m * kParamsPerHalfspace) {
    throw InvalidArgument("parameter vector has wrong length");
  }
  std::vector<Polytope> polytopes(n);
  std::size_t k = 0;
  for (auto& p : polytopes) {
    p.discriminants.resize(m);
    for (auto& d : p.discriminants) {
      d.weights = {params[k], params[k + 1]};
      d.bias = params[k + 2];
      k += kParamsPerHalfspace;
    }
  }
  return DnsmModel(config, std::move(polytopes));
}

DnsmModel DnsmModel::subset(std::span<const std::size_t> indices) const {
  std::vector<Polytope> kept;
  kept.reserve(indices.size());
  for (auto i : indices) {
    if (i >= polytopes_.size()) {
      throw InvalidArgument("polytope index out of range");
    }
    kept.push_back(polytopes_[i]);
  }
  ModelConfig cfg = config_;
  cfg.n_polytopes = static_cast<int>(kept.size());
  return DnsmModel(cfg, std::move(kept));
}

double eval_halfspace(const Discriminant& d, Point2 x) {
  return sigmoid(d.affine(x));
}

double eval_polytope(const Polytope& p, Point2 x) {
  double g = 1.0;
  for (const auto& d : p.discriminants) {
    g *= eval_halfspace(d, x);
  }
  return g;
}

double eval_model(const DnsmModel& m, Point2 x) {
  double outside = 1.0;
  for (const auto& p : m.polytopes()) {
    outside *= 1.0 - eval_polytope(p, x);
  }
  return 1.0 - outside;
}

DnsmModel with_slope(const DnsmModel& m, double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope)) {
    throw InvalidArgument("slope must be positive and finite");
  }
  std::vector<Polytope> out = m.polytopes();
  for (auto& p : out) {
    for (auto& d : p.discriminants) {
      const double norm = std::hypot(d.weights[0], d.weights[1]);
      if (norm == 0.0) {
        continue;
      }
      const double k = slope / norm;
      d.weights = {d.weights[0] * k, d.weights[1] * k};
      d.bias *= k;
    }
  }
  ModelConfig cfg = m.config();
  cfg.slope = slope;
  return DnsmModel(cfg, std::move(out));
}

Polytope make_disc_polytope(Point2 center, double radius, int m_halfspaces,
                            double slope) {
  if (!(radius > 0.0)) {
    throw InvalidArgument("disc radius must be positive");
  }
  Polytope p;
  p.discriminants.reserve(static_cast<std::size_t>(m_halfspaces));
  for (int j = 0; j < m_halfspaces; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / m_halfspaces;
    const double nx = std::cos(angle);
    const double ny = std::sin(angle);
    // slope * (n . (x - c) + r) >= 0 inside; the face sits at c - r n.
    Discriminant d;
    d.weights = {slope * nx, slope * ny};
    d.bias = slope * (radius - nx * center.x - ny * center.y);
    p.discriminants.push_back(d);
  }
  return p;
}

namespace {

// Grid coordinates symmetric about `center` with `count` points.
std::vector<double> axis_positions(double center, double extent,
                                   double spacing) {
  const auto count = std::max<long>(
      1, static_cast<long>(std::floor(extent / spacing + 1e-9)));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  const double first = center - 0.5 * static_cast<double>(count - 1) * spacing;
  for (long k = 0; k < count; ++k) {
    out.push_back(first + static_cast<double>(k) * spacing);
  }
  return out;
}

}  // namespace

DnsmModel init_polytopes(const ShapeRaster& shape, double radius,
                         double spacing, const ModelConfig& cfg) {
  cfg.validate();
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("radius must be positive");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("spacing must be positive");
  }

  int min_row = shape.height(), max_row = -1;
  int min_col = shape.width(), max_col = -1;
  for (int r = 0; r < shape.height(); ++r) {
    for (int c = 0; c < shape.width(); ++c) {
      if (shape.at(r, c)) {
        min_row = std::min(min_row, r);
        max_row = std::max(max_row, r);
        min_col = std::min(min_col, c);
        max_col = std::max(max_col, c);
      }
    }
  }

  const double s = shape.frame().scale();
  // Pixel-extent bounding box in the normalized frame.
  const double x0 = min_col * s, x1 = (max_col + 1) * s;
  const double y0 = min_row * s, y1 = (max_row + 1) * s;
  const auto xs = axis_positions(0.5 * (x0 + x1), x1 - x0, spacing);
  const auto ys = axis_positions(0.5 * (y0 + y1), y1 - y0, spacing);

  std::vector<Polytope> polytopes;
  for (double y : ys) {
    for (double x : xs) {
      const auto col = static_cast<long>(std::floor(x / s));
      const auto row = static_cast<long>(std::floor(y / s));
      if (col < 0 || row < 0 || col >= shape.width() ||
          row >= shape.height()) {
        continue;
      }
      if (!shape.at(static_cast<int>(row), static_cast<int>(col))) {
        continue;
      }
      polytopes.push_back(
          make_disc_polytope({x, y}, radius, cfg.m_halfspaces, cfg.slope));
    }
  }
  if (polytopes.empty()) {
    throw Error("no initialization grid center lands on the foreground; "
                "reduce spacing");
  }
  ModelConfig out = cfg;
  out.n_polytopes = static_cast<int>(polytopes.size());
  return DnsmModel(out, std::move(polytopes));
}

}  // namespace dnsm
