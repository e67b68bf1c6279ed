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

// Disjunctive normal shape model: a union of N convex polytopes, each the
// intersection of M smoothed half-spaces.
//
//   sigma_ij(x) = 1 / (1 + exp(-(w_ij . x + b_ij)))
//   g_i(x)      = prod_j sigma_ij(x)
//   f(x)        = 1 - prod_i (1 - g_i(x))
//
// sigma_ij >= 0.5 exactly when w_ij . x + b_ij >= 0, so each hardened
// half-space agrees with its indicator. The region f >= 0.5 is the shape.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dnsm/raster.hpp"

namespace dnsm {

inline constexpr int kDim = 2;

// Default sigmoid sharpness at initialization, in 1/(normalized unit).
inline constexpr double kDefaultSlope = 60.0;
inline constexpr int kDefaultHalfspaces = 16;

struct ModelConfig {
  int n_polytopes = 1;
  int m_halfspaces = kDefaultHalfspaces;
  int dimension = kDim;
  double slope = kDefaultSlope;

  // Throws InvalidArgument unless N >= 1, M >= 3, D == 2, slope > 0.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

struct Discriminant {
  std::array<double, kDim> weights{};
  double bias = 0.0;

  double affine(Point2 x) const {
    return weights[0] * x.x + weights[1] * x.y + bias;
  }

  bool operator==(const Discriminant&) const = default;
};

struct Polytope {
  std::vector<Discriminant> discriminants;

  bool operator==(const Polytope&) const = default;
};

class DnsmModel {
 public:
  DnsmModel() = default;
  // Throws InvalidArgument if the polytope list does not match the config
  // or a parameter is non-finite.
  DnsmModel(ModelConfig config, std::vector<Polytope> polytopes);

  const ModelConfig& config() const { return config_; }
  const std::vector<Polytope>& polytopes() const { return polytopes_; }
  std::size_t size() const { return polytopes_.size(); }
  const Polytope& operator[](std::size_t i) const { return polytopes_[i]; }

  // Number of free parameters: N * M * (D + 1).
  std::size_t parameter_count() const;

  // Parameters flattened as [polytope][halfspace][w_0, w_1, bias].
  std::vector<double> flatten() const;
  static DnsmModel unflatten(const ModelConfig& config,
                             std::span<const double> params);

  // Keeps only the listed polytopes, in the given order.
  DnsmModel subset(std::span<const std::size_t> indices) const;

  bool operator==(const DnsmModel&) const = default;

 private:
  ModelConfig config_;
  std::vector<Polytope> polytopes_;
};

inline constexpr std::size_t kParamsPerHalfspace = kDim + 1;

// Logistic sigmoid and its complement, both without cancellation.
struct SigmoidPair {
  double value;
  double complement;
};

inline SigmoidPair sigmoid_pair(double z) {
  const double e = std::exp(-std::abs(z));
  const double inv = 1.0 / (1.0 + e);
  const double small = e * inv;
  return z >= 0.0 ? SigmoidPair{inv, small} : SigmoidPair{small, inv};
}

inline double sigmoid(double z) { return sigmoid_pair(z).value; }

double eval_halfspace(const Discriminant& d, Point2 x);
double eval_polytope(const Polytope& p, Point2 x);
double eval_model(const DnsmModel& m, Point2 x);

// Rescales every discriminant so that |w| = slope. Hyperplanes are kept; only
// the sigmoid sharpness changes. Degenerate discriminants (w = 0) are left
// unchanged.
DnsmModel with_slope(const DnsmModel& m, double slope);

// Disc approximation as a regular M-gon of the given apothem. Half-space j
// has inward unit normal at angle 2*pi*j/M; weights are scaled by slope.
Polytope make_disc_polytope(Point2 center, double radius, int m_halfspaces,
                            double slope);

// Regular grid of disc polytopes over the foreground. The grid is centered
// on the foreground bounding box, with floor(extent / spacing) (at least 1)
// centers per axis; only centers landing on foreground pixels are kept.
// The resulting polytope count replaces cfg.n_polytopes.
DnsmModel init_polytopes(const ShapeRaster& shape, double radius,
                         double spacing, const ModelConfig& cfg);

}  // namespace dnsm
