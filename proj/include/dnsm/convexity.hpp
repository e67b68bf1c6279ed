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

// Region statistics, polytope significance and shape concavity measures.
//
// A pixel belongs to polytope i when g_i(x) >= 0.5 and I(x) = 1. With R(i)
// the member count and U(i) the count of pixels covered by i alone,
//
//   C(i) = (U(i) / R(i)) * (R(i) / R_max)^t
//
// is the significance (local convexity) of polytope i, and the global
// concavity C_T sums C over every polytope except the largest one.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dnsm/core_model.hpp"
#include "dnsm/raster.hpp"

namespace dnsm {

inline constexpr double kDefaultSignificanceExponent = 0.25;

struct RegionStats {
  std::size_t region_size = 0;
  std::size_t unique_size = 0;
  double significance = 0.0;

  bool operator==(const RegionStats&) const = default;
};

struct KeepTopK {
  std::size_t k = 1;
};
struct Threshold {
  double c_min = 0.1;
};

struct PruneParams {
  std::variant<KeepTopK, Threshold> mode = Threshold{};
  double t_exponent = kDefaultSignificanceExponent;

  void validate() const;
};

// Hardened membership of every foreground pixel in every polytope.
class Membership {
 public:
  Membership(const DnsmModel& m, const ShapeRaster& shape);

  std::size_t polytope_count() const { return polytopes_; }
  std::size_t pixel_count() const { return pixels_; }
  bool contains(std::size_t polytope, std::size_t pixel) const {
    return bits_[polytope * pixels_ + pixel] != 0;
  }

  // Stats over the polytopes flagged in `alive` (all when empty); entries
  // for dead polytopes are zero.
  std::vector<RegionStats> stats(std::span<const char> alive = {}) const;

 private:
  std::size_t polytopes_ = 0;
  std::size_t pixels_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Significance is left at zero.
std::vector<RegionStats> compute_regions(const DnsmModel& m,
                                         const ShapeRaster& shape);

// Throws Error when every region is empty.
std::vector<RegionStats> significance(std::vector<RegionStats> stats,
                                      double t);

struct PruneOutcome {
  DnsmModel model;                     // survivors, in original order
  std::vector<std::size_t> survivors;  // original indices of survivors
  std::vector<std::size_t> removed;    // original indices, removal order
  std::vector<RegionStats> stats;      // final stats of the survivors
};

// Greedy removal of the least significant polytope, one per round, with
// regions recomputed over the survivors after each removal. Ties go to the
// lower index. Throws InvalidArgument when k exceeds the polytope count.
PruneOutcome prune(const DnsmModel& m, const ShapeRaster& shape,
                   const PruneParams& p);

// Sum of significances excluding the largest region (lowest index on ties).
double global_concavity(std::span<const RegionStats> stats);

struct IPoint {
  long x = 0;
  long y = 0;

  auto operator<=>(const IPoint&) const = default;
};

// Counterclockwise hull (monotone chain) without collinear vertices.
// A single distinct point yields one vertex; collinear input yields the
// two extremes.
std::vector<IPoint> convex_hull(std::vector<IPoint> points);

double polygon_area(std::span<const IPoint> hull);
double polygon_perimeter(std::span<const IPoint> hull);

struct BaselineConcavity {
  double pb = 0.0;
  double rb = 0.0;
};

// rb = 1 - area / hull area, pb = 1 - hull perimeter / crack perimeter.
// Area is the foreground pixel count; the hull is taken over the corners of
// boundary pixels and the shape perimeter counts pixel edges between
// foreground and background. Both values are clamped to [0, 1).
BaselineConcavity baseline_concavities(const ShapeRaster& shape);

struct ConvexityReport {
  double dnsm_concavity = 0.0;
  double pb_concavity = 0.0;
  double rb_concavity = 0.0;
  std::vector<RegionStats> per_polytope;
};

ConvexityReport make_convexity_report(const ShapeRaster& shape,
                                      std::vector<RegionStats> stats);

}  // namespace dnsm
