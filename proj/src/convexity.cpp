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

#include "dnsm/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dnsm/error.hpp"

namespace dnsm {

void PruneParams::validate() const {
  if (const auto* top = std::get_if<KeepTopK>(&mode)) {
    if (top->k < 1) {
      throw InvalidArgument("keep-k must be >= 1");
    }
  } else if (!(std::get<Threshold>(mode).c_min > 0.0)) {
    throw InvalidArgument("significance threshold must be positive");
  }
  if (!(t_exponent > 0.0) || !std::isfinite(t_exponent)) {
    throw InvalidArgument("significance exponent must be positive");
  }
}

Membership::Membership(const DnsmModel& m, const ShapeRaster& shape)
    : polytopes_(m.size()),
      pixels_(shape.pixel_count()),
      bits_(polytopes_ * pixels_, 0) {
  for (std::size_t px = 0; px < pixels_; ++px) {
    if (!shape.at(px)) {
      continue;
    }
    const Point2 x = shape.center_of(px);
    for (std::size_t i = 0; i < polytopes_; ++i) {
      if (eval_polytope(m[i], x) >= 0.5) {
        bits_[i * pixels_ + px] = 1;
      }
    }
  }
}

std::vector<RegionStats> Membership::stats(std::span<const char> alive) const {
  auto is_alive = [&](std::size_t i) { return alive.empty() || alive[i]; };
  std::vector<std::uint32_t> cover(pixels_, 0);
  std::vector<RegionStats> out(polytopes_);
  for (std::size_t i = 0; i < polytopes_; ++i) {
    if (!is_alive(i)) {
      continue;
    }
    const auto* row = bits_.data() + i * pixels_;
    for (std::size_t px = 0; px < pixels_; ++px) {
      cover[px] += row[px];
    }
  }
  for (std::size_t i = 0; i < polytopes_; ++i) {
    if (!is_alive(i)) {
      continue;
    }
    const auto* row = bits_.data() + i * pixels_;
    for (std::size_t px = 0; px < pixels_; ++px) {
      if (row[px]) {
        ++out[i].region_size;
        if (cover[px] == 1) {
          ++out[i].unique_size;
        }
      }
    }
  }
  return out;
}

std::vector<RegionStats> compute_regions(const DnsmModel& m,
                                         const ShapeRaster& shape) {
  return Membership(m, shape).stats();
}

std::vector<RegionStats> significance(std::vector<RegionStats> stats,
                                      double t) {
  std::size_t largest = 0;
  for (const auto& s : stats) {
    largest = std::max(largest, s.region_size);
  }
  if (largest == 0) {
    throw Error("model covers no foreground pixel");
  }
  for (auto& s : stats) {
    if (s.region_size == 0) {
      s.significance = 0.0;
      continue;
    }
    const double r = static_cast<double>(s.region_size);
    s.significance = static_cast<double>(s.unique_size) / r *
                     std::pow(r / static_cast<double>(largest), t);
  }
  return stats;
}

PruneOutcome prune(const DnsmModel& m, const ShapeRaster& shape,
                   const PruneParams& p) {
  p.validate();
  const std::size_t n = m.size();
  const auto* top = std::get_if<KeepTopK>(&p.mode);
  if (top != nullptr && top->k > n) {
    throw InvalidArgument("keep-k " + std::to_string(top->k) +
                          " exceeds the " + std::to_string(n) +
                          " available polytopes");
  }

  const Membership membership(m, shape);
  std::vector<char> alive(n, 1);
  std::size_t alive_count = n;
  PruneOutcome out;

  for (;;) {
    auto stats = significance(membership.stats(alive), p.t_exponent);

    std::size_t weakest = n;
    double weakest_c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i] && stats[i].significance < weakest_c) {
        weakest = i;
        weakest_c = stats[i].significance;
      }
    }

    const bool done =
        top != nullptr ? alive_count == top->k
                       : (alive_count == 1 ||
                          weakest_c >= std::get<Threshold>(p.mode).c_min);
    if (done) {
      for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) {
          out.survivors.push_back(i);
          out.stats.push_back(stats[i]);
        }
      }
      break;
    }
    alive[weakest] = 0;
    --alive_count;
    out.removed.push_back(weakest);
  }
  out.model = m.subset(out.survivors);
  return out;
}

double global_concavity(std::span<const RegionStats> stats) {
  if (stats.empty()) {
    return 0.0;
  }
  std::size_t largest = 0;
  for (std::size_t i = 1; i < stats.size(); ++i) {
    if (stats[i].region_size > stats[largest].region_size) {
      largest = i;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (i != largest) {
      total += stats[i].significance;
    }
  }
  return total;
}

namespace {

long cross(IPoint o, IPoint a, IPoint b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<IPoint> convex_hull(std::vector<IPoint> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 2) {
    return points;
  }
  std::vector<IPoint> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& pt : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pt) <= 0) --k;
    hull[k++] = pt;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  // All-collinear input collapses to the two extremes.
  if (hull.size() == 2 || (hull.size() > 2 && polygon_area(hull) == 0.0)) {
    return {points.front(), points.back()};
  }
  return hull;
}

double polygon_area(std::span<const IPoint> hull) {
  if (hull.size() < 3) {
    return 0.0;
  }
  long twice = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * static_cast<double>(std::abs(twice));
}

double polygon_perimeter(std::span<const IPoint> hull) {
  if (hull.size() < 2) {
    return 0.0;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    total += std::hypot(static_cast<double>(b.x - a.x),
                        static_cast<double>(b.y - a.y));
  }
  return total;
}

BaselineConcavity baseline_concavities(const ShapeRaster& shape) {
  const int w = shape.width();
  const int h = shape.height();
  auto fg = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < h && c < w && shape.at(r, c);
  };

  std::vector<IPoint> corners;
  std::size_t crack = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!shape.at(r, c)) {
        continue;
      }
      const int open = !fg(r - 1, c) + !fg(r + 1, c) + !fg(r, c - 1) +
                       !fg(r, c + 1);
      if (open == 0) {
        continue;
      }
      crack += static_cast<std::size_t>(open);
      corners.push_back({c, r});
      corners.push_back({c + 1, r});
      corners.push_back({c, r + 1});
      corners.push_back({c + 1, r + 1});
    }
  }

  const auto hull = convex_hull(std::move(corners));
  const double hull_area = polygon_area(hull);
  const double hull_perimeter = polygon_perimeter(hull);
  const double area = static_cast<double>(shape.foreground_count());

  BaselineConcavity out;
  out.rb = std::max(0.0, 1.0 - area / hull_area);
  out.pb = std::max(0.0, 1.0 - hull_perimeter / static_cast<double>(crack));
  return out;
}

ConvexityReport make_convexity_report(const ShapeRaster& shape,
                                      std::vector<RegionStats> stats) {
  ConvexityReport report;
  const auto base = baseline_concavities(shape);
  report.pb_concavity = base.pb;
  report.rb_concavity = base.rb;
  report.dnsm_concavity = global_concavity(stats);
  report.per_polytope = std::move(stats);
  return report;
}

}  // namespace dnsm
