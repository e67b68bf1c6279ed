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

// Three-step approximate convex decomposition:
//   1. dense disc polytopes fitted with overlap maximized,
//   2. greedy pruning by significance,
//   3. refit of the survivors with overlap penalized,
// followed by label assignment and the part adjacency graph.

#pragma once

#include <cstddef>
#include <vector>

#include "dnsm/convexity.hpp"
#include "dnsm/core_model.hpp"
#include "dnsm/optimizer.hpp"
#include "dnsm/raster.hpp"

namespace dnsm {

inline constexpr double kDefaultInitRadius = 0.08;
inline constexpr double kDefaultInitSpacing = 0.08;

struct InitParams {
  double radius = kDefaultInitRadius;
  double spacing = kDefaultInitSpacing;
  int m_halfspaces = kDefaultHalfspaces;
  double slope = kDefaultSlope;
};

// step1.eta is given per polytope pair: the fit uses
// pair_normalized_eta(step1.eta, N). With eta < 1 a pixel covered by every
// polytope still costs more outside the shape than it earns, so the dense
// initial set cannot profit from spilling together. step3.eta is used as is.
struct PipelineParams {
  InitParams init;
  FitParams step1{.eta = kDefaultEtaMaximize,
                  .overlap_sign = OverlapSign::Maximize};
  PruneParams prune;
  FitParams step3{.eta = kDefaultEtaPenalize,
                  .overlap_sign = OverlapSign::Penalize};

  void validate() const;
};

// eta / (n (n - 1) / 2), or eta itself when n < 2.
double pair_normalized_eta(double eta, std::size_t n);

// Per-pixel part labels: 0 is background, i >= 1 is polytope i - 1.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  int at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * width + col];
  }
  int part_count() const;

  bool operator==(const LabelMap&) const = default;
};

// Undirected adjacency over part labels; neighbors[label] is sorted and
// neighbors[0] stays empty.
struct PartGraph {
  std::vector<std::vector<int>> neighbors;

  bool adjacent(int a, int b) const;
  std::size_t edge_count() const;
};

struct Diagnostics {
  std::size_t gap_pixel_count = 0;      // I = 1 but f < 0.5
  std::size_t overlap_pixel_count = 0;  // at least two g_i >= 0.5
  double dice_vs_input = 0.0;           // model foreground f >= 0.5 vs I
};

struct DecompositionResult {
  DnsmModel model;
  LabelMap labels;
  PartGraph connectivity;
  Diagnostics diagnostics;

  // Intermediate state, kept for reports and invariant checks.
  DnsmModel overlapping_model;
  double step1_eta = 0.0;
  FitTrace step1_trace;
  PruneOutcome pruning;
  Diagnostics pruned_diagnostics;
  FitTrace step3_trace;
  ConvexityReport convexity;
};

// Label = 1 + argmax_i g_i (lowest index on ties) where f >= 0.5, else 0.
LabelMap label_map(const DnsmModel& m, const ShapeRaster& shape);

// Parts are adjacent when two 4-neighboring pixels carry their labels.
PartGraph part_graph(const LabelMap& labels);

Diagnostics diagnose(const DnsmModel& m, const ShapeRaster& shape);

// Region stats, significance (exponent t) and concavities of any model.
ConvexityReport measure_convexity(const DnsmModel& m, const ShapeRaster& shape,
                                  double t);

// Steps 1 and 2 only; the convexity report is computed on the pruned
// overlapping model.
struct ConvexityAnalysis {
  DnsmModel overlapping_model;
  double step1_eta = 0.0;  // effective, after pair normalization
  FitTrace step1_trace;
  PruneOutcome pruning;
  ConvexityReport report;
};
ConvexityAnalysis analyze_convexity(const ShapeRaster& shape,
                                    const PipelineParams& p);

DecompositionResult decompose(const ShapeRaster& shape,
                              const PipelineParams& p);

}  // namespace dnsm
