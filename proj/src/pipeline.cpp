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

#include "dnsm/pipeline.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <variant>

#include "dnsm/error.hpp"

namespace dnsm {

void PipelineParams::validate() const {
  if (step1.overlap_sign != OverlapSign::Maximize) {
    throw InvalidArgument("step 1 must maximize overlap");
  }
  if (step3.overlap_sign != OverlapSign::Penalize) {
    throw InvalidArgument("step 3 must penalize overlap");
  }
  step1.validate();
  step3.validate();
  prune.validate();
  ModelConfig cfg{.m_halfspaces = init.m_halfspaces, .slope = init.slope};
  cfg.validate();
  if (!(init.radius > 0.0) || !(init.spacing > 0.0)) {
    throw InvalidArgument("init radius and spacing must be positive");
  }
}

double pair_normalized_eta(double eta, std::size_t n) {
  if (n < 2) {
    return eta;
  }
  const auto pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return eta / pairs;
}

int LabelMap::part_count() const {
  int top = 0;
  for (int v : labels) {
    top = std::max(top, v);
  }
  return top;
}

bool PartGraph::adjacent(int a, int b) const {
  if (a < 0 || static_cast<std::size_t>(a) >= neighbors.size()) {
    return false;
  }
  const auto& n = neighbors[static_cast<std::size_t>(a)];
  return std::binary_search(n.begin(), n.end(), b);
}

std::size_t PartGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : neighbors) {
    twice += n.size();
  }
  return twice / 2;
}

LabelMap label_map(const DnsmModel& m, const ShapeRaster& shape) {
  LabelMap out{shape.width(), shape.height(),
               std::vector<int>(shape.pixel_count(), 0)};
  for (std::size_t px = 0; px < shape.pixel_count(); ++px) {
    const Point2 x = shape.center_of(px);
    double outside = 1.0;
    double best = -1.0;
    int best_label = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double g = eval_polytope(m[i], x);
      outside *= 1.0 - g;
      if (g > best) {
        best = g;
        best_label = static_cast<int>(i) + 1;
      }
    }
    if (1.0 - outside >= 0.5) {
      out.labels[px] = best_label;
    }
  }
  return out;
}

PartGraph part_graph(const LabelMap& labels) {
  std::vector<std::set<int>> sets(
      static_cast<std::size_t>(labels.part_count()) + 1);
  auto link = [&](int a, int b) {
    if (a == 0 || b == 0 || a == b) {
      return;
    }
    sets[static_cast<std::size_t>(a)].insert(b);
    sets[static_cast<std::size_t>(b)].insert(a);
  };
  for (int r = 0; r < labels.height; ++r) {
    for (int c = 0; c < labels.width; ++c) {
      const int here = labels.at(r, c);
      if (c + 1 < labels.width) link(here, labels.at(r, c + 1));
      if (r + 1 < labels.height) link(here, labels.at(r + 1, c));
    }
  }
  PartGraph graph;
  graph.neighbors.reserve(sets.size());
  for (const auto& s : sets) {
    graph.neighbors.emplace_back(s.begin(), s.end());
  }
  return graph;
}

Diagnostics diagnose(const DnsmModel& m, const ShapeRaster& shape) {
  Diagnostics d;
  std::size_t model_fg = 0;
  std::size_t both = 0;
  for (std::size_t px = 0; px < shape.pixel_count(); ++px) {
    const Point2 x = shape.center_of(px);
    double outside = 1.0;
    int members = 0;
    for (const auto& p : m.polytopes()) {
      const double g = eval_polytope(p, x);
      outside *= 1.0 - g;
      members += g >= 0.5;
    }
    const bool in_model = 1.0 - outside >= 0.5;
    const bool in_shape = shape.at(px);
    model_fg += in_model;
    both += in_model && in_shape;
    d.gap_pixel_count += in_shape && !in_model;
    d.overlap_pixel_count += members >= 2;
  }
  d.dice_vs_input = 2.0 * static_cast<double>(both) /
                    static_cast<double>(model_fg + shape.foreground_count());
  return d;
}

ConvexityReport measure_convexity(const DnsmModel& m, const ShapeRaster& shape,
                                  double t) {
  return make_convexity_report(shape,
                               significance(compute_regions(m, shape), t));
}

ConvexityAnalysis analyze_convexity(const ShapeRaster& shape,
                                    const PipelineParams& p) {
  p.validate();
  const ModelConfig cfg{.n_polytopes = 1,
                        .m_halfspaces = p.init.m_halfspaces,
                        .slope = p.init.slope};
  const DnsmModel initial =
      init_polytopes(shape, p.init.radius, p.init.spacing, cfg);
  if (const auto* top = std::get_if<KeepTopK>(&p.prune.mode);
      top != nullptr && top->k > initial.size()) {
    throw InvalidArgument("keep-k " + std::to_string(top->k) +
                          " exceeds the " + std::to_string(initial.size()) +
                          " initial polytopes; reduce the spacing");
  }
  FitParams step1_params = p.step1;
  step1_params.eta = pair_normalized_eta(p.step1.eta, initial.size());
  auto step1 = fit(initial, shape, step1_params);
  auto pruning = prune(step1.model, shape, p.prune);
  auto report = make_convexity_report(shape, pruning.stats);
  return {std::move(step1.model), step1_params.eta, std::move(step1.trace),
          std::move(pruning), std::move(report)};
}

DecompositionResult decompose(const ShapeRaster& shape,
                              const PipelineParams& p) {
  auto analysis = analyze_convexity(shape, p);
  if (analysis.pruning.model.size() == 0) {
    throw Error("pruning left no polytopes");
  }

  DecompositionResult out;
  out.pruned_diagnostics = diagnose(analysis.pruning.model, shape);
  // Step 1 drives the sigmoids toward saturation; restoring the initial slope
  // gives the refit usable gradients without moving any hyperplane.
  auto step3 =
      fit(with_slope(analysis.pruning.model, p.init.slope), shape, p.step3);
  out.model = std::move(step3.model);
  out.step3_trace = std::move(step3.trace);
  out.labels = label_map(out.model, shape);
  out.connectivity = part_graph(out.labels);
  out.diagnostics = diagnose(out.model, shape);
  out.overlapping_model = std::move(analysis.overlapping_model);
  out.step1_eta = analysis.step1_eta;
  out.step1_trace = std::move(analysis.step1_trace);
  out.pruning = std::move(analysis.pruning);
  out.convexity = std::move(analysis.report);
  return out;
}

}  // namespace dnsm
