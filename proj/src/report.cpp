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

#include "dnsm/report.hpp"

#include <cmath>
#include <json.hpp>
#include <variant>

#include "dnsm/error.hpp"

namespace dnsm {

namespace {

using nlohmann::json;

json finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(std::string("non-finite value in report: ") + what);
  }
  return v;
}

json shape_json(const ShapeRaster& shape) {
  return {{"width", shape.width()},
          {"height", shape.height()},
          {"foreground_pixels", shape.foreground_count()}};
}

json fit_params_json(const FitParams& p) {
  return {{"eta", finite(p.eta, "eta")},
          {"overlap", to_string(p.overlap_sign)},
          {"solver", to_string(p.solver)},
          {"step_size", finite(p.step_size, "step_size")},
          {"max_iters", p.max_iters},
          {"rel_tol", finite(p.rel_tol, "rel_tol")}};
}

json prune_params_json(const PruneParams& p) {
  json out{{"t", finite(p.t_exponent, "t")}};
  if (const auto* k = std::get_if<KeepTopK>(&p.mode)) {
    out["mode"] = "keep_top_k";
    out["k"] = k->k;
  } else {
    out["mode"] = "threshold";
    out["c_min"] = finite(std::get<Threshold>(p.mode).c_min, "c_min");
  }
  return out;
}

json params_json(const PipelineParams& p, double step1_eta) {
  json step1 = fit_params_json(p.step1);
  step1["eta_effective"] = finite(step1_eta, "eta_effective");
  return {{"init",
           {{"radius", finite(p.init.radius, "radius")},
            {"spacing", finite(p.init.spacing, "spacing")},
            {"halfspaces", p.init.m_halfspaces},
            {"slope", finite(p.init.slope, "slope")}}},
          {"step1", std::move(step1)},
          {"prune", prune_params_json(p.prune)},
          {"step3", fit_params_json(p.step3)}};
}

json trace_json(const FitTrace& t) {
  json total = json::array(), data = json::array(), overlap = json::array();
  for (const auto& r : t.records) {
    total.push_back(finite(r.total, "energy"));
    data.push_back(finite(r.data_term, "data term"));
    overlap.push_back(finite(r.overlap_term, "overlap term"));
  }
  return {{"iterations", t.iterations_run},
          {"converged", t.converged},
          {"final_step", finite(t.final_step, "final_step")},
          {"energy", std::move(total)},
          {"data_term", std::move(data)},
          {"overlap_term", std::move(overlap)}};
}

json diagnostics_json(const Diagnostics& d) {
  return {{"gap_pixels", d.gap_pixel_count},
          {"overlap_pixels", d.overlap_pixel_count},
          {"dice_vs_input", finite(d.dice_vs_input, "dice")}};
}

json global_json(const ConvexityReport& c) {
  return {{"dnsm_concavity", finite(c.dnsm_concavity, "dnsm_concavity")},
          {"pb_concavity", finite(c.pb_concavity, "pb_concavity")},
          {"rb_concavity", finite(c.rb_concavity, "rb_concavity")}};
}

// `index` is 1-based, matching label values; `source` maps back to the
// dense initialization when known.
json polytopes_json(const ConvexityReport& c,
                    const std::vector<std::size_t>* source) {
  json out = json::array();
  for (std::size_t i = 0; i < c.per_polytope.size(); ++i) {
    const auto& s = c.per_polytope[i];
    json entry{{"index", i + 1},
               {"region_size", s.region_size},
               {"unique_size", s.unique_size},
               {"significance", finite(s.significance, "significance")}};
    if (source != nullptr && i < source->size()) {
      entry["initial_index"] = (*source)[i];
    }
    out.push_back(std::move(entry));
  }
  return out;
}

json edges_json(const PartGraph& g) {
  json out = json::array();
  for (std::size_t a = 0; a < g.neighbors.size(); ++a) {
    for (int b : g.neighbors[a]) {
      if (static_cast<std::size_t>(b) > a) {
        out.push_back({a, b});
      }
    }
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string_view to_string(ConcavitySource source) {
  return source == ConcavitySource::Overlapping ? "overlapping" : "final";
}

std::string decomposition_report(const DecompositionResult& result,
                                 const ConvexityReport& convexity,
                                 ConcavitySource source,
                                 const PipelineParams& params,
                                 const ShapeRaster& shape) {
  json doc{
      {"schema_version", kReportSchemaVersion},
      {"command", "decompose"},
      {"input", shape_json(shape)},
      {"parameters", params_json(params, result.step1_eta)},
      {"global", global_json(convexity)},
      {"concavity_model", to_string(source)},
      {"polytopes", polytopes_json(convexity, &result.pruning.survivors)},
      {"pruning",
       {{"initial_polytopes", result.overlapping_model.size()},
        {"removed", result.pruning.removed},
        {"survivors", result.pruning.survivors}}},
      {"diagnostics",
       {{"after_pruning", diagnostics_json(result.pruned_diagnostics)},
        {"final", diagnostics_json(result.diagnostics)}}},
      {"parts", result.labels.part_count()},
      {"connectivity", edges_json(result.connectivity)},
      {"traces",
       {{"step1", trace_json(result.step1_trace)},
        {"step3", trace_json(result.step3_trace)}}}};
  return dump(doc);
}

std::string convexity_report(const ConvexityAnalysis& analysis,
                             const PipelineParams& params,
                             const ShapeRaster& shape) {
  json doc{
      {"schema_version", kReportSchemaVersion},
      {"command", "convexity"},
      {"input", shape_json(shape)},
      {"parameters", params_json(params, analysis.step1_eta)},
      {"global", global_json(analysis.report)},
      {"concavity_model", to_string(ConcavitySource::Overlapping)},
      {"polytopes",
       polytopes_json(analysis.report, &analysis.pruning.survivors)},
      {"pruning",
       {{"initial_polytopes", analysis.overlapping_model.size()},
        {"removed", analysis.pruning.removed},
        {"survivors", analysis.pruning.survivors}}},
      {"traces", {{"step1", trace_json(analysis.step1_trace)}}}};
  return dump(doc);
}

std::string fit_report(const DnsmModel& model, const FitTrace& trace,
                       const FitParams& params, const Diagnostics& diagnostics,
                       const ShapeRaster& shape) {
  json doc{{"schema_version", kReportSchemaVersion},
           {"command", "fit-only"},
           {"input", shape_json(shape)},
           {"parameters", fit_params_json(params)},
           {"polytope_count", model.size()},
           {"diagnostics", diagnostics_json(diagnostics)},
           {"traces", {{"fit", trace_json(trace)}}}};
  return dump(doc);
}

std::string model_report(const DnsmModel& model,
                         const ConvexityReport& convexity,
                         const Diagnostics& diagnostics,
                         const ShapeRaster& shape) {
  json doc{{"schema_version", kReportSchemaVersion},
           {"command", "report"},
           {"input", shape_json(shape)},
           {"polytope_count", model.size()},
           {"parameter_count", model.parameter_count()},
           {"global", global_json(convexity)},
           {"polytopes", polytopes_json(convexity, nullptr)},
           {"diagnostics", diagnostics_json(diagnostics)}};
  return dump(doc);
}

}  // namespace dnsm
