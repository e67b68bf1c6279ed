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

// JSON reports. Every document carries "schema_version"; numbers are
// always finite (Error is thrown otherwise).

#pragma once

#include <string>
#include <string_view>

#include "dnsm/convexity.hpp"
#include "dnsm/optimizer.hpp"
#include "dnsm/pipeline.hpp"
#include "dnsm/raster.hpp"

namespace dnsm {

inline constexpr int kReportSchemaVersion = 1;

// Which model the reported C_T and per-polytope stats are measured on.
enum class ConcavitySource { Overlapping, Final };

std::string_view to_string(ConcavitySource source);

std::string decomposition_report(const DecompositionResult& result,
                                 const ConvexityReport& convexity,
                                 ConcavitySource source,
                                 const PipelineParams& params,
                                 const ShapeRaster& shape);

std::string convexity_report(const ConvexityAnalysis& analysis,
                             const PipelineParams& params,
                             const ShapeRaster& shape);

// Single fit from the dense initialization, without pruning.
std::string fit_report(const DnsmModel& model, const FitTrace& trace,
                       const FitParams& params, const Diagnostics& diagnostics,
                       const ShapeRaster& shape);

// Stats, concavities and diagnostics of a stored model against a shape.
std::string model_report(const DnsmModel& model,
                         const ConvexityReport& convexity,
                         const Diagnostics& diagnostics,
                         const ShapeRaster& shape);

}  // namespace dnsm
