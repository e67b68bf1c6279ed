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

// Fitting energies for the shape model and the descent loops.
//
//   E = A * sum_x (f(x) - I(x))^2  +  s * eta * A * sum_x sum_{i<r} g_i g_r
//
// A is the pixel area in the normalized frame and s = -1 (Maximize, used to
// expose redundant polytopes) or +1 (Penalize, used for the final fit).

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dnsm/core_model.hpp"
#include "dnsm/raster.hpp"

namespace dnsm {

enum class OverlapSign { Maximize, Penalize };

std::string_view to_string(OverlapSign sign);

// Lbfgs: limited-memory quasi-Newton with backtracking. GradientDescent:
// plain steps of size step_size.
enum class Solver { Lbfgs, GradientDescent };

std::string_view to_string(Solver solver);

inline constexpr double kDefaultEtaMaximize = 0.2;
inline constexpr double kDefaultEtaPenalize = 1.0;
inline constexpr double kDefaultStepSize = 0.5;
inline constexpr int kDefaultMaxIters = 500;
inline constexpr double kDefaultRelTol = 1e-6;

struct FitParams {
  double eta = kDefaultEtaMaximize;
  double step_size = kDefaultStepSize;
  int max_iters = kDefaultMaxIters;
  double rel_tol = kDefaultRelTol;
  OverlapSign overlap_sign = OverlapSign::Maximize;
  Solver solver = Solver::Lbfgs;

  void validate() const;
};

struct EnergyTerms {
  double total = 0.0;
  double data_term = 0.0;
  double overlap_term = 0.0;
};

struct FitTrace {
  std::vector<EnergyTerms> records;
  int iterations_run = 0;
  bool converged = false;
  // Step in effect when the loop stopped (a fraction of the full step for
  // L-BFGS).
  double final_step = 0.0;
};

struct FitOutcome {
  DnsmModel model;
  FitTrace trace;
};

EnergyTerms energy(const DnsmModel& m, const ShapeRaster& shape,
                   const FitParams& p);

// dE/d(parameter), laid out like DnsmModel::flatten().
std::vector<double> gradient(const DnsmModel& m, const ShapeRaster& shape,
                             const FitParams& p);

// Minimizes the energy from the parameters of `m`.
//
// GradientDescent halves a trial step that raises the energy (at most 20
// times per iteration) and grows the step back by 1.25x after each accepted
// iteration, never above p.step_size. Lbfgs keeps 10 curvature pairs, tries
// the full quasi-Newton step and halves it until the Armijo condition holds;
// p.step_size is unused.
//
// Both stop at p.max_iters, when the relative energy change over 10
// iterations is at most p.rel_tol, or when no halving yields a descent step.
// Throws Error if every trial energy is non-finite.
FitOutcome fit(const DnsmModel& m, const ShapeRaster& shape,
               const FitParams& p);

namespace detail {

// Single pass over all pixels. Writes the gradient when `grad` is non-empty.
EnergyTerms evaluate(const ModelConfig& cfg, std::span<const double> params,
                     const ShapeRaster& shape, const FitParams& p,
                     std::span<double> grad);

}  // namespace detail

}  // namespace dnsm
