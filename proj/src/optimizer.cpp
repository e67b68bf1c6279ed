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

#include "dnsm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "dnsm/error.hpp"

namespace dnsm {

namespace {

// sigma(z) <= exp(min(z, 0)), so g_i <= exp(sum of negative affine values).
// Below this bound g_i < 1e-16 and the polytope is skipped for the pixel.
constexpr double kCullLogBound = -37.0;

constexpr int kMaxHalvings = 20;
constexpr int kConvergenceWindow = 10;
constexpr double kDescentSlack = 1e-12;
constexpr double kStepGrowth = 1.25;

constexpr std::size_t kLbfgsMemory = 10;
constexpr double kArmijo = 1e-4;
// Largest single-parameter change of a steepest-descent restart.
constexpr double kFirstMove = 0.1;

}  // namespace

std::string_view to_string(OverlapSign sign) {
  return sign == OverlapSign::Maximize ? "maximize" : "penalize";
}

std::string_view to_string(Solver solver) {
  return solver == Solver::Lbfgs ? "lbfgs" : "gradient-descent";
}

void FitParams::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw InvalidArgument("eta must be nonnegative");
  }
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw InvalidArgument("step size must be positive");
  }
  if (max_iters < 1) {
    throw InvalidArgument("max_iters must be >= 1");
  }
  if (!(rel_tol >= 0.0)) {
    throw InvalidArgument("rel_tol must be nonnegative");
  }
}

namespace detail {

EnergyTerms evaluate(const ModelConfig& cfg, std::span<const double> params,
                     const ShapeRaster& shape, const FitParams& p,
                     std::span<double> grad) {
  const auto n = static_cast<std::size_t>(cfg.n_polytopes);
  const auto m = static_cast<std::size_t>(cfg.m_halfspaces);
  const bool want_grad = !grad.empty();
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const double sign = p.overlap_sign == OverlapSign::Maximize ? -1.0 : 1.0;

  // Structure-of-arrays copy so the per-pixel affine loop is contiguous.
  std::vector<double> w0(n * m), w1(n * m), bias(n * m);
  for (std::size_t k = 0; k < n * m; ++k) {
    w0[k] = params[k * kParamsPerHalfspace + 0];
    w1[k] = params[k * kParamsPerHalfspace + 1];
    bias[k] = params[k * kParamsPerHalfspace + 2];
  }

  std::vector<double> affine(m);
  std::vector<double> expo(m);
  std::vector<double> value(m);
  std::vector<double> complement(n * m);  // 1 - sigma_ij
  std::vector<double> g(n);
  std::vector<char> active(n);
  std::vector<double> prefix(n + 1);
  std::vector<double> suffix(n + 1);

  double data_sum = 0.0;
  double overlap_sum = 0.0;

  for (std::size_t px = 0; px < shape.pixel_count(); ++px) {
    const Point2 x = shape.center_of(px);
    const double target = shape.at(px) ? 1.0 : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      const double* a = w0.data() + i * m;
      const double* b = w1.data() + i * m;
      const double* c = bias.data() + i * m;
      double negative_sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        affine[j] = a[j] * x.x + b[j] * x.y + c[j];
        negative_sum += std::min(affine[j], 0.0);
      }
      if (negative_sum < kCullLogBound) {
        g[i] = 0.0;
        active[i] = 0;
        continue;
      }
      // Branch-free so the loops vectorize; the sign of the affine value is
      // close to random across half-spaces.
      double* comp = complement.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        expo[j] = std::exp(-std::abs(affine[j]));
      }
      for (std::size_t j = 0; j < m; ++j) {
        const double inv = 1.0 / (1.0 + expo[j]);
        const double small = expo[j] * inv;
        const bool inside = affine[j] >= 0.0;
        value[j] = inside ? inv : small;
        comp[j] = inside ? small : inv;
      }
      double gi = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        gi *= value[j];
      }
      g[i] = gi;
      active[i] = 1;
    }

    prefix[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      prefix[i + 1] = prefix[i] * (1.0 - g[i]);
    }
    const double f = 1.0 - prefix[n];
    const double residual = f - target;
    data_sum += residual * residual;

    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      overlap_sum += g[i] * running;
      running += g[i];
    }

    if (!want_grad) {
      continue;
    }
    suffix[n] = 1.0;
    for (std::size_t i = n; i-- > 0;) {
      suffix[i] = suffix[i + 1] * (1.0 - g[i]);
    }
    const double g_sum = running;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) {
        continue;
      }
      // dE/dg_i = 2 (f - I) prod_{r != i} (1 - g_r) + s eta sum_{r != i} g_r
      const double others_outside = prefix[i] * suffix[i + 1];
      const double coef = 2.0 * residual * others_outside +
                          sign * p.eta * (g_sum - g[i]);
      if (coef == 0.0) {
        continue;
      }
      // dg_i/d(affine_ij) = g_i (1 - sigma_ij)
      const double scaled = coef * g[i];
      double* gw = grad.data() + i * m * kParamsPerHalfspace;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = scaled * complement[i * m + j];
        gw[j * kParamsPerHalfspace + 0] += d * x.x;
        gw[j * kParamsPerHalfspace + 1] += d * x.y;
        gw[j * kParamsPerHalfspace + 2] += d;
      }
    }
  }

  const double area = shape.frame().pixel_area();
  EnergyTerms terms;
  terms.data_term = area * data_sum;
  terms.overlap_term = area * overlap_sum;
  terms.total = terms.data_term + sign * p.eta * terms.overlap_term;
  if (want_grad) {
    for (auto& v : grad) {
      v *= area;
    }
  }
  return terms;
}

}  // namespace detail

EnergyTerms energy(const DnsmModel& m, const ShapeRaster& shape,
                   const FitParams& p) {
  const auto params = m.flatten();
  return detail::evaluate(m.config(), params, shape, p, {});
}

std::vector<double> gradient(const DnsmModel& m, const ShapeRaster& shape,
                             const FitParams& p) {
  const auto params = m.flatten();
  std::vector<double> grad(params.size());
  detail::evaluate(m.config(), params, shape, p, grad);
  return grad;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += a[k] * b[k];
  }
  return sum;
}

double max_abs(std::span<const double> a) {
  double out = 0.0;
  for (double v : a) {
    out = std::max(out, std::abs(v));
  }
  return out;
}

// Energy-based stopping rule shared by both solvers.
class ConvergenceWindow {
 public:
  explicit ConvergenceWindow(double initial) : history_{initial} {}

  bool push(double value, double rel_tol) {
    history_.push_back(value);
    if (history_.size() <= static_cast<std::size_t>(kConvergenceWindow)) {
      return false;
    }
    const double before = history_[history_.size() - 1 - kConvergenceWindow];
    return std::abs(value - before) <= rel_tol * std::abs(before);
  }

 private:
  std::vector<double> history_;
};

struct Evaluator {
  const ModelConfig& cfg;
  const ShapeRaster& shape;
  const FitParams& p;

  EnergyTerms operator()(std::span<const double> x,
                         std::span<double> grad) const {
    return detail::evaluate(cfg, x, shape, p, grad);
  }
};

[[noreturn]] void throw_non_finite(int iter) {
  throw Error("energy became non-finite at iteration " + std::to_string(iter) +
              "; reduce the step size");
}

FitOutcome fit_gradient_descent(const DnsmModel& m, const Evaluator& eval,
                                const FitParams& p) {
  std::vector<double> params = m.flatten();
  std::vector<double> grad(params.size());
  std::vector<double> trial(params.size());
  std::vector<double> trial_grad(params.size());

  EnergyTerms current = eval(params, grad);
  if (!std::isfinite(current.total)) {
    throw Error("energy is non-finite at the initial parameters");
  }

  FitTrace trace;
  ConvergenceWindow window(current.total);
  double step = p.step_size;
  for (int iter = 1; iter <= p.max_iters; ++iter) {
    bool accepted = false;
    bool any_finite = false;
    EnergyTerms next;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        trial[k] = params[k] - step * grad[k];
      }
      next = eval(trial, trial_grad);
      if (std::isfinite(next.total)) {
        any_finite = true;
        if (next.total <= current.total + kDescentSlack) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!any_finite) {
        throw_non_finite(iter);
      }
      // No descent step at machine precision: stationary point.
      trace.converged = true;
      break;
    }

    params.swap(trial);
    grad.swap(trial_grad);
    current = next;
    trace.records.push_back(current);
    trace.iterations_run = iter;
    step = std::min(step * kStepGrowth, p.step_size);
    if (window.push(current.total, p.rel_tol)) {
      trace.converged = true;
      break;
    }
  }
  trace.final_step = step;
  return {DnsmModel::unflatten(m.config(), params), std::move(trace)};
}

FitOutcome fit_lbfgs(const DnsmModel& m, const Evaluator& eval,
                     const FitParams& p) {
  const std::size_t n = m.parameter_count();
  std::vector<double> params = m.flatten();
  std::vector<double> grad(n), trial(n), trial_grad(n), dir(n);

  EnergyTerms current = eval(params, grad);
  if (!std::isfinite(current.total)) {
    throw Error("energy is non-finite at the initial parameters");
  }

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  std::vector<double> alpha;

  FitTrace trace;
  ConvergenceWindow window(current.total);
  double step = 1.0;
  for (int iter = 1; iter <= p.max_iters; ++iter) {
    // Two-loop recursion: dir approximates H^{-1} grad.
    dir = grad;
    alpha.assign(memory.size(), 0.0);
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * dot(memory[k].s, dir);
      for (std::size_t t = 0; t < n; ++t) {
        dir[t] -= alpha[k] * memory[k].y[t];
      }
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double gamma = 1.0 / (last.rho * dot(last.y, last.y));
      for (auto& v : dir) {
        v *= gamma;
      }
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, dir);
      for (std::size_t t = 0; t < n; ++t) {
        dir[t] += (alpha[k] - beta) * memory[k].s[t];
      }
    }
    double slope = dot(grad, dir);
    if (memory.empty() || !(slope > 0.0)) {
      // Restart from steepest descent with a bounded first move.
      memory.clear();
      const double top = max_abs(grad);
      if (top == 0.0) {
        trace.converged = true;
        break;
      }
      for (std::size_t t = 0; t < n; ++t) {
        dir[t] = grad[t] * (kFirstMove / top);
      }
      slope = dot(grad, dir);
    }

    bool accepted = false;
    bool any_finite = false;
    EnergyTerms next;
    step = 1.0;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      for (std::size_t t = 0; t < n; ++t) {
        trial[t] = params[t] - step * dir[t];
      }
      next = eval(trial, trial_grad);
      if (std::isfinite(next.total)) {
        any_finite = true;
        if (next.total <= current.total - kArmijo * step * slope) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!any_finite) {
        throw_non_finite(iter);
      }
      trace.converged = true;
      break;
    }

    Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      pair.s[t] = trial[t] - params[t];
      pair.y[t] = trial_grad[t] - grad[t];
    }
    const double sy = dot(pair.s, pair.y);
    // Curvature condition; skipping keeps the inverse Hessian positive.
    if (sy > 0.0 && std::isfinite(sy)) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > kLbfgsMemory) {
        memory.pop_front();
      }
    }

    params.swap(trial);
    grad.swap(trial_grad);
    current = next;
    trace.records.push_back(current);
    trace.iterations_run = iter;
    if (window.push(current.total, p.rel_tol)) {
      trace.converged = true;
      break;
    }
  }
  trace.final_step = step;
  return {DnsmModel::unflatten(m.config(), params), std::move(trace)};
}

}  // namespace

FitOutcome fit(const DnsmModel& m, const ShapeRaster& shape,
               const FitParams& p) {
  p.validate();
  const Evaluator eval{m.config(), shape, p};
  return p.solver == Solver::Lbfgs ? fit_lbfgs(m, eval, p)
                                   : fit_gradient_descent(m, eval, p);
}

}  // namespace dnsm
