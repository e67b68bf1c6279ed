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

#include "dnsm/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>

#include "dnsm/error.hpp"
#include "dnsm/io.hpp"
#include "dnsm/pipeline.hpp"
#include "dnsm/report.hpp"

namespace dnsm {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string input;
  fs::path out_dir = ".";
  int threshold = kDefaultThreshold;

  PipelineParams pipeline;
  std::size_t keep_k = 0;
  double c_min = 0.0;
  int max_iters = kDefaultMaxIters;
  double rel_tol = kDefaultRelTol;
  double gamma = kDefaultStepSize;
  std::string solver = "lbfgs";
  bool seedless = false;
  std::string concavity_source = "overlapping";

  // convexity
  std::string measure = "all";

  // fit-only
  double eta = kDefaultEtaMaximize;
  std::string overlap = "maximize";

  // report
  std::string model_path;
  std::string report_path;
};

const std::map<std::string, Solver> kSolvers{
    {"lbfgs", Solver::Lbfgs}, {"gd", Solver::GradientDescent}};
const std::map<std::string, ConcavitySource> kSources{
    {"overlapping", ConcavitySource::Overlapping},
    {"final", ConcavitySource::Final}};
const std::map<std::string, OverlapSign> kSigns{
    {"maximize", OverlapSign::Maximize}, {"penalize", OverlapSign::Penalize}};

void add_input(CLI::App* cmd, Options& o) {
  cmd->add_option("input", o.input, "Binary shape image (PGM or PNG)")
      ->required();
  cmd->add_option("--threshold", o.threshold,
                  "Gray level at or above which a pixel is foreground")
      ->check(CLI::Range(0, 255))
      ->capture_default_str();
}

void add_init_options(CLI::App* cmd, Options& o) {
  auto& init = o.pipeline.init;
  cmd->add_option("--radius", init.radius,
                  "Initial disc radius (longest image side = 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--spacing", init.spacing, "Initial disc grid spacing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--halfspaces", init.m_halfspaces,
                  "Half-spaces per polytope")
      ->check(CLI::Range(3, 4096))
      ->capture_default_str();
  cmd->add_option("--slope", init.slope, "Initial sigmoid slope")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_solver_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--gamma", o.gamma,
                  "Gradient-descent step size (used with --solver gd)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap per fit")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->capture_default_str();
  cmd->add_option("--rel-tol", o.rel_tol,
                  "Relative energy change over 10 iterations that stops a fit")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--solver", o.solver, "lbfgs or gd")
      ->check(CLI::IsMember(kSolvers))
      ->capture_default_str();
}

void add_pipeline_options(CLI::App* cmd, Options& o) {
  add_init_options(cmd, o);
  add_solver_options(cmd, o);
  auto* k = cmd->add_option("--keep-k", o.keep_k,
                            "Keep the k most significant polytopes");
  k->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  auto* c = cmd->add_option("--min-c", o.c_min,
                            "Remove polytopes while some significance is "
                            "below this value (default 0.1)");
  c->check(CLI::PositiveNumber);
  k->excludes(c);
  cmd->add_option("--eta1", o.pipeline.step1.eta,
                  "Overlap reward in the first fit, divided by the pair count")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--t", o.pipeline.prune.t_exponent,
                  "Size exponent of the significance measure")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--seedless-deterministic", o.seedless,
                "Accepted for scripts; every run is deterministic");
}

void finish_pipeline(Options& o) {
  auto& p = o.pipeline;
  if (o.keep_k > 0) {
    p.prune.mode = KeepTopK{o.keep_k};
  } else if (o.c_min > 0.0) {
    p.prune.mode = Threshold{o.c_min};
  }
  for (FitParams* f : {&p.step1, &p.step3}) {
    f->max_iters = o.max_iters;
    f->rel_tol = o.rel_tol;
    f->step_size = o.gamma;
    f->solver = kSolvers.at(o.solver);
  }
}

fs::path output_path(const Options& o, std::string_view suffix) {
  return o.out_dir / (fs::path(o.input).stem().string() + std::string(suffix));
}

ModelFile model_file(const DnsmModel& m, const ShapeRaster& shape) {
  return {m, shape.width(), shape.height()};
}

int cmd_decompose(Options& o, std::ostream& out) {
  finish_pipeline(o);
  const ShapeRaster shape =
      read_shape(o.input, static_cast<std::uint8_t>(o.threshold));
  const DecompositionResult result = decompose(shape, o.pipeline);
  const ConcavitySource source = kSources.at(o.concavity_source);
  const ConvexityReport convexity =
      source == ConcavitySource::Overlapping
          ? result.convexity
          : measure_convexity(result.model, shape,
                              o.pipeline.prune.t_exponent);

  fs::create_directories(o.out_dir);
  const auto model_path = output_path(o, ".dnsm");
  const auto report_path = output_path(o, ".report.json");
  const auto labels_path = output_path(o, ".labels.png");
  write_model(model_file(result.model, shape), model_path);
  write_file_atomic(report_path,
                    decomposition_report(result, convexity, source,
                                         o.pipeline, shape));
  write_label_map(result.labels, labels_path);

  out << "parts " << result.labels.part_count() << "\n"
      << "dnsm_concavity " << convexity.dnsm_concavity << "\n"
      << "dice_vs_input " << result.diagnostics.dice_vs_input << "\n"
      << "model " << model_path.string() << "\n"
      << "report " << report_path.string() << "\n"
      << "labels " << labels_path.string() << "\n";
  return kExitOk;
}

int cmd_convexity(Options& o, std::ostream& out) {
  finish_pipeline(o);
  const ShapeRaster shape =
      read_shape(o.input, static_cast<std::uint8_t>(o.threshold));
  const bool all = o.measure == "all";
  if (all || o.measure == "dnsm") {
    const ConvexityAnalysis analysis = analyze_convexity(shape, o.pipeline);
    out << "dnsm_concavity " << analysis.report.dnsm_concavity << "\n";
    if (all) {
      out << "pb_concavity " << analysis.report.pb_concavity << "\n"
          << "rb_concavity " << analysis.report.rb_concavity << "\n";
    }
    if (!o.report_path.empty()) {
      write_file_atomic(o.report_path,
                        convexity_report(analysis, o.pipeline, shape));
    }
    return kExitOk;
  }
  const BaselineConcavity b = baseline_concavities(shape);
  out << (o.measure == "pb" ? "pb_concavity " : "rb_concavity ")
      << (o.measure == "pb" ? b.pb : b.rb) << "\n";
  return kExitOk;
}

int cmd_fit_only(Options& o, std::ostream& out) {
  finish_pipeline(o);
  const ShapeRaster shape =
      read_shape(o.input, static_cast<std::uint8_t>(o.threshold));
  const auto& init = o.pipeline.init;
  const ModelConfig cfg{.m_halfspaces = init.m_halfspaces,
                        .slope = init.slope};
  const DnsmModel initial =
      init_polytopes(shape, init.radius, init.spacing, cfg);
  FitParams p = o.pipeline.step1;
  p.overlap_sign = kSigns.at(o.overlap);
  p.eta = p.overlap_sign == OverlapSign::Maximize
              ? pair_normalized_eta(o.eta, initial.size())
              : o.eta;
  const FitOutcome fitted = fit(initial, shape, p);
  const Diagnostics diag = diagnose(fitted.model, shape);

  fs::create_directories(o.out_dir);
  const auto model_path = output_path(o, ".dnsm");
  const auto report_path = output_path(o, ".report.json");
  write_model(model_file(fitted.model, shape), model_path);
  write_file_atomic(report_path,
                    fit_report(fitted.model, fitted.trace, p, diag, shape));
  out << "polytopes " << fitted.model.size() << "\n"
      << "dice_vs_input " << diag.dice_vs_input << "\n"
      << "model " << model_path.string() << "\n"
      << "report " << report_path.string() << "\n";
  return kExitOk;
}

int cmd_report(Options& o, std::ostream& out) {
  const ShapeRaster shape =
      read_shape(o.input, static_cast<std::uint8_t>(o.threshold));
  const ModelFile file = read_model(o.model_path);
  if (file.frame_width != shape.width() ||
      file.frame_height != shape.height()) {
    throw Error("model frame " + std::to_string(file.frame_width) + "x" +
                std::to_string(file.frame_height) +
                " does not match the image size");
  }
  const ConvexityReport convexity =
      measure_convexity(file.model, shape, o.pipeline.prune.t_exponent);
  const std::string text = model_report(file.model, convexity,
                                        diagnose(file.model, shape), shape);
  if (o.report_path.empty()) {
    out << text;
  } else {
    write_file_atomic(o.report_path, text);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Convex decomposition and convexity measures for binary "
               "shapes"};
  app.name("dnsm");
  app.require_subcommand(1);
  Options o;

  auto* decompose_cmd =
      app.add_subcommand("decompose", "Decompose a shape into convex parts");
  add_input(decompose_cmd, o);
  decompose_cmd
      ->add_option("--out-dir", o.out_dir, "Directory for the output files")
      ->capture_default_str();
  add_pipeline_options(decompose_cmd, o);
  decompose_cmd
      ->add_option("--eta3", o.pipeline.step3.eta,
                   "Overlap penalty in the final fit")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  decompose_cmd
      ->add_option("--concavity-model", o.concavity_source,
                   "Model whose regions define the reported concavity: "
                   "overlapping (after pruning) or final")
      ->check(CLI::IsMember(kSources))
      ->capture_default_str();

  auto* convexity_cmd = app.add_subcommand(
      "convexity", "Print global concavity measures of a shape");
  add_input(convexity_cmd, o);
  convexity_cmd->add_option("--measure", o.measure, "dnsm, pb, rb or all")
      ->check(CLI::IsMember({"dnsm", "pb", "rb", "all"}))
      ->capture_default_str();
  convexity_cmd->add_option("--report", o.report_path,
                            "Also write a JSON report (dnsm and all only)");
  add_pipeline_options(convexity_cmd, o);

  auto* fit_cmd = app.add_subcommand(
      "fit-only", "Fit the dense initial polytopes once, without pruning");
  add_input(fit_cmd, o);
  fit_cmd->add_option("--out-dir", o.out_dir, "Directory for the output files")
      ->capture_default_str();
  fit_cmd
      ->add_option("--eta", o.eta,
                   "Overlap weight; divided by the pair count when maximizing")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fit_cmd->add_option("--overlap", o.overlap, "maximize or penalize")
      ->check(CLI::IsMember(kSigns))
      ->capture_default_str();
  add_init_options(fit_cmd, o);
  add_solver_options(fit_cmd, o);

  auto* report_cmd = app.add_subcommand(
      "report", "Evaluate a stored model against a shape as JSON");
  add_input(report_cmd, o);
  report_cmd->add_option("--model", o.model_path, "Model file")->required();
  report_cmd->add_option("--out", o.report_path,
                         "Write the report here instead of stdout");
  report_cmd
      ->add_option("--t", o.pipeline.prune.t_exponent,
                   "Size exponent of the significance measure")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*decompose_cmd) return cmd_decompose(o, out);
    if (*convexity_cmd) return cmd_convexity(o, out);
    if (*fit_cmd) return cmd_fit_only(o, out);
    return cmd_report(o, out);
  } catch (const InvalidArgument& e) {
    err << "dnsm: invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dnsm: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace dnsm
