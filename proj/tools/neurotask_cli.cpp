// Copyright 2026 The neurotask Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/ingest.hpp"
#include "neurotask/pipeline.hpp"
#include "neurotask/simd/kernels.hpp"

namespace {

using namespace neurotask;
namespace fs = std::filesystem;

struct Options {
  std::string manifest;
  std::string out = "neurotask-out";
  std::vector<std::string> tasks;
  std::vector<std::string> subjects;
  std::vector<std::string> rois;
  std::optional<double> lambda;
  std::optional<std::size_t> folds;
  std::string fold_scheme;
  std::optional<std::uint64_t> seed;
  std::string standardize;
  std::string pc_mode;
  std::string linkage = "average";
  std::string similarity_mode = "prediction-score";
  std::optional<std::size_t> correction_family;
  std::size_t threads = 1;
  bool save_weights = false;
  bool include_baseline = false;
  std::string metric = "mae";
  bool quiet = false;
};

CLI::Option* env(CLI::Option* opt, const char* name) {
  return opt->envname(std::string("NEUROTASK_") + name);
}

void add_plan_options(CLI::App* cmd, Options& o) {
  env(cmd->add_option("--manifest", o.manifest, "Dataset manifest (JSON)")->required(), "MANIFEST");
  env(cmd->add_option("--out", o.out, "Output directory")->capture_default_str(), "OUT");
  env(cmd->add_option("--tasks", o.tasks, "Task codes to include")->delimiter(','), "TASKS");
  env(cmd->add_option("--subjects", o.subjects, "Subject ids to include")->delimiter(','), "SUBJECTS");
  env(cmd->add_option("--rois", o.rois, "ROI names to include")->delimiter(','), "ROIS");
  env(cmd->add_option("--lambda", o.lambda, "Ridge penalty (default 1.0)")
                ->check(CLI::NonNegativeNumber), "LAMBDA");
  env(cmd->add_option("--folds", o.folds, "Cross-validation folds (default 10)")
                ->check(CLI::PositiveNumber), "FOLDS");
  env(cmd->add_option("--fold-scheme", o.fold_scheme, "contiguous | shuffled")
                ->check(CLI::IsMember({"contiguous", "shuffled"})), "FOLD_SCHEME");
  env(cmd->add_option("--seed", o.seed, "Seed for the shuffled fold scheme"), "SEED");
  env(cmd->add_option("--standardize", o.standardize, "zscore | none")
                ->check(CLI::IsMember({"zscore", "none"})), "STANDARDIZE");
  env(cmd->add_option("--pc-mode", o.pc_mode, "per-sample | per-voxel")
                ->check(CLI::IsMember({"per-sample", "per-voxel"})), "PC_MODE");
  env(cmd->add_option("--linkage", o.linkage, "average | complete | single")
                ->check(CLI::IsMember({"average", "complete", "single"}))->capture_default_str(), "LINKAGE");
  env(cmd->add_option("--similarity-mode", o.similarity_mode,
                            "prediction-score | prediction-values | representation-rsa")
                ->check(CLI::IsMember({"prediction-score", "prediction-values", "representation-rsa"}))
                ->capture_default_str(), "SIMILARITY_MODE");
  env(cmd->add_option("--correction-family", o.correction_family,
                            "Bonferroni family size (default: pairs per ROI)")
                ->check(CLI::PositiveNumber), "CORRECTION_FAMILY");
  env(cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)
                ->capture_default_str(), "THREADS");
  env(cmd->add_flag("--save-weights", o.save_weights, "Persist per-fold weights"), "SAVE_WEIGHTS");
  env(cmd->add_flag("--stats-include-baseline", o.include_baseline, "Include BASE in stats"),
            "STATS_INCLUDE_BASELINE");
  env(cmd->add_option("--metric", o.metric, "Brain-map metric: mae | pearson")
                ->check(CLI::IsMember({"mae", "pearson"}))->capture_default_str(), "METRIC");
  env(cmd->add_flag("--quiet", o.quiet, "Suppress progress lines"), "QUIET");
}

pipeline::RunPlan build_plan(const Options& o) {
  pipeline::Filters filters{o.tasks, o.subjects, o.rois};
  auto plan = pipeline::make_plan(load_manifest(o.manifest), filters, o.out);
  if (o.lambda) plan.config.lambda = *o.lambda;
  if (o.folds) plan.config.k_folds = *o.folds;
  if (!o.fold_scheme.empty()) plan.config.fold_scheme = *parse_fold_scheme(o.fold_scheme);
  if (o.seed) plan.config.seed = *o.seed;
  if (!o.standardize.empty()) plan.config.standardize = *parse_standardize(o.standardize);
  if (!o.pc_mode.empty()) plan.config.pc_mode = *parse_pc_mode(o.pc_mode);
  plan.linkage = *taskonomy::parse_linkage(o.linkage);
  plan.similarity_mode = *taskonomy::parse_similarity_mode(o.similarity_mode);
  plan.correction_family = o.correction_family;
  plan.threads = o.threads;
  plan.save_weights = o.save_weights;
  plan.stats_include_baseline = o.include_baseline;
  plan.brainmap_metric = *brainmap::parse_voxel_metric(o.metric);
  if (!o.quiet) plan.log = [](const std::string& line) { std::cerr << line << '\n'; };
  return plan;
}

void report(const char* stage, const pipeline::StageSummary& s, bool quiet) {
  if (quiet) return;
  std::cout << stage << ": " << s.units << " units, " << s.files.size() << " files\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxelwise encoding, evaluation and task-similarity analysis over a dataset manifest"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  Options o;
  using Stage = pipeline::StageSummary (*)(const pipeline::RunPlan&);
  const std::vector<std::pair<const char*, Stage>> stages = {
      {"encode", pipeline::cmd_encode},   {"evaluate", pipeline::cmd_evaluate},
      {"stats", pipeline::cmd_stats},     {"similarity", pipeline::cmd_similarity},
      {"report", pipeline::cmd_report},   {"brainmap", pipeline::cmd_brainmap}};
  const std::vector<std::pair<const char*, const char*>> help = {
      {"encode", "Fit cross-validated ridge encoders and store out-of-fold predictions"},
      {"evaluate", "Compute 2V2, Pearson and MAE for every encoding run"},
      {"stats", "One-way ANOVA and Bonferroni-corrected pairwise tests per ROI and metric"},
      {"similarity", "Task-similarity matrix, heatmap and dendrogram"},
      {"report", "Mean metrics across subjects and bar charts"},
      {"brainmap", "Per-voxel score export with atlas labels"}};
  std::vector<CLI::App*> stage_cmds;
  for (const auto& [name, text] : help) {
    auto* cmd = app.add_subcommand(name, text);
    add_plan_options(cmd, o);
    stage_cmds.push_back(cmd);
  }
  auto* all = app.add_subcommand("all", "Run every stage in order");
  add_plan_options(all, o);

  pipeline::SynthSpec synth;
  std::string synth_shape = "reading";
  std::string synth_out = "synthetic";
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset and its manifest");
  synth_cmd->add_option("--shape", synth_shape, "reading | listening")
      ->check(CLI::IsMember({"reading", "listening"}))->capture_default_str();
  synth_cmd->add_option("--samples", synth.samples, "Samples (default 627 reading, 259 listening)");
  synth_cmd->add_option("--subjects", synth.subjects, "Subjects (default 5 reading, 82 listening)");
  synth_cmd->add_option("--dim", synth.dim, "Feature dimension")->capture_default_str();
  synth_cmd->add_option("--voxel-scale", synth.voxel_scale, "Scale applied to ROI voxel counts")
      ->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_flag("--no-baseline{false}", synth.include_baseline, "Omit the BASE task");
  synth_cmd->add_option("--out", synth_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (synth_cmd->parsed()) {
      synth.shape = synth_shape == "listening" ? pipeline::SynthSpec::Shape::kListening
                                               : pipeline::SynthSpec::Shape::kReading;
      std::cout << pipeline::synthesize_dataset(synth, synth_out).string() << '\n';
      return 0;
    }
    const auto plan = build_plan(o);
    if (!o.quiet) std::cerr << "kernels: " << simd::to_string(simd::kernels().isa) << '\n';
    for (std::size_t i = 0; i < stages.size(); ++i) {
      if (all->parsed() || stage_cmds[i]->parsed()) report(stages[i].first, stages[i].second(plan), o.quiet);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
