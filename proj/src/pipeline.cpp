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

#include "neurotask/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>

#include "neurotask/encoder.hpp"
#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/metrics.hpp"
#include "neurotask/parallel.hpp"
#include "neurotask/stats.hpp"
#include "svg.hpp"

namespace neurotask::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kMetricNames[] = {"2v2", "pearson", "mae"};

// Digests of input files, computed once per path per stage.
class DigestCache {
 public:
  std::string get(const fs::path& p) {
    const std::string key = p.string();
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    std::string d = digest_file(p);
    std::lock_guard lock(mu_);
    return cache_.emplace(key, std::move(d)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::string> cache_;
};

std::string rel(const fs::path& p, const fs::path& base) {
  std::error_code ec;
  fs::path r = fs::relative(p, base, ec);
  return (ec || r.empty()) ? p.generic_string() : r.generic_string();
}

void log(const RunPlan& plan, const std::string& line) {
  static std::mutex mu;
  if (!plan.log) return;
  std::lock_guard lock(mu);
  plan.log(line);
}

Json encoding_config_json(const EncodingConfig& c) {
  Json j;
  j["lambda"] = c.lambda;
  j["k_folds"] = c.k_folds;
  j["standardize"] = to_string(c.standardize);
  j["fold_scheme"] = to_string(c.fold_scheme);
  j["seed"] = c.seed;
  j["pc_mode"] = to_string(c.pc_mode);
  j["metrics_on"] = "pooled out-of-fold predictions";
  return j;
}

Json selection_json(const RunPlan& plan) {
  Json j;
  auto& t = j["tasks"] = Json::array();
  for (const auto* e : plan.tasks) t.push_back(e->task.code_string());
  auto& s = j["subjects"] = Json::array();
  for (const auto* e : plan.subjects) s.push_back(e->subject_id);
  j["rois"] = plan.rois;
  return j;
}

Json base_notes(const RunPlan& plan) {
  Json n;
  n["dataset_id"] = plan.manifest.dataset_id;
  n["selection"] = selection_json(plan);
  if (!plan.manifest.notes.empty()) n["dataset_notes"] = plan.manifest.notes;
  return n;
}

std::string unit_name(const RunPlan::Unit& u) {
  return std::string(u.task->task.code_string()) + "/" + u.subject->subject_id + "/" + u.roi->roi.name;
}

// Re-throws with the failing (task, subject, roi) prefixed.
template <class Fn>
auto with_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), context + ": " + e.detail());
  }
}

fs::path voxel_score_path(const RunPlan& plan, const RunPlan::Unit& u, std::string_view score) {
  return plan.output_dir / "metrics" / "voxels" / std::string(u.task->task.code_string()) /
         u.subject->subject_id / (u.roi->roi.name + "." + std::string(score) + ".npy");
}

void require_upstream(const fs::path& p, std::string_view stage) {
  if (!fs::exists(p)) {
    fail(ErrorKind::kMissingUpstream,
         "'" + p.string() + "' not found; run `neurotask " + std::string(stage) + "` first");
  }
}

Matrix row_vector(const Vector& v) {
  Matrix m(1, v.size());
  m.row(0) = v.transpose();
  return m;
}

Vector read_row_vector(const fs::path& p) {
  const Matrix m = read_array(p);
  if (m.rows() != 1) fail(ErrorKind::kShapeMismatch, "'" + p.string() + "' is not a row vector");
  return m.row(0).transpose();
}

struct MetricRow {
  std::string task;
  std::string subject;
  std::string roi;
  std::string metric;
  double value;
};

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::vector<MetricRow> read_metrics(const RunPlan& plan) {
  const fs::path path = metrics_csv_path(plan);
  require_upstream(path, "evaluate");
  const std::string text = read_text_file(path);
  std::vector<MetricRow> rows;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) fail(ErrorKind::kParseError, "metrics CSV has no header");
  ++pos;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) fail(ErrorKind::kParseError, "metrics CSV row has " + std::to_string(f.size()) + " fields");
    rows.push_back({f[1], f[2], f[3], f[4], parse_double(f[5])});
  }
  return rows;
}

// (metric, roi, task, subject) -> value
using MetricIndex = std::map<std::string, std::map<std::string, std::map<std::string, std::map<std::string, double>>>>;

MetricIndex index_metrics(const std::vector<MetricRow>& rows) {
  MetricIndex idx;
  for (const auto& r : rows) idx[r.metric][r.roi][r.task][r.subject] = r.value;
  return idx;
}

class OutputWriter {
 public:
  OutputWriter(const RunPlan& plan, std::string command, Json config)
      : plan_(plan), command_(std::move(command)), config_(std::move(config)) {}

  void text(const fs::path& path, std::string_view content, const std::vector<SidecarInput>& inputs,
            Json notes = Json::object()) {
    write_text_file(path, content);
    sidecar(path, inputs, std::move(notes));
  }
  void array(const fs::path& path, const Matrix& m, const std::vector<SidecarInput>& inputs,
             Json notes = Json::object()) {
    write_array(m, path);
    sidecar(path, inputs, std::move(notes));
  }
  SidecarInput input(const fs::path& p) {
    const fs::path base = is_output(p) ? plan_.output_dir : plan_.manifest.base_dir;
    return {rel(p, base), digests_.get(p)};
  }
  SidecarInput manifest_input() {
    return {"manifest:" + plan_.manifest.dataset_id, digest_bytes(manifest_to_json(plan_.manifest).dump())};
  }

 private:
  bool is_output(const fs::path& p) const {
    const std::string out = plan_.output_dir.lexically_normal().generic_string();
    return p.lexically_normal().generic_string().rfind(out, 0) == 0;
  }
  void sidecar(const fs::path& path, const std::vector<SidecarInput>& inputs, Json notes) {
    Json merged = base_notes(plan_);
    for (auto& [k, v] : notes.items()) merged[k] = v;
    write_sidecar(path, command_, config_, inputs, merged);
  }

  const RunPlan& plan_;
  std::string command_;
  Json config_;
  DigestCache digests_;
};

const std::vector<std::string> kTaskPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf", "#393b79"};

std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& rois,
                          const std::vector<std::string>& tasks,
                          const std::map<std::string, std::map<std::string, double>>& means) {
  const double bar = 9;
  const double group_gap = 18;
  const double left = 60;
  const double top = 40;
  const double plot_h = 260;
  const double group_w = bar * static_cast<double>(tasks.size()) + group_gap;
  const double width = left + group_w * static_cast<double>(rois.size()) + 120;
  svg::Document doc(width, top + plot_h + 90);
  doc.text(width / 2, 22, title, "middle", 14);

  double lo = 0.0;
  double hi = 0.0;
  for (const auto& [task, by_roi] : means) {
    for (const auto& [roi, v] : by_roi) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo <= 0) hi = lo + 1;
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
  doc.line(left - 6, top, left - 6, top + plot_h);
  doc.line(left - 6, y_of(0), width - 120, y_of(0));
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    doc.line(left - 10, y_of(v), left - 6, y_of(v));
    doc.text(left - 12, y_of(v) + 4, svg::num(v), "end", 9);
  }
  for (std::size_t r = 0; r < rois.size(); ++r) {
    const double gx = left + group_w * static_cast<double>(r);
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      auto ti = means.find(tasks[t]);
      if (ti == means.end()) continue;
      auto ri = ti->second.find(rois[r]);
      if (ri == ti->second.end()) continue;
      const double v = ri->second;
      const double x = gx + bar * static_cast<double>(t);
      doc.rect(x, std::min(y_of(v), y_of(0)), bar - 1, std::abs(y_of(v) - y_of(0)),
               kTaskPalette[t % kTaskPalette.size()]);
    }
    doc.text(gx + (group_w - group_gap) / 2, top + plot_h + 16, rois[r], "end", 10, -35);
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const double y = top + 14.0 * static_cast<double>(t);
    doc.rect(width - 110, y, 10, 10, kTaskPalette[t % kTaskPalette.size()]);
    doc.text(width - 95, y + 9, tasks[t], "start", 10);
  }
  return doc.str();
}

}  // namespace

std::vector<RunPlan::Unit> RunPlan::units() const {
  std::vector<Unit> out;
  for (const auto* t : tasks) {
    for (const auto* s : subjects) {
      for (const auto& r : s->rois) {
        if (std::find(rois.begin(), rois.end(), r.roi.name) != rois.end()) out.push_back({t, s, &r});
      }
    }
  }
  return out;
}

RunPlan make_plan(Manifest manifest, const Filters& filters, fs::path output_dir) {
  RunPlan plan;
  plan.manifest = std::move(manifest);
  plan.config = plan.manifest.defaults;
  plan.output_dir = std::move(output_dir);

  auto check_tokens = [](const std::vector<std::string>& tokens, auto&& known, const char* what) {
    for (const auto& tok : tokens) {
      if (!known(tok)) fail(ErrorKind::kFilterEmpty, std::string(what) + " filter '" + tok + "' matches nothing");
    }
  };
  auto wanted = [](const std::vector<std::string>& tokens, const std::string& v) {
    return tokens.empty() || std::find(tokens.begin(), tokens.end(), v) != tokens.end();
  };

  const Manifest& m = plan.manifest;
  check_tokens(filters.tasks, [&](const std::string& t) {
    auto code = parse_task_code(t);
    return code && m.find_task(*code);
  }, "task");
  check_tokens(filters.subjects, [&](const std::string& s) { return m.find_subject(s) != nullptr; }, "subject");
  check_tokens(filters.rois, [&](const std::string& r) {
    for (const auto& s : m.subjects) {
      for (const auto& e : s.rois) {
        if (e.roi.name == r) return true;
      }
    }
    return false;
  }, "roi");

  for (const auto& t : m.tasks) {
    if (wanted(filters.tasks, std::string(t.task.code_string()))) plan.tasks.push_back(&t);
  }
  for (const auto& s : m.subjects) {
    if (wanted(filters.subjects, s.subject_id)) plan.subjects.push_back(&s);
  }
  for (const auto* s : plan.subjects) {
    for (const auto& r : s->rois) {
      if (wanted(filters.rois, r.roi.name) &&
          std::find(plan.rois.begin(), plan.rois.end(), r.roi.name) == plan.rois.end()) {
        plan.rois.push_back(r.roi.name);
      }
    }
  }
  if (plan.tasks.empty()) fail(ErrorKind::kFilterEmpty, "no tasks selected");
  if (plan.subjects.empty()) fail(ErrorKind::kFilterEmpty, "no subjects selected");
  if (plan.rois.empty()) fail(ErrorKind::kFilterEmpty, "no ROIs selected");
  return plan;
}

fs::path run_predictions_path(const RunPlan& plan, const RunPlan::Unit& u) {
  return plan.output_dir / "runs" / std::string(u.task->task.code_string()) / u.subject->subject_id /
         (u.roi->roi.name + ".predictions.npy");
}

fs::path metrics_csv_path(const RunPlan& plan) { return plan.output_dir / "metrics" / "metrics.csv"; }

StageSummary cmd_encode(const RunPlan& plan) {
  StageSummary summary;
  OutputWriter out(plan, "encode", encoding_config_json(plan.config));
  const auto all_units = plan.units();
  std::size_t done = 0;
  for (const auto* task : plan.tasks) {
    std::vector<RunPlan::Unit> units;
    for (const auto& u : all_units) {
      if (u.task == task) units.push_back(u);
    }
    const std::string task_name(task->task.code_string());
    const FeatureMatrix features = with_context(task_name, [&] { return load_features(plan.manifest, *task); });
    const auto feature_input = out.input(task->feature_path);
    const encoder::CrossValidatedDesign design = with_context(task_name, [&] {
      return encoder::CrossValidatedDesign(features.values(), plan.config, plan.threads);
    });

    std::vector<fs::path> written(units.size());
    parallel_for(units.size(), plan.threads, [&](std::size_t i) {
      const auto& u = units[i];
      with_context(unit_name(u), [&] {
        const ResponseMatrix responses = load_responses(plan.manifest, *u.subject, *u.roi);
        const PairedDataset pair = validate_pairing(features, responses);
        const auto run = encoder::run_encoding(design, pair, plan.save_weights);

        const fs::path pred_path = run_predictions_path(plan, u);
        const std::vector<SidecarInput> inputs{out.manifest_input(), feature_input,
                                               out.input(u.roi->response_path)};
        Json notes;
        notes["task"] = task_name;
        notes["subject"] = u.subject->subject_id;
        notes["roi"] = u.roi->roi.name;
        notes["shape"] = {run.predictions.rows(), run.predictions.cols()};
        notes["fold_sizes"] = run.folds.fold_sizes();
        notes["fold_of_sample"] = run.folds.fold_of_sample;
        out.array(pred_path, run.predictions, inputs, notes);
        if (plan.save_weights) {
          for (const auto& model : run.models) {
            const std::string stem = u.roi->roi.name + ".fold" + std::to_string(model.fold_id);
            Json wnotes = notes;
            wnotes["fold_id"] = model.fold_id;
            wnotes["units"] = plan.config.standardize == Standardize::kTrainFoldZScore
                                  ? "standardised" : "raw";
            out.array(pred_path.parent_path() / (stem + ".weights.npy"), model.weights, inputs, wnotes);
            out.array(pred_path.parent_path() / (stem + ".intercept.npy"), row_vector(model.intercept),
                      inputs, wnotes);
          }
        }
        written[i] = pred_path;
        return 0;
      });
      log(plan, "[encode] " + unit_name(u));
    });
    done += units.size();
    for (auto& p : written) summary.files.push_back(std::move(p));
  }
  summary.units = done;
  return summary;
}

StageSummary cmd_evaluate(const RunPlan& plan) {
  StageSummary summary;
  OutputWriter out(plan, "evaluate", encoding_config_json(plan.config));
  const auto units = plan.units();
  for (const auto& u : units) require_upstream(run_predictions_path(plan, u), "encode");

  std::vector<std::optional<metrics::MetricReport>> reports(units.size());
  parallel_for(units.size(), plan.threads, [&](std::size_t i) {
    const auto& u = units[i];
    with_context(unit_name(u), [&] {
      const ResponseMatrix responses = load_responses(plan.manifest, *u.subject, *u.roi);
      const fs::path pred_path = run_predictions_path(plan, u);
      const Matrix predictions = read_array(pred_path);
      auto report = metrics::evaluate(u.task->task, u.subject->subject_id, u.roi->roi,
                                      responses.values(), predictions, plan.config.pc_mode);
      const std::vector<SidecarInput> inputs{out.input(pred_path), out.input(u.roi->response_path)};
      Json notes;
      notes["task"] = u.task->task.code_string();
      notes["subject"] = u.subject->subject_id;
      notes["roi"] = u.roi->roi.name;
      out.array(voxel_score_path(plan, u, "pearson"), row_vector(report.per_voxel_pearson), inputs, notes);
      out.array(voxel_score_path(plan, u, "mae"), row_vector(report.per_voxel_mae), inputs, notes);
      out.array(voxel_score_path(plan, u, "meanpred"),
                row_vector(predictions.colwise().mean().transpose()), inputs, notes);
      reports[i] = std::move(report);
      return 0;
    });
    log(plan, "[evaluate] " + unit_name(u));
  });

  std::string csv = metrics::csv_header();
  Json all = Json::array();
  std::vector<SidecarInput> inputs;
  for (std::size_t i = 0; i < units.size(); ++i) {
    csv += metrics::to_csv_rows(*reports[i], plan.manifest.dataset_id);
    all.push_back(metrics::to_json(*reports[i], plan.manifest.dataset_id));
    inputs.push_back(out.input(run_predictions_path(plan, units[i])));
  }
  const fs::path csv_path = metrics_csv_path(plan);
  out.text(csv_path, csv, inputs);
  const fs::path json_path = plan.output_dir / "metrics" / "metrics.json";
  out.text(json_path, all.dump(2) + "\n", inputs);
  summary.units = units.size();
  summary.files = {csv_path, json_path};
  return summary;
}

StageSummary cmd_stats(const RunPlan& plan) {
  StageSummary summary;
  Json config;
  config["test"] = "one-way ANOVA over subject values, pairwise two-group ANOVA";
  config["correction"] = "bonferroni";
  config["correction_family"] = plan.correction_family ? Json(*plan.correction_family) : Json("pairs-per-roi");
  config["include_baseline"] = plan.stats_include_baseline;
  OutputWriter out(plan, "stats", config);
  const auto idx = index_metrics(read_metrics(plan));
  const SidecarInput metrics_input = out.input(metrics_csv_path(plan));

  std::vector<const TaskEntry*> tasks;
  for (const auto* t : plan.tasks) {
    if (plan.stats_include_baseline || !t->task.is_baseline()) tasks.push_back(t);
  }
  if (tasks.size() < 2) fail(ErrorKind::kFilterEmpty, "stats need at least two non-baseline tasks");

  std::string main_csv = "roi,metric,F,df_between,df_within,p_value\n";
  for (const auto& roi : plan.rois) {
    for (const char* metric : kMetricNames) {
      stats::TaskValues values;
      for (const auto* t : tasks) {
        std::vector<double> v;
        const std::string code(t->task.code_string());
        auto mi = idx.find(metric);
        for (const auto* s : plan.subjects) {
          if (mi == idx.end()) break;
          auto ri = mi->second.find(roi);
          if (ri == mi->second.end()) continue;
          auto ti = ri->second.find(code);
          if (ti == ri->second.end()) continue;
          auto si = ti->second.find(s->subject_id);
          if (si != ti->second.end()) v.push_back(si->second);
        }
        if (v.empty()) {
          fail(ErrorKind::kMissingUpstream, "no " + std::string(metric) + " values for " + code + "/" +
                                                roi + "; run `neurotask evaluate` first");
        }
        values.emplace_back(t->task, std::move(v));
      }
      const std::string context = roi + "/" + metric;
      std::vector<std::vector<double>> groups;
      for (const auto& [task, v] : values) groups.push_back(v);
      const auto anova = with_context(context, [&] { return stats::one_way_anova(groups); });
      main_csv += csv_escape(roi) + "," + metric + "," + format_double(anova.f_stat) + "," +
                  std::to_string(anova.df_between) + "," + std::to_string(anova.df_within) + "," +
                  format_double(anova.p_value) + "\n";
      const auto table = with_context(context, [&] { return stats::pairwise_posthoc(values, plan.correction_family); });
      const fs::path pair_path = plan.output_dir / "stats" / ("pairwise_" + std::string(metric) + "_" + roi + ".csv");
      Json notes;
      notes["roi"] = roi;
      notes["metric"] = metric;
      notes["family_m"] = table.family_m;
      out.text(pair_path, stats::pairwise_csv(table), {metrics_input}, notes);
      summary.files.push_back(pair_path);
    }
  }
  const fs::path main_path = plan.output_dir / "stats" / "main_effects.csv";
  out.text(main_path, main_csv, {metrics_input});
  summary.files.insert(summary.files.begin(), main_path);
  summary.units = plan.rois.size();
  return summary;
}

StageSummary cmd_similarity(const RunPlan& plan) {
  using taskonomy::SimilarityMode;
  StageSummary summary;
  Json config;
  config["similarity_mode"] = taskonomy::to_string(plan.similarity_mode);
  config["linkage"] = taskonomy::to_string(plan.linkage);
  config["distance"] = "1 - similarity";
  config["subject_aggregation"] = "elementwise mean of per-subject matrices";
  OutputWriter out(plan, "similarity", config);
  const fs::path dir = plan.output_dir / "similarity" / std::string(taskonomy::to_string(plan.similarity_mode));

  taskonomy::TaskSimilarity group;
  std::vector<SidecarInput> inputs;
  if (plan.similarity_mode == SimilarityMode::kRepresentationRsa) {
    std::vector<FeatureMatrix> features;
    features.reserve(plan.tasks.size());
    for (const auto* t : plan.tasks) {
      features.push_back(load_features(plan.manifest, *t));
      inputs.push_back(out.input(t->feature_path));
    }
    std::vector<const FeatureMatrix*> ptrs;
    for (const auto& f : features) ptrs.push_back(&f);
    group = taskonomy::representation_similarity(ptrs);
  } else {
    const std::string_view score = plan.similarity_mode == SimilarityMode::kPredictionScore ? "pearson" : "meanpred";
    std::vector<taskonomy::TaskSimilarity> per_subject(plan.subjects.size());
    std::vector<std::vector<SidecarInput>> subject_inputs(plan.subjects.size());
    parallel_for(plan.subjects.size(), plan.threads, [&](std::size_t si) {
      const auto* subject = plan.subjects[si];
      taskonomy::TaskScores scores;
      for (const auto* t : plan.tasks) {
        std::vector<Vector> parts;
        Eigen::Index total = 0;
        for (const auto& r : subject->rois) {
          if (std::find(plan.rois.begin(), plan.rois.end(), r.roi.name) == plan.rois.end()) continue;
          const fs::path p = voxel_score_path(plan, {t, subject, &r}, score);
          require_upstream(p, "evaluate");
          parts.push_back(read_row_vector(p));
          subject_inputs[si].push_back(out.input(p));
          total += parts.back().size();
        }
        Vector all(total);
        Eigen::Index off = 0;
        for (const auto& part : parts) {
          all.segment(off, part.size()) = part;
          off += part.size();
        }
        scores.emplace_back(t->task, std::move(all));
      }
      per_subject[si] = with_context(subject->subject_id, [&] {
        return taskonomy::prediction_similarity(scores, plan.similarity_mode);
      });
    });
    for (std::size_t si = 0; si < plan.subjects.size(); ++si) {
      const fs::path p = dir / "subjects" / (plan.subjects[si]->subject_id + ".csv");
      Json notes;
      notes["subject"] = plan.subjects[si]->subject_id;
      out.text(p, taskonomy::similarity_csv(per_subject[si]), subject_inputs[si], notes);
      summary.files.push_back(p);
      inputs.insert(inputs.end(), subject_inputs[si].begin(), subject_inputs[si].end());
    }
    group = taskonomy::average_similarity(per_subject);
  }

  const auto tree = taskonomy::cluster(group, plan.linkage);
  const std::string title = plan.manifest.dataset_id + " " + std::string(taskonomy::to_string(plan.similarity_mode));
  const std::vector<std::pair<std::string, std::string>> files = {
      {"similarity.csv", taskonomy::similarity_csv(group)},
      {"heatmap.svg", taskonomy::heatmap_svg(group, title)},
      {"dendrogram.nwk", taskonomy::to_newick(tree) + "\n"},
      {"dendrogram.json", taskonomy::to_json(tree).dump(2) + "\n"},
      {"dendrogram.svg", taskonomy::dendrogram_svg(tree, title)},
  };
  for (const auto& [name, content] : files) {
    out.text(dir / name, content, inputs);
    summary.files.push_back(dir / name);
  }
  summary.units = plan.tasks.size();
  return summary;
}

StageSummary cmd_report(const RunPlan& plan) {
  StageSummary summary;
  Json config;
  config["aggregation"] = "mean across subjects per (task, roi)";
  OutputWriter out(plan, "report", config);
  const auto idx = index_metrics(read_metrics(plan));
  const SidecarInput metrics_input = out.input(metrics_csv_path(plan));

  std::vector<std::string> tasks;
  for (const auto* t : plan.tasks) tasks.emplace_back(t->task.code_string());
  std::string csv = "task,roi,metric,mean,subjects\n";
  for (const char* metric : kMetricNames) {
    std::map<std::string, std::map<std::string, double>> means;
    auto mi = idx.find(metric);
    if (mi == idx.end()) fail(ErrorKind::kMissingUpstream, std::string("no ") + metric + " values; run `neurotask evaluate` first");
    for (const auto& task : tasks) {
      for (const auto& roi : plan.rois) {
        auto ri = mi->second.find(roi);
        if (ri == mi->second.end()) continue;
        auto ti = ri->second.find(task);
        if (ti == ri->second.end()) continue;
        double total = 0.0;
        std::size_t n = 0;
        for (const auto* s : plan.subjects) {
          auto si = ti->second.find(s->subject_id);
          if (si == ti->second.end()) continue;
          total += si->second;
          ++n;
        }
        if (n == 0) continue;
        const double mean = total / static_cast<double>(n);
        means[task][roi] = mean;
        csv += task + "," + csv_escape(roi) + "," + metric + "," + format_double(mean) + "," +
               std::to_string(n) + "\n";
      }
    }
    if (std::string_view(metric) == "mae") continue;
    const fs::path svg_path = plan.output_dir / "report" / ("bar_" + std::string(metric) + ".svg");
    const std::string title = plan.manifest.dataset_id + ": mean " + metric + " across subjects";
    out.text(svg_path, bar_chart_svg(title, plan.rois, tasks, means), {metrics_input});
    summary.files.push_back(svg_path);
  }
  const fs::path csv_path = plan.output_dir / "report" / "mean_metrics.csv";
  out.text(csv_path, csv, {metrics_input});
  summary.files.insert(summary.files.begin(), csv_path);
  summary.units = tasks.size() * plan.rois.size();
  return summary;
}

StageSummary cmd_brainmap(const RunPlan& plan) {
  StageSummary summary;
  const std::string metric(brainmap::to_string(plan.brainmap_metric));
  Json config;
  config["metric"] = metric;
  OutputWriter out(plan, "brainmap", config);
  const fs::path dir = plan.output_dir / "brainmap" / metric;
  for (const auto* t : plan.tasks) {
    for (const auto* s : plan.subjects) {
      std::vector<brainmap::RoiScores> rois;
      std::vector<SidecarInput> inputs;
      for (const auto& r : s->rois) {
        if (std::find(plan.rois.begin(), plan.rois.end(), r.roi.name) == plan.rois.end()) continue;
        const fs::path p = voxel_score_path(plan, {t, s, &r}, metric);
        require_upstream(p, "evaluate");
        rois.push_back({r.roi, read_row_vector(p)});
        inputs.push_back(out.input(p));
      }
      if (rois.empty()) continue;
      const std::string stem = std::string(t->task.code_string()) + "__" + s->subject_id;
      const auto table = with_context(stem, [&] {
        return brainmap::export_voxel_scores(t->task, s->subject_id, rois, plan.brainmap_metric);
      });
      Json notes;
      notes["task"] = t->task.code_string();
      notes["subject"] = s->subject_id;
      notes["rows"] = table.rows.size();
      out.text(dir / (stem + ".csv"), brainmap::to_csv(table), inputs, notes);
      out.text(dir / (stem + ".summary.csv"), brainmap::summary_csv(table), inputs, notes);
      out.array(dir / (stem + ".npy"), row_vector(table.scores()), inputs, notes);
      summary.files.push_back(dir / (stem + ".csv"));
      ++summary.units;
    }
  }
  return summary;
}

namespace {

struct RoiTemplate {
  const char* name;
  Hemisphere hemisphere;
  std::size_t voxels;
};

// Voxel counts of the reading corpus (first subject) and the listening corpus.
const std::vector<RoiTemplate> kReadingRois = {
    {"Language_LH", Hemisphere::kLeft, 5265},  {"Language_RH", Hemisphere::kRight, 6172},
    {"Vision_Body", Hemisphere::kNA, 3774},    {"Vision_Face", Hemisphere::kNA, 4963},
    {"Vision_Object", Hemisphere::kNA, 8085},  {"Vision_Scene", Hemisphere::kNA, 4141},
    {"Vision", Hemisphere::kNA, 12829},        {"DMN", Hemisphere::kNA, 17190},
    {"TP", Hemisphere::kNA, 35120}};
const std::vector<std::vector<std::size_t>> kReadingCounts = {
    {5265, 6172, 3774, 4963, 8085, 4141, 12829, 17190, 35120},
    {4930, 5861, 3873, 4782, 7552, 3173, 11729, 15070, 30594},
    {5906, 5401, 3867, 4803, 7812, 3602, 12278, 18011, 34024},
    {5629, 5001, 4190, 4993, 8617, 3721, 12454, 17020, 30408},
    {5315, 6141, 4112, 4941, 8323, 3496, 12383, 15995, 31610}};
const std::vector<std::string> kReadingSubjects = {"P01", "M02", "M04", "M07", "M15"};
const std::vector<RoiTemplate> kListeningRois = {
    {"EAC_L", Hemisphere::kLeft, 808},   {"EAC_R", Hemisphere::kRight, 638},
    {"AAC_L", Hemisphere::kLeft, 1420},  {"AAC_R", Hemisphere::kRight, 1493},
    {"PMC_L", Hemisphere::kLeft, 1198},  {"PMC_R", Hemisphere::kRight, 1204},
    {"TPOJ_L", Hemisphere::kLeft, 847},  {"TPOJ_R", Hemisphere::kRight, 1188},
    {"DFL_L", Hemisphere::kLeft, 1061},  {"DFL_R", Hemisphere::kRight, 875}};

// Box-Muller over mt19937_64, so synthetic data is identical across
// standard-library implementations.
class Normal {
 public:
  explicit Normal(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (*this)();
    return m;
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

fs::path synthesize_dataset(const SynthSpec& spec, const fs::path& dir) {
  const bool reading = spec.shape == SynthSpec::Shape::kReading;
  const std::size_t n = spec.samples ? spec.samples : (reading ? 627 : 259);
  const std::size_t n_subjects = spec.subjects ? spec.subjects : (reading ? 5 : 82);
  if (spec.dim == 0 || n < 3 || !(spec.voxel_scale > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "synthetic dataset needs dim >= 1, samples >= 3, voxel_scale > 0");
  }
  constexpr Eigen::Index kLatent = 16;
  Normal normal(spec.seed);
  const Matrix latent = normal.matrix(static_cast<Eigen::Index>(n), kLatent);

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = (reading ? "sent" : "tr") + std::to_string(i);
  fs::create_directories(dir / "features");
  fs::create_directories(dir / "responses");
  write_sample_ids(ids, dir / "sample_ids.txt");

  Json manifest;
  manifest["dataset_id"] = reading ? "synthetic-reading" : "synthetic-listening";
  manifest["sample_ids_path"] = "sample_ids.txt";

  // Tasks see the latent stimulus structure through different amounts of
  // noise, so their encoding quality differs.
  auto& tasks = manifest["tasks"] = Json::array();
  std::size_t task_index = 0;
  for (TaskCode code : kAllTaskCodes) {
    if (code == TaskCode::kBASE && !spec.include_baseline) continue;
    const Matrix mixing = normal.matrix(kLatent, static_cast<Eigen::Index>(spec.dim));
    const double noise = 1.0 + 1.5 * static_cast<double>(task_index++);
    Matrix x = latent * mixing + noise * normal.matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dim));
    const std::string file = "features/" + std::string(to_string(code)) + ".npy";
    write_array(x, dir / file);
    Json t;
    t["task"] = to_string(code);
    t["feature_path"] = file;
    t["dim"] = spec.dim;
    t["extraction"] = {{"synthetic", true}, {"noise", noise}};
    tasks.push_back(std::move(t));
  }

  const auto& templates = reading ? kReadingRois : kListeningRois;
  auto& subjects = manifest["subjects"] = Json::array();
  Json full_counts = Json::object();
  for (std::size_t s = 0; s < n_subjects; ++s) {
    const std::string sid = reading && s < kReadingSubjects.size() ? kReadingSubjects[s]
                                                                   : "sub-" + std::to_string(s + 1);
    Json subject;
    subject["subject_id"] = sid;
    auto& rois = subject["rois"] = Json::array();
    for (std::size_t r = 0; r < templates.size(); ++r) {
      const std::size_t full = reading ? kReadingCounts[s % kReadingCounts.size()][r] : templates[r].voxels;
      const auto voxels = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(full) * spec.voxel_scale)));
      full_counts[sid][templates[r].name] = full;
      const Matrix loading = normal.matrix(kLatent, static_cast<Eigen::Index>(voxels));
      Matrix y = latent * loading + 8.0 * normal.matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(voxels));
      const std::string file = "responses/" + sid + "__" + templates[r].name + ".npy";
      write_array(y, dir / file);
      Json roi;
      roi["name"] = templates[r].name;
      roi["hemisphere"] = to_string(templates[r].hemisphere);
      roi["voxel_count"] = voxels;
      roi["atlas"] = reading ? "AAL" : "Glasser";
      roi["response_path"] = file;
      rois.push_back(std::move(roi));
    }
    subjects.push_back(std::move(subject));
  }
  manifest["defaults"] = {{"lambda", 1.0}, {"k_folds", 10}, {"standardize", "zscore"},
                          {"pc_mode", "per-sample"}, {"fold_scheme", "contiguous"}, {"seed", 0}};
  manifest["notes"] = {{"synthetic", true},
                       {"seed", spec.seed},
                       {"voxel_scale", spec.voxel_scale},
                       {"reduced_voxel_counts", spec.voxel_scale != 1.0},
                       {"full_voxel_counts", full_counts}};
  const fs::path path = dir / "manifest.json";
  write_text_file(path, manifest.dump(2) + "\n");
  return path;
}

}  // namespace neurotask::pipeline
