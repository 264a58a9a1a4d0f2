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

#include <set>
#include <utility>

#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/ingest.hpp"

namespace neurotask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// JSON accessor that remembers where it is, so schema errors can name the
// exact field.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return value_; }

  [[noreturn]] void violation(const std::string& what) const {
    fail(ErrorKind::kSchemaViolation, (path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  bool has(const char* key) const { return value_.is_object() && value_.contains(key); }

  Node at(const char* key) const {
    if (!value_.is_object()) violation("expected an object");
    auto it = value_.find(key);
    if (it == value_.end()) child_path_violation(key, "is required");
    return Node(*it, join(key));
  }

  std::vector<Node> items() const {
    if (!value_.is_array()) violation("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  std::string str() const {
    if (!value_.is_string()) violation("expected a string");
    return value_.get<std::string>();
  }

  std::size_t positive_int() const {
    if (!value_.is_number_integer()) violation("expected an integer");
    const auto v = value_.get<std::int64_t>();
    if (v < 1) violation("must be >= 1");
    return static_cast<std::size_t>(v);
  }

  double number() const {
    if (!value_.is_number()) violation("expected a number");
    return value_.get<double>();
  }

 private:
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void child_path_violation(const char* key, const std::string& what) const {
    fail(ErrorKind::kSchemaViolation, join(key) + ": " + what);
  }

  const json& value_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path existing(const Node& node, const fs::path& base) {
  fs::path p = resolve(base, node.str());
  if (!fs::exists(p)) {
    fail(ErrorKind::kMissingFile, node.path() + ": '" + p.string() + "' does not exist");
  }
  return p;
}

EncodingConfig parse_defaults(const Node& node) {
  EncodingConfig cfg;
  if (!node.raw().is_object()) node.violation("expected an object");
  if (node.has("lambda")) {
    cfg.lambda = node.at("lambda").number();
    if (!(cfg.lambda >= 0.0)) node.at("lambda").violation("must be >= 0");
  }
  if (node.has("k_folds")) {
    cfg.k_folds = node.at("k_folds").positive_int();
    if (cfg.k_folds < 2) node.at("k_folds").violation("must be >= 2");
  }
  if (node.has("standardize")) {
    auto v = parse_standardize(node.at("standardize").str());
    if (!v) node.at("standardize").violation("expected 'zscore' or 'none'");
    cfg.standardize = *v;
  }
  if (node.has("pc_mode")) {
    auto v = parse_pc_mode(node.at("pc_mode").str());
    if (!v) node.at("pc_mode").violation("expected 'per-sample' or 'per-voxel'");
    cfg.pc_mode = *v;
  }
  if (node.has("fold_scheme")) {
    auto v = parse_fold_scheme(node.at("fold_scheme").str());
    if (!v) node.at("fold_scheme").violation("expected 'contiguous' or 'shuffled'");
    cfg.fold_scheme = *v;
  }
  if (node.has("seed")) {
    const auto& raw = node.at("seed").raw();
    if (!raw.is_number_integer() || raw.get<std::int64_t>() < 0) {
      node.at("seed").violation("expected a nonnegative integer");
    }
    cfg.seed = raw.get<std::uint64_t>();
  }
  return cfg;
}

TaskEntry parse_task(const Node& node, const fs::path& base) {
  // A task may point at a fragment emitted by the feature extractor instead
  // of listing its fields inline.
  if (node.has("fragment")) {
    const fs::path fragment_path = existing(node.at("fragment"), base);
    json fragment;
    try {
      fragment = json::parse(read_text_file(fragment_path));
    } catch (const json::parse_error& e) {
      fail(ErrorKind::kParseError, fragment_path.string() + ": " + e.what());
    }
    Node f(fragment, node.path() + "<" + fragment_path.filename().string() + ">");
    TaskEntry t;
    t.task = TaskId::parse(f.at("task").str());
    t.dim = f.at("dim").positive_int();
    t.feature_path = existing(f.at("path"), fragment_path.parent_path());
    if (f.has("sample_ids_path")) {
      t.sample_ids_path = existing(f.at("sample_ids_path"), fragment_path.parent_path());
    }
    if (f.has("extraction")) t.extraction = f.at("extraction").raw();
    return t;
  }
  TaskEntry t;
  const Node code = node.at("task");
  if (!parse_task_code(code.str())) code.violation("unknown task code '" + code.str() + "'");
  t.task = TaskId::parse(code.str(), node.has("display_name") ? node.at("display_name").str() : "");
  t.feature_path = existing(node.at("feature_path"), base);
  t.dim = node.at("dim").positive_int();
  if (node.has("sample_ids_path")) t.sample_ids_path = existing(node.at("sample_ids_path"), base);
  if (node.has("extraction")) t.extraction = node.at("extraction").raw();
  return t;
}

RoiEntry parse_roi(const Node& node, const fs::path& base) {
  RoiEntry e;
  e.roi.name = node.at("name").str();
  if (e.roi.name.empty()) node.at("name").violation("must not be empty");
  if (node.has("hemisphere")) {
    auto h = parse_hemisphere(node.at("hemisphere").str());
    if (!h) node.at("hemisphere").violation("expected 'L', 'R' or 'NA'");
    e.roi.hemisphere = *h;
  }
  e.roi.voxel_count = node.at("voxel_count").positive_int();
  if (node.has("atlas")) e.roi.atlas = node.at("atlas").str();
  if (node.has("atlas_label_ids")) {
    std::vector<std::int64_t> labels;
    for (const auto& item : node.at("atlas_label_ids").items()) {
      if (!item.raw().is_number_integer()) item.violation("expected an integer");
      labels.push_back(item.raw().get<std::int64_t>());
    }
    e.roi.atlas_label_ids = std::move(labels);
  } else if (node.has("atlas_labels_path")) {
    const fs::path p = existing(node.at("atlas_labels_path"), base);
    std::vector<std::int64_t> labels;
    for (const auto& tok : read_sample_ids(p)) {
      labels.push_back(static_cast<std::int64_t>(parse_double(tok)));
    }
    e.roi.atlas_label_ids = std::move(labels);
  }
  if (e.roi.atlas_label_ids && e.roi.atlas_label_ids->size() != e.roi.voxel_count) {
    node.violation("atlas labels list " + std::to_string(e.roi.atlas_label_ids->size()) +
                   " entries for " + std::to_string(e.roi.voxel_count) + " voxels");
  }
  e.response_path = existing(node.at("response_path"), base);
  if (node.has("sample_ids_path")) e.sample_ids_path = existing(node.at("sample_ids_path"), base);
  return e;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  std::error_code ec;
  fs::path rel = fs::relative(p, base, ec);
  return (ec || rel.empty()) ? p.generic_string() : rel.generic_string();
}

}  // namespace

std::size_t Manifest::response_count() const {
  std::size_t n = 0;
  for (const auto& s : subjects) n += s.rois.size();
  return n;
}

const TaskEntry* Manifest::find_task(TaskCode code) const {
  for (const auto& t : tasks) {
    if (t.task.code == code) return &t;
  }
  return nullptr;
}

const SubjectEntry* Manifest::find_subject(std::string_view id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == id) return &s;
  }
  return nullptr;
}

Manifest parse_manifest(const json& doc, const fs::path& base_dir) {
  Node root(doc, "");
  if (!doc.is_object()) root.violation("expected an object");
  Manifest m;
  m.base_dir = base_dir;
  m.dataset_id = root.at("dataset_id").str();
  if (root.has("sample_ids_path")) m.sample_ids_path = existing(root.at("sample_ids_path"), base_dir);
  if (root.has("defaults")) m.defaults = parse_defaults(root.at("defaults"));
  if (root.has("notes")) m.notes = root.at("notes").raw();

  const auto subjects = root.at("subjects").items();
  if (subjects.empty()) root.at("subjects").violation("must list at least one subject");
  std::set<std::pair<std::string, std::string>> seen_units;
  for (const auto& s : subjects) {
    SubjectEntry entry;
    entry.subject_id = s.at("subject_id").str();
    if (entry.subject_id.empty()) s.at("subject_id").violation("must not be empty");
    const auto rois = s.at("rois").items();
    if (rois.empty()) s.at("rois").violation("must list at least one ROI");
    for (const auto& r : rois) {
      RoiEntry roi = parse_roi(r, base_dir);
      if (!roi.sample_ids_path && !m.sample_ids_path) {
        r.violation("no sample_ids_path here or at the top level");
      }
      if (!seen_units.emplace(entry.subject_id, roi.roi.name).second) {
        r.violation("duplicate (subject, roi) entry (" + entry.subject_id + ", " + roi.roi.name + ")");
      }
      entry.rois.push_back(std::move(roi));
    }
    m.subjects.push_back(std::move(entry));
  }

  const auto tasks = root.at("tasks").items();
  if (tasks.empty()) root.at("tasks").violation("must list at least one task");
  std::set<TaskCode> seen_tasks;
  for (const auto& t : tasks) {
    TaskEntry entry = parse_task(t, base_dir);
    if (!entry.sample_ids_path && !m.sample_ids_path) {
      t.violation("no sample_ids_path here or at the top level");
    }
    if (!seen_tasks.insert(entry.task.code).second) {
      t.violation("duplicate task '" + std::string(entry.task.code_string()) + "'");
    }
    m.tasks.push_back(std::move(entry));
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::kMissingFile, "manifest '" + path.string() + "' not found");
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

nlohmann::ordered_json manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json doc;
  doc["dataset_id"] = m.dataset_id;
  if (m.sample_ids_path) doc["sample_ids_path"] = relative_to(*m.sample_ids_path, m.base_dir);
  auto& subjects = doc["subjects"] = nlohmann::ordered_json::array();
  for (const auto& s : m.subjects) {
    nlohmann::ordered_json sj;
    sj["subject_id"] = s.subject_id;
    auto& rois = sj["rois"] = nlohmann::ordered_json::array();
    for (const auto& r : s.rois) {
      nlohmann::ordered_json rj;
      rj["name"] = r.roi.name;
      rj["hemisphere"] = to_string(r.roi.hemisphere);
      rj["voxel_count"] = r.roi.voxel_count;
      rj["atlas"] = r.roi.atlas;
      if (r.roi.atlas_label_ids) rj["atlas_label_ids"] = *r.roi.atlas_label_ids;
      rj["response_path"] = relative_to(r.response_path, m.base_dir);
      if (r.sample_ids_path) rj["sample_ids_path"] = relative_to(*r.sample_ids_path, m.base_dir);
      rois.push_back(std::move(rj));
    }
    subjects.push_back(std::move(sj));
  }
  auto& tasks = doc["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : m.tasks) {
    nlohmann::ordered_json tj;
    tj["task"] = t.task.code_string();
    tj["display_name"] = t.task.display_name;
    tj["feature_path"] = relative_to(t.feature_path, m.base_dir);
    tj["dim"] = t.dim;
    if (t.sample_ids_path) tj["sample_ids_path"] = relative_to(*t.sample_ids_path, m.base_dir);
    if (!t.extraction.empty()) tj["extraction"] = t.extraction;
    tasks.push_back(std::move(tj));
  }
  auto& d = doc["defaults"];
  d["lambda"] = m.defaults.lambda;
  d["k_folds"] = m.defaults.k_folds;
  d["standardize"] = to_string(m.defaults.standardize);
  d["pc_mode"] = to_string(m.defaults.pc_mode);
  d["fold_scheme"] = to_string(m.defaults.fold_scheme);
  d["seed"] = m.defaults.seed;
  if (!m.notes.empty()) doc["notes"] = m.notes;
  return doc;
}

FeatureMatrix load_features(const Manifest& m, const TaskEntry& task) {
  Matrix values = read_array(task.feature_path);
  if (static_cast<std::size_t>(values.cols()) != task.dim) {
    fail(ErrorKind::kShapeMismatch, "task " + std::string(task.task.code_string()) + ": '" +
                                        task.feature_path.string() + "' has " +
                                        std::to_string(values.cols()) + " columns, manifest says dim " +
                                        std::to_string(task.dim));
  }
  auto ids = read_sample_ids(task.sample_ids_path ? *task.sample_ids_path : *m.sample_ids_path);
  return FeatureMatrix(task.task, std::move(values), std::move(ids), m.dataset_id);
}

ResponseMatrix load_responses(const Manifest& m, const SubjectEntry& subject, const RoiEntry& roi) {
  Matrix values = read_array(roi.response_path);
  auto ids = read_sample_ids(roi.sample_ids_path ? *roi.sample_ids_path : *m.sample_ids_path);
  return ResponseMatrix(subject.subject_id, roi.roi, std::move(values), std::move(ids));
}

}  // namespace neurotask
