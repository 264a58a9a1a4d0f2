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

#include "neurotask/taskonomy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/metrics.hpp"
#include "svg.hpp"

namespace neurotask::taskonomy {

std::string_view to_string(SimilarityMode m) noexcept {
  switch (m) {
    case SimilarityMode::kPredictionScore: return "prediction-score";
    case SimilarityMode::kPredictionValues: return "prediction-values";
    case SimilarityMode::kRepresentationRsa: return "representation-rsa";
  }
  return "?";
}

std::string_view to_string(Linkage l) noexcept {
  switch (l) {
    case Linkage::kAverage: return "average";
    case Linkage::kComplete: return "complete";
    case Linkage::kSingle: return "single";
  }
  return "?";
}

std::optional<SimilarityMode> parse_similarity_mode(std::string_view t) noexcept {
  for (auto m : {SimilarityMode::kPredictionScore, SimilarityMode::kPredictionValues,
                 SimilarityMode::kRepresentationRsa}) {
    if (to_string(m) == t) return m;
  }
  return std::nullopt;
}

std::optional<Linkage> parse_linkage(std::string_view t) noexcept {
  for (auto l : {Linkage::kAverage, Linkage::kComplete, Linkage::kSingle}) {
    if (to_string(l) == t) return l;
  }
  return std::nullopt;
}

namespace {

double correlation_or_throw(const Vector& a, const Vector& b, std::string_view what) {
  auto c = metrics::pearson({a.data(), static_cast<std::size_t>(a.size())},
                            {b.data(), static_cast<std::size_t>(b.size())});
  if (!c) fail(ErrorKind::kZeroVariance, std::string(what) + " has zero variance");
  return *c;
}

TaskSimilarity correlate_all(std::vector<TaskId> tasks, const std::vector<Vector>& vectors,
                             SimilarityMode mode) {
  const auto n = static_cast<Eigen::Index>(tasks.size());
  TaskSimilarity out{std::move(tasks), Eigen::MatrixXd::Identity(n, n), mode};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const std::string what = "score vector of " + std::string(out.tasks[i].code_string()) +
                               " or " + std::string(out.tasks[j].code_string());
      const double c = correlation_or_throw(vectors[i], vectors[j], what);
      out.matrix(i, j) = c;
      out.matrix(j, i) = c;
    }
  }
  return out;
}

}  // namespace

TaskSimilarity prediction_similarity(const TaskScores& per_task_scores, SimilarityMode mode) {
  if (per_task_scores.empty()) fail(ErrorKind::kEmptyInput, "no task scores");
  const auto len = per_task_scores.front().second.size();
  if (len < 3) fail(ErrorKind::kLengthMismatch, "score vectors need at least 3 voxels");
  std::vector<TaskId> tasks;
  std::vector<Vector> vectors;
  for (const auto& [task, scores] : per_task_scores) {
    if (scores.size() != len) {
      fail(ErrorKind::kLengthMismatch, "task " + std::string(task.code_string()) + " has " +
                                           std::to_string(scores.size()) + " voxel scores, expected " +
                                           std::to_string(len));
    }
    tasks.push_back(task);
    vectors.push_back(scores);
  }
  return correlate_all(std::move(tasks), vectors, mode);
}

Vector rsa_upper_triangle(const Matrix& features) {
  const Eigen::Index n = features.rows();
  if (n < 3) fail(ErrorKind::kTooFewSamples, "RSA needs at least 3 samples");
  // Rows centred and scaled to unit norm: their dot products are the
  // sample-by-sample Pearson correlations.
  Matrix z = features;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = z.row(i).mean();
    z.row(i).array() -= mean;
    const double norm = z.row(i).norm();
    if (!(norm > 0.0)) {
      fail(ErrorKind::kZeroVariance, "representation of sample " + std::to_string(i) + " is constant");
    }
    z.row(i) /= norm;
  }
  const Matrix corr = z * z.transpose();
  Vector upper(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) upper(k++) = corr(i, j);
  }
  return upper;
}

TaskSimilarity representation_similarity(const std::vector<const FeatureMatrix*>& per_task_features) {
  if (per_task_features.empty()) fail(ErrorKind::kEmptyInput, "no feature matrices");
  const auto& ids = per_task_features.front()->sample_ids();
  std::vector<TaskId> tasks;
  std::vector<Vector> triangles;
  for (const FeatureMatrix* f : per_task_features) {
    if (f->sample_ids() != ids) {
      fail(ErrorKind::kMismatchedSamples, "task " + std::string(f->task().code_string()) +
                                              " was extracted for a different stimulus set");
    }
    tasks.push_back(f->task());
    triangles.push_back(rsa_upper_triangle(f->values()));
  }
  return correlate_all(std::move(tasks), triangles, SimilarityMode::kRepresentationRsa);
}

TaskSimilarity average_similarity(const std::vector<TaskSimilarity>& items) {
  if (items.empty()) fail(ErrorKind::kEmptyInput, "nothing to average");
  TaskSimilarity out = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].tasks != out.tasks) fail(ErrorKind::kShapeMismatch, "task lists differ");
    out.matrix += items[i].matrix;
  }
  out.matrix /= static_cast<double>(items.size());
  // Restore exact symmetry and the unit diagonal after summation.
  out.matrix = (0.5 * (out.matrix + out.matrix.transpose())).eval();
  out.matrix.diagonal().setOnes();
  return out;
}

Dendrogram agglomerate(const Eigen::MatrixXd& distances, std::vector<std::string> labels,
                       Linkage linkage) {
  const auto n = static_cast<std::size_t>(distances.rows());
  if (n == 0) fail(ErrorKind::kEmptyInput, "no items to cluster");
  if (distances.cols() != distances.rows() || labels.size() != n) {
    fail(ErrorKind::kShapeMismatch, "distance matrix and labels disagree");
  }
  Dendrogram out;
  out.leaves = std::move(labels);
  out.linkage = linkage;

  // Slot i holds the cluster whose smallest leaf index is i, so scanning
  // slot pairs in lexicographic order applies the tie-break directly.
  Eigen::MatrixXd d = distances;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> node(n);
  std::vector<std::size_t> size(n, 1);
  std::iota(node.begin(), node.end(), 0);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double v = d(i, j);
        if (!found || v < best) {
          best = v;
          best_i = i;
          best_j = j;
          found = true;
        }
      }
    }
    const double si = static_cast<double>(size[best_i]);
    const double sj = static_cast<double>(size[best_j]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == best_i || k == best_j) continue;
      double merged = 0.0;
      switch (linkage) {
        case Linkage::kAverage: merged = (si * d(best_i, k) + sj * d(best_j, k)) / (si + sj); break;
        case Linkage::kComplete: merged = std::max(d(best_i, k), d(best_j, k)); break;
        case Linkage::kSingle: merged = std::min(d(best_i, k), d(best_j, k)); break;
      }
      d(best_i, k) = merged;
      d(k, best_i) = merged;
    }
    out.merges.push_back({node[best_i], node[best_j], best, size[best_i] + size[best_j]});
    node[best_i] = n + step;
    size[best_i] += size[best_j];
    active[best_j] = false;
  }
  return out;
}

Dendrogram cluster(const TaskSimilarity& similarity, Linkage linkage) {
  if (similarity.tasks.empty()) fail(ErrorKind::kEmptyInput, "no tasks to cluster");
  Eigen::MatrixXd dist = Eigen::MatrixXd::Ones(similarity.matrix.rows(), similarity.matrix.cols()) -
                         similarity.matrix;
  dist.diagonal().setZero();
  std::vector<std::string> labels;
  for (const auto& t : similarity.tasks) labels.emplace_back(t.code_string());
  return agglomerate(dist, std::move(labels), linkage);
}

namespace {

struct NodeInfo {
  double height = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  bool leaf = true;
};

std::vector<NodeInfo> node_table(const Dendrogram& d) {
  const std::size_t n = d.leaves.size();
  std::vector<NodeInfo> nodes(n + d.merges.size());
  for (std::size_t t = 0; t < d.merges.size(); ++t) {
    nodes[n + t] = {d.merges[t].height, d.merges[t].left, d.merges[t].right, false};
  }
  return nodes;
}

std::string newick_label(std::string_view label) {
  if (label.find_first_of("()[]:;,' \t") == std::string_view::npos && !label.empty()) {
    return std::string(label);
  }
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

// Branch lengths are carried in extended precision so that the parser's
// 2 * b + child reproduces the parent height after rounding to double.
long double branch(double parent, double child) {
  return (static_cast<long double>(parent) - static_cast<long double>(child)) / 2;
}

std::string format_length(long double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<std::size_t> leaf_order(const Dendrogram& d) {
  const std::size_t n = d.leaves.size();
  if (n == 0) return {};
  const auto nodes = node_table(d);
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{nodes.size() - 1};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (nodes[id].leaf) {
      order.push_back(id);
    } else {
      stack.push_back(nodes[id].right);
      stack.push_back(nodes[id].left);
    }
  }
  return order;
}

std::string to_newick(const Dendrogram& d) {
  if (d.leaves.empty()) fail(ErrorKind::kEmptyInput, "empty dendrogram");
  const auto nodes = node_table(d);
  std::function<std::string(std::size_t)> emit = [&](std::size_t id) -> std::string {
    if (nodes[id].leaf) return newick_label(d.leaves[id]);
    const auto& self = nodes[id];
    const double lh = nodes[self.left].height;
    const double rh = nodes[self.right].height;
    return "(" + emit(self.left) + ":" + format_length(branch(self.height, lh)) + "," +
           emit(self.right) + ":" + format_length(branch(self.height, rh)) + ")";
  };
  return emit(nodes.size() - 1) + ";";
}

namespace {

struct ParsedNode {
  std::string label;
  std::vector<std::size_t> children;
  std::vector<long double> lengths;
};

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  std::size_t parse(std::vector<ParsedNode>& nodes) {
    const std::size_t root = node(nodes);
    skip_ws();
    expect(';');
    skip_ws();
    if (pos_ != text_.size()) error("trailing characters");
    return root;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::kParseError, "Newick at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string label() {
    skip_ws();
    std::string out;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      ++pos_;
      while (true) {
        if (pos_ >= text_.size()) error("unterminated quoted label");
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            out += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        out += text_[pos_++];
      }
      return out;
    }
    while (pos_ < text_.size() && std::string_view("():;,").find(text_[pos_]) == std::string_view::npos &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      out += text_[pos_++];
    }
    return out;
  }
  long double length() {
    expect(':');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::string_view("(),;").find(text_[pos_]) == std::string_view::npos &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    long double v = 0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    const auto r = std::from_chars(first, last, v);
    if (first == last || r.ec != std::errc() || r.ptr != last || !std::isfinite(v)) {
      error("bad branch length '" + std::string(first, last) + "'");
    }
    return v;
  }
  std::size_t node(std::vector<ParsedNode>& nodes) {
    skip_ws();
    ParsedNode self;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      while (true) {
        const std::size_t child = node(nodes);
        self.children.push_back(child);
        self.lengths.push_back(length());
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
      if (self.children.size() != 2) error("only binary trees are supported");
      self.label = label();
    } else {
      self.label = label();
      if (self.label.empty()) error("empty leaf label");
    }
    nodes.push_back(std::move(self));
    return nodes.size() - 1;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Dendrogram parse_newick(std::string_view text, Linkage linkage) {
  std::vector<ParsedNode> nodes;
  const std::size_t root = NewickParser(text).parse(nodes);
  // Post-order (children are pushed before parents), so heights resolve in
  // one forward pass.
  std::vector<double> height(nodes.size(), 0.0);
  Dendrogram out;
  out.linkage = linkage;
  std::vector<std::size_t> id(nodes.size());
  std::vector<std::size_t> internal;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) {
      id[i] = out.leaves.size();
      out.leaves.push_back(nodes[i].label);
    } else {
      height[i] = static_cast<double>(2 * nodes[i].lengths[0] + height[nodes[i].children[0]]);
      internal.push_back(i);
    }
  }
  (void)root;
  std::stable_sort(internal.begin(), internal.end(),
                   [&](std::size_t a, std::size_t b) { return height[a] < height[b]; });
  std::vector<std::size_t> size(nodes.size(), 1);
  for (std::size_t t = 0; t < internal.size(); ++t) {
    const auto& self = nodes[internal[t]];
    id[internal[t]] = out.leaves.size() + t;
    size[internal[t]] = size[self.children[0]] + size[self.children[1]];
    out.merges.push_back(
        {id[self.children[0]], id[self.children[1]], height[internal[t]], size[internal[t]]});
  }
  return out;
}

std::string similarity_csv(const TaskSimilarity& s) {
  std::string out = "task";
  for (const auto& t : s.tasks) out += "," + std::string(t.code_string());
  out += "\n";
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    out += std::string(s.tasks[i].code_string());
    for (std::size_t j = 0; j < s.tasks.size(); ++j) {
      out += "," + format_double(s.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  return out;
}

std::string heatmap_svg(const TaskSimilarity& s, std::string_view title) {
  const double cell = 40;
  const double left = 70;
  const double top = 60;
  const auto n = static_cast<double>(s.tasks.size());
  svg::Document doc(left + n * cell + 20, top + n * cell + 20);
  doc.text(left + n * cell / 2, 24, title, "middle", 14);
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    const auto label = s.tasks[i].code_string();
    doc.text(left - 6, top + (static_cast<double>(i) + 0.6) * cell, label, "end");
    doc.text(left + (static_cast<double>(i) + 0.5) * cell, top - 8, label, "middle");
    for (std::size_t j = 0; j < s.tasks.size(); ++j) {
      const double v = s.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double x = left + static_cast<double>(j) * cell;
      const double y = top + static_cast<double>(i) * cell;
      doc.rect(x, y, cell, cell, svg::diverging_color(v), "#ccc");
      doc.text(x + cell / 2, y + cell * 0.6, svg::num(v), "middle", 9);
    }
  }
  return doc.str();
}

nlohmann::ordered_json to_json(const Dendrogram& d) {
  nlohmann::ordered_json j;
  j["linkage"] = to_string(d.linkage);
  j["leaves"] = d.leaves;
  auto& merges = j["merges"] = nlohmann::ordered_json::array();
  for (const auto& m : d.merges) {
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  }
  j["leaf_order"] = leaf_order(d);
  j["newick"] = to_newick(d);
  return j;
}

std::string dendrogram_svg(const Dendrogram& d, std::string_view title) {
  const std::size_t n = d.leaves.size();
  const double spacing = 50;
  const double left = 70;
  const double top = 50;
  const double plot_h = 300;
  const double width = left + static_cast<double>(n) * spacing + 20;
  svg::Document doc(width, top + plot_h + 60);
  doc.text(width / 2, 24, title, "middle", 14);

  double max_h = 0;
  for (const auto& m : d.merges) max_h = std::max(max_h, m.height);
  if (!(max_h > 0)) max_h = 1;
  auto y_of = [&](double h) { return top + plot_h - plot_h * h / max_h; };

  const auto order = leaf_order(d);
  std::vector<double> x(n + d.merges.size());
  std::vector<double> h(n + d.merges.size(), 0.0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    x[order[pos]] = left + (static_cast<double>(pos) + 0.5) * spacing;
    doc.text(x[order[pos]], top + plot_h + 18, d.leaves[order[pos]]);
  }
  for (std::size_t t = 0; t < d.merges.size(); ++t) {
    const auto& m = d.merges[t];
    const std::size_t id = n + t;
    x[id] = (x[m.left] + x[m.right]) / 2;
    h[id] = m.height;
    doc.line(x[m.left], y_of(h[m.left]), x[m.left], y_of(m.height));
    doc.line(x[m.right], y_of(h[m.right]), x[m.right], y_of(m.height));
    doc.line(x[m.left], y_of(m.height), x[m.right], y_of(m.height));
  }
  doc.line(left - 10, top, left - 10, top + plot_h);
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = max_h * tick / 4.0;
    doc.line(left - 14, y_of(v), left - 10, y_of(v));
    doc.text(left - 16, y_of(v) + 4, svg::num(v), "end", 9);
  }
  doc.text(18, top + plot_h / 2, "height (1 - similarity)", "middle", 10, -90);
  return doc.str();
}

}  // namespace neurotask::taskonomy
