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


// Acceptance run: one PASS/FAIL/SKIP line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "neurotask/encoder.hpp"
#include "neurotask/error.hpp"
#include "neurotask/ingest.hpp"
#include "neurotask/metrics.hpp"
#include "neurotask/pipeline.hpp"
#include "neurotask/simd/kernels.hpp"
#include "neurotask/stats.hpp"
#include "neurotask/taskonomy.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace neurotask;
namespace fs = std::filesystem;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

// Collects failed sub-checks with a short description of each.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 6) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  Outcome outcome() const {
    std::string d;
    for (const auto& n : notes_) d += (d.empty() ? "" : "; ") + n;
    if (failed_ == 0) return {Verdict::kPass, d.empty() ? std::to_string(total_) + " checks" : d};
    std::string f = std::to_string(failed_) + "/" + std::to_string(total_) + " checks failed";
    for (const auto& s : failures_) f += "; " + s;
    if (!d.empty()) f += "; " + d;
    return {Verdict::kFail, f};
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

// ---------------------------------------------------------------- ridge

Outcome ridge_oracle() {
  Checks c;
  testing::Rng rng(20260101);
  const double lambdas[] = {0.01, 1.0, 100.0};
  double worst_w = 0.0;
  double worst_res = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const auto n = static_cast<Eigen::Index>(rng.index(5, 200));
    const auto d = static_cast<Eigen::Index>(rng.index(1, 32));
    const auto v = static_cast<Eigen::Index>(rng.index(1, 8));
    const double lambda = lambdas[inst % 3];
    const Matrix x = rng.matrix(n, d);
    const Matrix y = rng.matrix(n, v) + x * rng.matrix(d, v);
    const auto sol = encoder::fit_ridge(x, y, lambda);
    const Matrix ref = oracle::ridge_cg(x, y, lambda);
    const double diff = (sol.weights - ref).cwiseAbs().maxCoeff();
    const double res = encoder::normal_equation_residual(x, y, lambda, sol.weights);
    worst_w = std::max(worst_w, diff);
    worst_res = std::max(worst_res, res);
    c.expect(diff <= 1e-6, "instance " + std::to_string(inst) + " weight diff " + num(diff));
    c.expect(res <= 1e-8, "instance " + std::to_string(inst) + " residual " + num(res));
  }
  c.note("max |W - W_oracle| " + num(worst_w, 3) + ", max residual " + num(worst_res, 3));
  return c.outcome();
}

// ---------------------------------------------------------- recovery

struct RecoveryScores {
  double pearson = 0.0;
  double twov2 = 0.0;
};

RecoveryScores recover(double noise_ratio, std::uint64_t seed) {
  testing::Rng rng(seed);
  const Eigen::Index n = 500;
  const Eigen::Index d = 768;
  const Eigen::Index v = 200;
  const Matrix x = rng.matrix(n, d);
  const Matrix w = rng.matrix(d, v);
  Matrix y = x * w;
  for (Eigen::Index j = 0; j < v; ++j) {
    const double mean = y.col(j).mean();
    const double sd = std::sqrt((y.col(j).array() - mean).square().mean());
    for (Eigen::Index i = 0; i < n; ++i) y(i, j) += noise_ratio * sd * rng.normal();
  }
  const auto ids = testing::make_ids(static_cast<std::size_t>(n));
  const FeatureMatrix f(TaskId::from_code(TaskCode::kCR), x, ids);
  const ResponseMatrix r("synthetic", testing::make_roi("R", static_cast<std::size_t>(v)), y, ids);
  EncodingConfig config;
  config.lambda = 1.0;
  config.k_folds = 10;
  const auto run = encoder::run_encoding(validate_pairing(f, r), config);
  return {metrics::pearson_metric(y, run.predictions, PcMode::kPerVoxel).value,
          metrics::two_v_two(y, run.predictions)};
}

Outcome synthetic_recovery() {
  Checks c;
  const auto low = recover(0.1, 7);
  const auto high = recover(10.0, 8);
  c.expect(low.pearson >= 0.95, "low-noise per-voxel Pearson " + num(low.pearson) + " < 0.95");
  c.expect(low.twov2 >= 0.99, "low-noise 2V2 " + num(low.twov2) + " < 0.99");
  c.expect(high.twov2 >= 0.45 && high.twov2 <= 0.55, "high-noise 2V2 " + num(high.twov2) + " outside [0.45, 0.55]");
  c.expect(std::abs(high.pearson) <= 0.05, "high-noise Pearson " + num(high.pearson) + " outside [-0.05, 0.05]");
  c.note("sigma=0.1: PC " + num(low.pearson) + ", 2V2 " + num(low.twov2) + "; sigma=10: PC " + num(high.pearson) +
         ", 2V2 " + num(high.twov2));
  return c.outcome();
}

// ----------------------------------------------------------- metrics

Outcome metric_properties() {
  Checks c;
  testing::Rng rng(99);

  for (int t = 0; t < 20; ++t) {
    const auto n = static_cast<Eigen::Index>(rng.index(2, 40));
    const auto v = static_cast<Eigen::Index>(rng.index(2, 12));
    const Matrix y = rng.matrix(n, v);
    const Matrix p = rng.matrix(n, v);
    const double base = metrics::two_v_two(y, p);
    const double a = std::exp(rng.uniform(-5, 5));
    const double b = std::exp(rng.uniform(-5, 5));
    c.expect(metrics::two_v_two(a * y, b * p) == base, "2V2 changes under positive scaling");
  }

  Matrix y2(2, 3);
  y2 << 1, 0, 0, 0, 1, 0;
  Matrix swapped(2, 3);
  swapped << 0, 1, 0, 1, 0, 0;
  c.expect(metrics::two_v_two(y2, swapped) == 0.0, "swapped pair does not score 0");
  c.expect(metrics::two_v_two(y2, y2) == 1.0, "identical pair does not score 1");

  double null_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testing::Rng r(1000 + seed);
    const Matrix y = r.matrix(100, 20);
    null_sum += metrics::two_v_two(y, r.matrix(100, 20));
  }
  const double null_mean = null_sum / 50.0;
  c.expect(std::abs(null_mean - 0.5) <= 0.05, "null 2V2 mean " + num(null_mean));
  c.note("null 2V2 mean over 50 seeds " + num(null_mean));

  for (int t = 0; t < 50; ++t) {
    const std::size_t n = rng.index(3, 60);
    const Vector a = rng.vector(static_cast<Eigen::Index>(n));
    const Vector b = rng.vector(static_cast<Eigen::Index>(n));
    const std::span<const double> sa(a.data(), n);
    const double r0 = *metrics::pearson(sa, {b.data(), n});
    const double alpha = rng.uniform(0.1, 10.0);
    const double beta = rng.uniform(-10.0, 10.0);
    const Vector bp = (alpha * b.array() + beta).matrix();
    const Vector bn = (-alpha * b.array() + beta).matrix();
    c.expect(std::abs(*metrics::pearson(sa, {bp.data(), n}) - r0) <= 1e-12, "PC not affine invariant");
    c.expect(std::abs(*metrics::pearson(sa, {bn.data(), n}) + r0) <= 1e-12, "PC sign does not flip");
    const Vector lin = (alpha * a.array() + beta).matrix();
    const Vector neg = (-alpha * a.array() + beta).matrix();
    c.expect(std::abs(*metrics::pearson(sa, {lin.data(), n}) - 1.0) <= 1e-12, "PC of a line is not 1");
    c.expect(std::abs(*metrics::pearson(sa, {neg.data(), n}) + 1.0) <= 1e-12, "PC of a falling line is not -1");

    const Matrix y = rng.matrix(static_cast<Eigen::Index>(n), 4);
    const double off = rng.uniform(-5.0, 5.0);
    const Matrix shifted = (y.array() + off).matrix();
    c.expect(std::abs(metrics::mae(y, shifted) - std::abs(off)) <= 1e-12, "MAE offset law");
  }

  for (Eigen::Index n = 2; n <= 50; ++n) {
    const auto v = static_cast<Eigen::Index>(rng.index(1, 10));
    const Matrix y = rng.matrix(n, v);
    const Matrix p = (0.5 * y + rng.matrix(n, v)).eval();
    c.expect(metrics::two_v_two(y, p) == oracle::two_v_two(y, p), "2V2 differs from brute force at N=" + std::to_string(n));
  }
  return c.outcome();
}

// ------------------------------------------------------------- stats

Outcome statistics_oracles() {
  Checks c;
  const auto hand = stats::one_way_anova({{1, 2, 3}, {4, 5, 6}});
  c.expect(hand.f_stat == 13.5, "F on the hand example is " + num(hand.f_stat, 17));
  c.expect(hand.df_between == 1 && hand.df_within == 4, "hand example df");

  testing::Rng rng(5);
  double worst_p = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t g = rng.index(2, 11);
    const std::size_t per = rng.index(2, 82);
    std::vector<std::vector<double>> groups(g);
    for (std::size_t i = 0; i < g; ++i) {
      const double shift = rng.uniform(-0.5, 0.5);
      for (std::size_t k = 0; k < per; ++k) groups[i].push_back(shift + rng.normal());
    }
    const auto a = stats::one_way_anova(groups);
    const double ref = oracle::f_survival(a.f_stat, static_cast<double>(a.df_between), static_cast<double>(a.df_within));
    worst_p = std::max(worst_p, std::abs(a.p_value - ref));
    c.expect(std::abs(a.p_value - ref) <= 1e-4, "p differs from the F-CDF oracle");
  }

  double worst_ft = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(rng.index(2, 30));
    std::vector<double> b(rng.index(2, 30));
    const double shift = rng.uniform(-2.0, 2.0);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = shift + rng.normal();
    const double f = stats::one_way_anova({a, b}).f_stat;
    const double t2 = std::pow(oracle::pooled_t(a, b), 2);
    const double rel = std::abs(f - t2) / std::max(1.0, t2);
    worst_ft = std::max(worst_ft, rel);
    c.expect(rel <= 1e-10, "F != t^2");
  }

  for (int t = 0; t < 200; ++t) {
    const double p = rng.uniform(0.0, 1.0);
    const std::size_t m = rng.index(1, 100);
    const double q = stats::bonferroni(p, m);
    c.expect(q == std::min(1.0, static_cast<double>(m) * p), "Bonferroni scaling");
    c.expect(q <= 1.0 && q >= p, "Bonferroni cap");
    const double p2 = std::min(1.0, p + rng.uniform(0.0, 0.1));
    c.expect(stats::bonferroni(p2, m) >= q, "Bonferroni not monotone in p");
    c.expect(stats::bonferroni(p, m + 1) >= q, "Bonferroni not monotone in m");
  }
  c.note("max |p - oracle| " + num(worst_p, 3) + ", max rel |F - t^2| " + num(worst_ft, 3));
  return c.outcome();
}

// -------------------------------------------------------- clustering

std::vector<std::set<std::size_t>> members(const taskonomy::Dendrogram& d) {
  std::vector<std::set<std::size_t>> m(d.leaves.size() + d.merges.size());
  for (std::size_t i = 0; i < d.leaves.size(); ++i) m[i] = {i};
  for (std::size_t t = 0; t < d.merges.size(); ++t) {
    auto& dst = m[d.leaves.size() + t];
    dst = m[d.merges[t].left];
    dst.insert(m[d.merges[t].right].begin(), m[d.merges[t].right].end());
  }
  return m;
}

std::vector<std::pair<double, std::set<std::string>>> canonical(const taskonomy::Dendrogram& d) {
  const auto m = members(d);
  std::vector<std::pair<double, std::set<std::string>>> out;
  for (std::size_t t = 0; t < d.merges.size(); ++t) {
    std::set<std::string> labels;
    for (auto leaf : m[d.leaves.size() + t]) labels.insert(d.leaves[leaf]);
    out.emplace_back(d.merges[t].height, std::move(labels));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome clustering_oracle() {
  Checks c;
  Eigen::MatrixXd three(3, 3);
  three << 0, 1, 4, 1, 0, 5, 4, 5, 0;
  const auto hand = taskonomy::agglomerate(three, {"A", "B", "C"});
  c.expect(hand.merges.size() == 2 && hand.merges[0] == taskonomy::Merge{0, 1, 1.0, 2} &&
               hand.merges[1] == taskonomy::Merge{3, 2, 4.5, 3},
           "three-point merges");
  c.expect(taskonomy::to_newick(hand) == "((A:0.5,B:0.5):1.75,C:2.25);", "three-point Newick");

  testing::Rng rng(10);
  const std::vector<std::string> labels = {"CR", "NER", "NLI", "PD", "QA", "SA", "SRL", "SS", "Sum", "WSD"};
  for (int t = 0; t < 200; ++t) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(10, 10);
    for (Eigen::Index i = 0; i < 10; ++i) {
      for (Eigen::Index j = i + 1; j < 10; ++j) {
        // coarse values on some trials so that ties occur
        d(i, j) = d(j, i) = t % 4 == 0 ? static_cast<double>(rng.index(1, 4)) / 4.0 : rng.uniform(0.0, 2.0);
      }
    }
    const auto tree = taskonomy::agglomerate(d, labels);
    const auto ref = oracle::agglomerate_average(d);
    const auto m = members(tree);
    bool same = tree.merges.size() == ref.size();
    for (std::size_t k = 0; same && k < ref.size(); ++k) {
      const auto& mg = tree.merges[k];
      const std::set<std::size_t> l(ref[k].members_left.begin(), ref[k].members_left.end());
      const std::set<std::size_t> r(ref[k].members_right.begin(), ref[k].members_right.end());
      same = m[mg.left] == l && m[mg.right] == r && std::abs(mg.height - ref[k].height) <= 1e-12;
    }
    c.expect(same, "merge sequence differs from brute force on trial " + std::to_string(t));
    bool monotone = true;
    for (std::size_t k = 1; k < tree.merges.size(); ++k) monotone &= tree.merges[k].height >= tree.merges[k - 1].height;
    c.expect(monotone, "heights decrease on trial " + std::to_string(t));
    const auto back = taskonomy::parse_newick(taskonomy::to_newick(tree));
    c.expect(back.leaves.size() == tree.leaves.size(), "leaf count after round trip");
    c.expect(canonical(back) == canonical(tree), "Newick round trip not exact on trial " + std::to_string(t));
  }
  return c.outcome();
}

// ---------------------------------------------------------- pipeline

void run_all(const pipeline::RunPlan& plan, std::size_t* encoded) {
  const auto enc = pipeline::cmd_encode(plan);
  if (encoded) *encoded = enc.units;
  pipeline::cmd_evaluate(plan);
  pipeline::cmd_stats(plan);
  pipeline::cmd_similarity(plan);
  pipeline::cmd_report(plan);
  pipeline::cmd_brainmap(plan);
}

Outcome pipeline_shape() {
  Checks c;
  testing::TempDir tmp("acceptance");
  pipeline::SynthSpec spec;
  spec.voxel_scale = 0.01;
  spec.seed = 11;
  const auto manifest_path = pipeline::synthesize_dataset(spec, tmp / "data");
  const auto manifest = load_manifest(manifest_path);
  c.expect(manifest.subjects.size() == 5, "subjects");
  c.expect(manifest.tasks.size() == 11, "tasks");

  std::size_t units = 0;
  auto one = pipeline::make_plan(load_manifest(manifest_path), {}, tmp / "t1");
  one.threads = 1;
  run_all(one, &units);
  c.expect(units == 495, "encoding runs " + std::to_string(units));
  for (const auto& roi : one.rois) {
    for (const char* metric : {"2v2", "pearson", "mae"}) {
      const auto rows = lines(tmp / "t1/stats" / ("pairwise_" + std::string(metric) + "_" + roi + ".csv"));
      c.expect(rows.size() == 46, "pairwise rows for " + roi + "/" + metric);
    }
  }
  const auto main = lines(tmp / "t1/stats/main_effects.csv");
  c.expect(main.size() == 1 + 9 * 3, "main-effect rows");
  for (std::size_t i = 1; i < main.size(); ++i) {
    const auto f = split(main[i]);
    c.expect(f.size() == 6 && f[3] == "9" && f[4] == "40", "main-effect df in '" + main[i] + "'");
  }
  const auto sim = lines(tmp / "t1/similarity/prediction-score/similarity.csv");
  bool square = sim.size() == 12;
  for (const auto& l : sim) square &= split(l).size() == 12;
  c.expect(square, "similarity matrix is not 11 x 11");
  const auto meta = slurp(tmp / "t1/similarity/prediction-score/similarity.csv.meta.json");
  c.expect(meta.find("voxel_scale") != std::string::npos, "reduced voxel scale missing from the sidecar");

  auto eight = pipeline::make_plan(load_manifest(manifest_path), {}, tmp / "t8");
  eight.threads = 8;
  run_all(eight, nullptr);
  const auto a = tree(tmp / "t1");
  const auto b = tree(tmp / "t8");
  std::size_t differing = a.size() == b.size() ? 0 : 1;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    if (it == b.end() || it->second != v) ++differing;
  }
  c.expect(differing == 0, std::to_string(differing) + " files differ between 1 and 8 threads");
  c.note(std::to_string(units) + " runs, " + std::to_string(a.size()) + " files identical across thread counts, voxel scale 0.01");
  return c.outcome();
}

// ---------------------------------------------------- data-dependent

// task -> mean Pearson over subjects, for ROIs whose name starts with prefix
std::map<std::string, double> mean_pearson(const fs::path& metrics_csv, const std::string& roi_prefix) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  const auto rows = lines(metrics_csv);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i]);
    if (f.size() < 6 || f[4] != "pearson" || f[3].rfind(roi_prefix, 0) != 0) continue;
    auto& [sum, n] = acc[f[1]];
    sum += std::stod(f[5]);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [task, sn] : acc) out[task] = sn.first / static_cast<double>(sn.second);
  return out;
}

std::vector<std::string> top3(const std::map<std::string, double>& scores) {
  std::vector<std::pair<double, std::string>> v;
  for (const auto& [t, s] : scores) {
    if (t != "BASE") v.emplace_back(-s, t);
  }
  std::sort(v.begin(), v.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, v.size()); ++i) out.push_back(v[i].second);
  return out;
}

void check_base(Checks& c, const fs::path& metrics_csv, const std::vector<std::string>& rois, const std::string& tag) {
  for (const auto& roi : rois) {
    const auto s = mean_pearson(metrics_csv, roi);
    if (!s.count("BASE")) continue;
    std::size_t above = 0;
    for (const auto& [t, v] : s) above += t != "BASE" && v > s.at("BASE");
    c.expect(above >= 5, tag + " " + roi + ": BASE beaten by only " + std::to_string(above) + " tasks");
  }
}

Outcome data_dependent() {
  const char* pereira = std::getenv("NEUROTASK_PEREIRA_MANIFEST");
  const char* pieman = std::getenv("NEUROTASK_PIEMAN_MANIFEST");
  if (!pereira || !pieman || !*pereira || !*pieman) {
    return {Verdict::kSkip, "set NEUROTASK_PEREIRA_MANIFEST and NEUROTASK_PIEMAN_MANIFEST to run"};
  }
  Checks c;
  testing::TempDir tmp("acceptance-real");
  std::map<std::string, fs::path> csv;
  std::map<std::string, std::vector<std::string>> rois;
  for (const auto& [tag, path] : {std::pair<std::string, const char*>{"pereira", pereira}, {"pieman", pieman}}) {
    auto plan = pipeline::make_plan(load_manifest(path), {}, tmp / tag);
    plan.threads = std::max(1u, std::thread::hardware_concurrency());
    pipeline::cmd_encode(plan);
    pipeline::cmd_evaluate(plan);
    csv[tag] = pipeline::metrics_csv_path(plan);
    rois[tag] = plan.rois;
  }
  const std::set<std::string> lang = {"CR", "NER", "SS"};
  for (const auto& t : top3(mean_pearson(csv["pereira"], "Language_LH"))) {
    c.expect(lang.count(t) == 1, "Pereira Language_LH top-3 holds " + t);
  }
  const std::set<std::string> pmc = {"PD", "Sum", "NLI"};
  for (const auto& t : top3(mean_pearson(csv["pieman"], "PMC"))) {
    c.expect(pmc.count(t) == 1, "Pieman PMC top-3 holds " + t);
  }
  for (const auto& roi : rois["pieman"]) {
    for (const auto& [t, v] : mean_pearson(csv["pieman"], roi)) {
      if (t == "BASE") continue;
      c.expect(v >= 0.02 - 0.05 && v <= 0.229 + 0.05, "Pieman " + roi + "/" + t + " PC " + num(v));
    }
  }
  check_base(c, csv["pereira"], rois["pereira"], "Pereira");
  check_base(c, csv["pieman"], rois["pieman"], "Pieman");
  return c.outcome();
}

struct Criterion {
  std::string name;
  double budget_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"ridge oracle equivalence", 30.0, ridge_oracle},
      {"synthetic recovery", 120.0, synthetic_recovery},
      {"metric property suite", 0.0, metric_properties},
      {"statistics oracles", 0.0, statistics_oracles},
      {"clustering oracle", 0.0, clustering_oracle},
      {"pipeline shape check", 900.0, pipeline_shape},
      {"data-dependent orderings", 0.0, data_dependent},
  };
  std::cout << "kernels: " << simd::to_string(simd::kernels().isa) << "\n";
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {Verdict::kFail, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_seconds > 0 && secs > cr.budget_seconds && out.verdict == Verdict::kPass) {
      out = {Verdict::kFail, "over the " + num(cr.budget_seconds) + " s budget; " + out.detail};
    }
    const char* tag = out.verdict == Verdict::kPass ? "PASS" : out.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << cr.name << "  [" << num(secs, 3) << " s]  " << out.detail << std::endl;
    failed += out.verdict == Verdict::kFail;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
