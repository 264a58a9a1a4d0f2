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


#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " \"" NEUROTASK_CLI_PATH "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string synth(const neurotask::testing::TempDir& tmp, const std::string& extra = {}) {
  const auto r = run("synth --samples 30 --dim 6 --voxel-scale 0.002 --out \"" + tmp.path().string() + "/data\" " + extra);
  REQUIRE(r.code == 0);
  return (tmp.path() / "data" / "manifest.json").string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("help and version") {
  const auto h = run("--help");
  CHECK(h.code == 0);
  CHECK(h.out.find("encode") != std::string::npos);
  CHECK(h.out.find("similarity") != std::string::npos);
  const auto v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find('.') != std::string::npos);
  const auto e = run("encode --help");
  CHECK(e.code == 0);
  CHECK(e.out.find("--lambda") != std::string::npos);
}

TEST_CASE("bad usage exits with 1") {
  CHECK(run("encode").code == 1);
  CHECK(run("encode --manifest x.json --folds 0").code == 1);
  CHECK(run("nosuchcommand").code == 1);
  CHECK(run("encode evaluate --manifest x.json").code == 1);
}

TEST_CASE("validation failures exit with 1") {
  neurotask::testing::TempDir tmp("cli-val");
  CHECK(run("encode --quiet --manifest \"" + (tmp / "missing.json").string() + "\"").code == 1);
  const auto m = synth(tmp);
  const auto r = run("encode --quiet --rois NoSuchRoi --manifest \"" + m + "\" --out \"" + (tmp / "out").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("FilterEmpty") != std::string::npos);
}

TEST_CASE("missing upstream exits with 3") {
  neurotask::testing::TempDir tmp("cli-up");
  const auto m = synth(tmp);
  const auto r = run("stats --quiet --manifest \"" + m + "\" --out \"" + (tmp / "out").string() + "\"");
  CHECK(r.code == 3);
  CHECK(r.out.find("neurotask evaluate") != std::string::npos);
}

TEST_CASE("numeric failures exit with 2") {
  neurotask::testing::TempDir tmp("cli-num");
  const auto r0 = run("synth --shape listening --subjects 2 --samples 30 --dim 4 --voxel-scale 0.0001 --out \"" +
                      (tmp / "data").string() + "\"");
  REQUIRE(r0.code == 0);
  // one voxel per ROI leaves nothing to correlate across voxels
  const std::string common = " --quiet --tasks CR --rois EAC_L --manifest \"" + (tmp / "data/manifest.json").string() +
                             "\" --out \"" + (tmp / "out").string() + "\"";
  REQUIRE(run("encode" + common).code == 0);
  const auto r = run("evaluate" + common);
  CHECK(r.code == 2);
  CHECK(r.out.find("ZeroVariance") != std::string::npos);
}

TEST_CASE("full run and environment flags") {
  neurotask::testing::TempDir tmp("cli-all");
  const auto m = synth(tmp);
  const auto out = (tmp / "out").string();
  const auto r = run("all --rois DMN --threads 2 --manifest \"" + m + "\" --out \"" + out + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("kernels: ") != std::string::npos);
  CHECK(fs::exists(tmp / "out/similarity/prediction-score/dendrogram.nwk"));
  CHECK(fs::exists(tmp / "out/brainmap/mae"));

  const auto out2 = (tmp / "env").string();
  const auto e = run("all", "NEUROTASK_MANIFEST=\"" + m + "\" NEUROTASK_OUT=\"" + out2 +
                               "\" NEUROTASK_ROIS=DMN NEUROTASK_QUIET=1 NEUROTASK_LAMBDA=1");
  CHECK(e.code == 0);
  CHECK(e.out.find("kernels: ") == std::string::npos);
  CHECK(slurp(tmp / "out/metrics/metrics.csv") == slurp(tmp / "env/metrics/metrics.csv"));

  const auto out3 = (tmp / "lam").string();
  const std::string lam = " --quiet --rois DMN --lambda 1000 --manifest \"" + m + "\" --out \"" + out3 + "\"";
  CHECK(run("encode" + lam).code == 0);
  CHECK(run("evaluate" + lam).code == 0);
  CHECK(slurp(tmp / "out/metrics/metrics.csv") != slurp(tmp / "lam/metrics/metrics.csv"));
}
