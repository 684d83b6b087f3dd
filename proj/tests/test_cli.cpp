// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// End-to-end checks of the command-line tool, driven through a shell.

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#ifndef GENCHAN_CLI_PATH
#error "GENCHAN_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

const fs::path kWorkDir = fs::temp_directory_path() / "genchan_cli_tests";

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string &args) {
  const fs::path log = kWorkDir / "run.log";
  const std::string cmd =
      std::string(GENCHAN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(log);
  result.output.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>{});
  return result;
}

std::vector<char> slurp(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  return std::vector<char>(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>{});
}

struct WorkDirSetup {
  WorkDirSetup() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);
  }
};
const WorkDirSetup kSetup;

}  // namespace

TEST_CASE("synthesize is deterministic and writes a manifest", "[cli]") {
  const fs::path a = kWorkDir / "det_a.chnl";
  const fs::path b = kWorkDir / "det_b.chnl";
  REQUIRE(run("synthesize preset:paths-6-to-8 --count 64 --seed 7 --out " + a.string())
              .exit_code == 0);
  REQUIRE(run("synthesize preset:paths-6-to-8 --count 64 --seed 7 --out " + b.string())
              .exit_code == 0);
  REQUIRE(slurp(a) == slurp(b));

  const fs::path manifest = kWorkDir / "det_a.chnl.manifest.json";
  REQUIRE(fs::exists(manifest));
  std::ifstream is(manifest);
  const nlohmann::json j = nlohmann::json::parse(is);
  REQUIRE(j["command"] == "synthesize");
  REQUIRE(j["seed"] == 7);
  REQUIRE(j["config"]["count"] == 64);
}

TEST_CASE("malformed scenario specs exit with code 2 and a line diagnostic", "[cli]") {
  const fs::path bad = kWorkDir / "bad.spec";
  {
    std::ofstream os(bad);
    os << "name = broken\n[path]\ngain = 0.001 0.01\naoa = oops 1\naod = 0 1\n";
  }
  const RunResult r =
      run("synthesize " + bad.string() + " --count 4 --out " + (kWorkDir / "x.chnl").string());
  REQUIRE(r.exit_code == 2);
  REQUIRE(r.output.find("line 4") != std::string::npos);
}

TEST_CASE("unknown flags and missing files are rejected", "[cli]") {
  REQUIRE(run("synthesize preset:paths-6-to-8 --nope 1 --out x.chnl").exit_code == 2);
  REQUIRE(run("train --data " + (kWorkDir / "missing.chnl").string() + " --out " +
              (kWorkDir / "m.nnck").string())
              .exit_code == 1);
  REQUIRE(run("evaluate --a nope --b nope --out e.json").exit_code == 1);
}

TEST_CASE("train, generate, extract and evaluate chain together", "[cli]") {
  const fs::path data = kWorkDir / "train.chnl";
  REQUIRE(run("synthesize preset:paths-6-to-8 --count 96 --seed 3 --out " + data.string())
              .exit_code == 0);

  const fs::path model = kWorkDir / "model.nnck";
  const std::string train_args =
      "train --data " + data.string() +
      " --mode relaxed --resolution 16 --latent 4 --epochs 4 --batch 32" +
      " --enc-widths 64,32 --dec-widths 32,64 --lr 1e-3 --seed 5 --out " + model.string();
  REQUIRE(run(train_args).exit_code == 0);
  REQUIRE(fs::exists(model));
  REQUIRE(fs::exists(kWorkDir / "model.nnck.metrics.csv"));
  REQUIRE(fs::exists(kWorkDir / "model.nnck.manifest.json"));

  // metrics CSV has a header plus one row per epoch
  {
    std::ifstream is(kWorkDir / "model.nnck.metrics.csv");
    std::string line;
    int rows = 0;
    std::getline(is, line);
    REQUIRE(line == "epoch,total,mse,kl,l1,nmse");
    while (std::getline(is, line)) ++rows;
    REQUIRE(rows == 4);
  }

  const fs::path gen = kWorkDir / "gen.chnl";
  const fs::path gains = kWorkDir / "gen.gmtx";
  REQUIRE(run("generate --model " + model.string() + " --count 40 --seed 11 --out " +
              gen.string() + " --gains-out " + gains.string())
              .exit_code == 0);
  const fs::path gen2 = kWorkDir / "gen2.chnl";
  REQUIRE(run("generate --model " + model.string() + " --count 40 --seed 11 --out " +
              gen2.string())
              .exit_code == 0);
  REQUIRE(slurp(gen) == slurp(gen2));

  const fs::path paths_csv = kWorkDir / "paths.csv";
  REQUIRE(run("extract-params --gains " + gains.string() + " --threshold 0.2 --out " +
              paths_csv.string())
              .exit_code == 0);
  {
    std::ifstream is(paths_csv);
    std::string header;
    std::getline(is, header);
    REQUIRE(header == "sample,path,gain,aoa,aod");
  }

  // identical sets score zero on both metrics
  const fs::path ev = kWorkDir / "self.json";
  const RunResult r = run("evaluate --a " + gen.string() + " --b " + gen.string() +
                          " --metrics w2,mmd --out " + ev.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream is(ev);
  const nlohmann::json records = nlohmann::json::parse(is);
  REQUIRE(records.size() == 2);
  for (const auto &record : records) REQUIRE(record["value"] == 0.0);

  // evaluate requires equal cardinalities for the exact w2
  const fs::path small = kWorkDir / "small.chnl";
  REQUIRE(run("synthesize preset:paths-6-to-8 --count 10 --seed 4 --out " + small.string())
              .exit_code == 0);
  REQUIRE(run("evaluate --a " + gen.string() + " --b " + small.string() + " --metrics w2 --out " +
              (kWorkDir / "bad_ev.json").string())
              .exit_code == 2);

  // init-from with a mismatched architecture is rejected
  const std::string mismatch_args =
      "train --data " + data.string() +
      " --mode relaxed --resolution 16 --latent 8 --epochs 1 --batch 32" +
      " --enc-widths 64,32 --dec-widths 32,64 --init-from " + model.string() + " --out " +
      (kWorkDir / "resume.nnck").string();
  REQUIRE(run(mismatch_args).exit_code == 2);

  // matching init-from runs
  const std::string resume_args =
      "train --data " + data.string() +
      " --mode relaxed --resolution 16 --latent 4 --epochs 2 --batch 32" +
      " --enc-widths 64,32 --dec-widths 32,64 --init-from " + model.string() + " --out " +
      (kWorkDir / "resume.nnck").string();
  REQUIRE(run(resume_args).exit_code == 0);
}

TEST_CASE("surface command emits csv and summary json", "[cli]") {
  const fs::path out = kWorkDir / "surface.csv";
  REQUIRE(run("surface --theta-a 1.0 --theta-d 1.0 --gain 1.0 --n 8 --grid 41 --pin-truth "
              "--out " +
              out.string())
              .exit_code == 0);
  REQUIRE(fs::exists(out));
  std::ifstream is(kWorkDir / "surface.csv.summary.json");
  const nlohmann::json j = nlohmann::json::parse(is);
  REQUIRE(j["n"] == 8);
  REQUIRE(j["min_value"].get<double>() < 1e-12);
  REQUIRE(j["argmin_theta_a"] == 1.0);
}

TEST_CASE("cross-eval writes a labeled matrix", "[cli]") {
  const fs::path a = kWorkDir / "xa.chnl";
  const fs::path b = kWorkDir / "xb.chnl";
  REQUIRE(run("synthesize preset:bs10-analog --count 64 --seed 21 --out " + a.string())
              .exit_code == 0);
  REQUIRE(run("synthesize preset:bs11-analog --count 64 --seed 22 --out " + b.string())
              .exit_code == 0);
  const fs::path out = kWorkDir / "matrix.csv";
  const RunResult r = run("cross-eval --train a=" + a.string() + ",b=" + b.string() +
                          " --test a=" + a.string() + ",b=" + b.string() +
                          " --bottleneck 8 --widths 32 --epochs 3 --batch 32 --jobs 2 --out " +
                          out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream is(out);
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "train\\test,a,b");
  int rows = 0;
  std::string line;
  while (std::getline(is, line)) ++rows;
  REQUIRE(rows == 2);
}

TEST_CASE("GENCHAN_OUT_DIR anchors relative outputs", "[cli]") {
  const fs::path outdir = kWorkDir / "envout";
  const std::string cmd = "GENCHAN_OUT_DIR=" + outdir.string() + " " + GENCHAN_CLI_PATH +
                          " synthesize preset:paths-6-to-8 --count 8 --seed 1 --out env.chnl" +
                          " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  REQUIRE(fs::exists(outdir / "env.chnl"));
}
