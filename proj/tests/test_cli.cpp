// Copyright 2026 The AdaSID Authors.
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adasid/config.hpp"
#include "adasid/schedule.hpp"
#include "adasid/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh scratch tree per test case; everything the binary writes lands here.
struct Scratch {
  Scratch() : root(fs::temp_directory_path() / "adasid_cli_scratch") {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string dir(const std::string& name) const { return (root / name).string(); }
  fs::path root;
};

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

RunResult run_cli(const Scratch& scratch, const std::string& args) {
  const std::string err_path = scratch.dir("stderr.txt");
  const std::string cmd = std::string(ADASID_CLI_PATH) + " " + args +
                          " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream err(err_path);
  std::ostringstream text;
  text << err.rdbuf();
  result.stderr_text = text.str();
  return result;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<adasid::LossBreakdown> read_loss_log(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<adasid::LossBreakdown> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    log.push_back(adasid::loss_breakdown_from_json(json::parse(line)));
  }
  return log;
}

// Desk-scale config: 48 items, 12 steps, schedule ramp inside the run.
std::string write_base_config(const Scratch& scratch) {
  json config;
  config["data"]["features"] = scratch.dir("data") + "/features.bin";
  config["data"]["pairs"] = scratch.dir("data") + "/pairs.tsv";
  config["tokenizer"] = {{"d_in", 8}, {"d", 4}, {"L", 3}, {"K", 8}};
  config["regulation"] = {{"eta", {0.1, 0.2, 0.3}}, {"m_base", 1.0}};
  config["schedule"] = {{"t_start", 2}, {"t_end", 10}};
  config["train"] = {{"batch_size", 8}, {"total_steps", 12}, {"seed", 7},
                     {"temperature", 0.2}};
  config["synth"] = {{"n_items", 48}, {"n_clusters", 4}, {"dim", 8}, {"seed", 7}};
  const std::string path = scratch.dir("config.json");
  std::ofstream(path) << config.dump(2) << "\n";
  return path;
}

void gen_data(const Scratch& scratch, const std::string& config_path) {
  const RunResult r =
      run_cli(scratch, "gen-synth -c " + config_path + " -o " + scratch.dir("data"));
  REQUIRE(r.exit_code == 0);
}

}  // namespace

TEST_CASE("gen-synth writes a deterministic corpus") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);

  const RunResult a =
      run_cli(scratch, "gen-synth -c " + config + " -o " + scratch.dir("gen_a"));
  CHECK(a.exit_code == 0);
  CHECK(fs::exists(scratch.dir("gen_a") + "/features.bin"));
  CHECK(fs::exists(scratch.dir("gen_a") + "/pairs.tsv"));
  CHECK(fs::exists(scratch.dir("gen_a") + "/labels.tsv"));
  CHECK(fs::exists(scratch.dir("gen_a") + "/config.json"));

  const RunResult b =
      run_cli(scratch, "gen-synth -c " + config + " -o " + scratch.dir("gen_b"));
  CHECK(b.exit_code == 0);
  CHECK(file_bytes(scratch.dir("gen_a") + "/features.bin") ==
        file_bytes(scratch.dir("gen_b") + "/features.bin"));
  CHECK(file_bytes(scratch.dir("gen_a") + "/pairs.tsv") ==
        file_bytes(scratch.dir("gen_b") + "/pairs.tsv"));
  CHECK(file_bytes(scratch.dir("gen_a") + "/labels.tsv") ==
        file_bytes(scratch.dir("gen_b") + "/labels.tsv"));
}

TEST_CASE("train writes every artifact and reruns byte-identically") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  gen_data(scratch, config);

  const RunResult a =
      run_cli(scratch, "train -c " + config + " -o " + scratch.dir("run_a"));
  REQUIRE(a.exit_code == 0);
  for (const char* artifact : {"config.json", "loss_log.jsonl", "checkpoint.bin",
                               "sids.tsv", "diagnostics.json"}) {
    CHECK(fs::exists(scratch.dir("run_a") + "/" + artifact));
  }

  const auto log = read_loss_log(scratch.dir("run_a") + "/loss_log.jsonl");
  REQUIRE(log.size() == 12);
  for (const auto& l : log) {
    CHECK(l.total == l.rec + l.rq + l.lambda_col * l.col_ada + l.lambda_cf * l.cf);
  }

  const RunResult b =
      run_cli(scratch, "train -c " + config + " -o " + scratch.dir("run_b"));
  REQUIRE(b.exit_code == 0);
  for (const char* artifact : {"loss_log.jsonl", "checkpoint.bin", "sids.tsv",
                               "diagnostics.json", "config.json"}) {
    CHECK(file_bytes(scratch.dir("run_a") + "/" + artifact) ==
          file_bytes(scratch.dir("run_b") + "/" + artifact));
  }
}

TEST_CASE("ablation override disables gating in the logged stream") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  gen_data(scratch, config);

  const RunResult r = run_cli(scratch, "train -c " + config +
                                           " -s train.enable_sear=false -o " +
                                           scratch.dir("no_sear"));
  REQUIRE(r.exit_code == 0);
  const auto log = read_loss_log(scratch.dir("no_sear") + "/loss_log.jsonl");
  REQUIRE(log.size() == 12);
  for (const auto& l : log) {
    CHECK(l.gated_pairs == 0);
  }
  // The echoed config reflects the override.
  const json echoed =
      json::parse(file_bytes(scratch.dir("no_sear") + "/config.json"));
  CHECK(echoed["train"]["enable_sear"] == false);
}

TEST_CASE("schedule overrides drive the logged weights exactly") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  gen_data(scratch, config);

  const RunResult r = run_cli(
      scratch, "train -c " + config +
                   " -s schedule.t_start=3 -s schedule.t_end=9" +
                   " -s schedule.lambda_col_min=0.05 -s schedule.lambda_cf_max=0.25" +
                   " -o " + scratch.dir("sched"));
  REQUIRE(r.exit_code == 0);

  adasid::ScheduleConfig schedule;
  schedule.t_start = 3;
  schedule.t_end = 9;
  schedule.lambda_col_min = 0.05;
  schedule.lambda_cf_max = 0.25;
  const auto log = read_loss_log(scratch.dir("sched") + "/loss_log.jsonl");
  REQUIRE(log.size() == 12);
  for (const auto& l : log) {
    const double tau = adasid::progress(l.step, schedule);
    const adasid::ObjectiveWeights w = adasid::objective_weights(tau, schedule);
    CHECK(l.lambda_col == w.lambda_col);
    CHECK(l.lambda_cf == w.lambda_cf);
  }
}

TEST_CASE("master seed flag overrides both training and synthesis seeds") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  const RunResult r = run_cli(scratch, "gen-synth -c " + config + " --seed 99 -o " +
                                           scratch.dir("seeded"));
  REQUIRE(r.exit_code == 0);
  const json echoed = json::parse(file_bytes(scratch.dir("seeded") + "/config.json"));
  CHECK(echoed["synth"]["seed"] == 99);
  CHECK(echoed["train"]["seed"] == 99);
}

TEST_CASE("missing data and bad usage map to their exit classes") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  // No gen-synth ran, so the feature file does not exist: data error.
  const RunResult missing =
      run_cli(scratch, "train -c " + config + " -o " + scratch.dir("x1"));
  CHECK(missing.exit_code == 3);
  CHECK(missing.stderr_text.find("error[data]") != std::string::npos);

  const RunResult bad_flag = run_cli(scratch, "train --no-such-flag -o " +
                                                  scratch.dir("x2"));
  CHECK(bad_flag.exit_code == 2);
  CHECK(bad_flag.stderr_text.find("error[usage]") != std::string::npos);

  const RunResult bad_key = run_cli(
      scratch, "train -c " + config + " -s tokenizer.bogus=1 -o " + scratch.dir("x3"));
  CHECK(bad_key.exit_code == 2);
  CHECK(bad_key.stderr_text.find("error[usage]") != std::string::npos);
  CHECK(bad_key.stderr_text.find("tokenizer.bogus") != std::string::npos);

  const RunResult no_cmd = run_cli(scratch, "");
  CHECK(no_cmd.exit_code == 2);

  // Config file that is not valid JSON: data error.
  const std::string broken = scratch.dir("broken.json");
  std::ofstream(broken) << "{ not json";
  const RunResult bad_config =
      run_cli(scratch, "train -c " + broken + " -o " + scratch.dir("x4"));
  CHECK(bad_config.exit_code == 3);
  CHECK(bad_config.stderr_text.find("error[data]") != std::string::npos);
}

TEST_CASE("encode reproduces the sid table exported by train") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  gen_data(scratch, config);
  const RunResult train =
      run_cli(scratch, "train -c " + config + " -o " + scratch.dir("run"));
  REQUIRE(train.exit_code == 0);

  const RunResult encode = run_cli(
      scratch, "encode --checkpoint " + scratch.dir("run") + "/checkpoint.bin" +
                   " --features " + scratch.dir("data") + "/features.bin -o " +
                   scratch.dir("enc"));
  REQUIRE(encode.exit_code == 0);
  CHECK(file_bytes(scratch.dir("enc") + "/sids.tsv") ==
        file_bytes(scratch.dir("run") + "/sids.tsv"));

  // The checkpoint flag is mandatory.
  const RunResult no_ckpt = run_cli(scratch, "encode -o " + scratch.dir("enc2"));
  CHECK(no_ckpt.exit_code == 2);
}

TEST_CASE("diagnose builds a normalized landscape over sid tables") {
  Scratch scratch;
  // Hand-built tables with known endpoint statistics: one collapsed, one
  // perfectly spread.
  const std::string collapsed = scratch.dir("collapsed.tsv");
  std::ofstream(collapsed) << "a\t0 0\nb\t0 0\nc\t0 0\nd\t0 0\n";
  const std::string spread = scratch.dir("spread.tsv");
  std::ofstream(spread) << "a\t0 0\nb\t1 1\nc\t2 2\nd\t3 3\n";

  const RunResult single =
      run_cli(scratch, "diagnose " + spread + " -o " + scratch.dir("d1"));
  REQUIRE(single.exit_code == 0);
  {
    std::istringstream lines(file_bytes(scratch.dir("d1") + "/landscape.csv"));
    std::string header, row;
    std::getline(lines, header);
    CHECK(header ==
          "name,sid_entropy,avg_ppl,min_ppl,mean_top1,inv_norm_top1,norm_min_ppl");
    std::getline(lines, row);
    CHECK(row.rfind("spread,", 0) == 0);
    CHECK(row.substr(row.size() - 8) == ",1.0,1.0");
  }

  const RunResult both = run_cli(
      scratch, "diagnose " + collapsed + " " + spread + " -o " + scratch.dir("d2"));
  REQUIRE(both.exit_code == 0);
  {
    std::istringstream lines(file_bytes(scratch.dir("d2") + "/landscape.csv"));
    std::string header, row_collapsed, row_spread;
    std::getline(lines, header);
    std::getline(lines, row_collapsed);
    std::getline(lines, row_spread);
    // Collapsed table: maximal top-1 load, minimal perplexity -> (0, 0).
    CHECK(row_collapsed.substr(row_collapsed.size() - 8) == ",0.0,0.0");
    CHECK(row_spread.substr(row_spread.size() - 8) == ",1.0,1.0");
  }

  const std::string malformed = scratch.dir("malformed.tsv");
  std::ofstream(malformed) << "a\t0 0\nb\tx y\n";
  const RunResult bad =
      run_cli(scratch, "diagnose " + malformed + " -o " + scratch.dir("d3"));
  CHECK(bad.exit_code == 3);
  CHECK(bad.stderr_text.find("error[data]") != std::string::npos);
  CHECK(bad.stderr_text.find(":2:") != std::string::npos);
}

TEST_CASE("sweep trains one point per value and tabulates the results") {
  Scratch scratch;
  const std::string config = write_base_config(scratch);
  gen_data(scratch, config);

  const RunResult sweep = run_cli(
      scratch, "sweep -c " + config + " -s train.total_steps=6 --axis f_max" +
                   " --values [2.0,3.0] -o " + scratch.dir("sweep"));
  REQUIRE(sweep.exit_code == 0);
  CHECK(fs::exists(scratch.dir("sweep") + "/point_0/checkpoint.bin"));
  CHECK(fs::exists(scratch.dir("sweep") + "/point_1/checkpoint.bin"));
  CHECK(fs::exists(scratch.dir("sweep") + "/landscape.csv"));

  std::istringstream lines(file_bytes(scratch.dir("sweep") + "/sweep.csv"));
  std::string header, row0, row1, extra;
  std::getline(lines, header);
  CHECK(header == "name,value,sid_entropy,avg_ppl,min_ppl,mean_top1");
  CHECK(std::getline(lines, row0).good());
  CHECK(std::getline(lines, row1).good());
  CHECK(!std::getline(lines, extra).good());
  CHECK(row0.rfind("point_0,\"2.0\",", 0) == 0);
  CHECK(row1.rfind("point_1,\"3.0\",", 0) == 0);
  // The two points embed different f_max values in their echoed configs.
  const json c0 = json::parse(file_bytes(scratch.dir("sweep") + "/point_0/config.json"));
  const json c1 = json::parse(file_bytes(scratch.dir("sweep") + "/point_1/config.json"));
  CHECK(c0["regulation"]["f_max"] == 2.0);
  CHECK(c1["regulation"]["f_max"] == 3.0);

  const RunResult empty = run_cli(
      scratch, "sweep -c " + config + " --axis f_max --values [] -o " +
                   scratch.dir("sweep_empty"));
  CHECK(empty.exit_code == 2);
  CHECK(empty.stderr_text.find("error[usage]") != std::string::npos);

  const RunResult bad_axis = run_cli(
      scratch, "sweep -c " + config + " --axis nonsense --values [1] -o " +
                   scratch.dir("sweep_bad"));
  CHECK(bad_axis.exit_code == 2);
  CHECK(bad_axis.stderr_text.find("invalid sweep axis") != std::string::npos);
}
