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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adasid/config.hpp"
#include "adasid/diagnostics.hpp"
#include "adasid/error.hpp"
#include "adasid/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool out_required = true) {
  cmd->add_option("-c,--config", opts.config_path, "Config file (JSON)");
  cmd->add_option("-s,--set", opts.sets,
                  "Override a config field, e.g. --set train.seed=7");
  auto* out = cmd->add_option("-o,--out", opts.out_dir, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", opts.seed,
                  "Master seed (overrides train.seed and synth.seed)");
}

json effective_config_json(const CommonOpts& opts) {
  json j = opts.config_path.empty() ? adasid::app_config_to_json(adasid::AppConfig{})
                                    : adasid::load_config_file(opts.config_path);
  for (const std::string& assignment : opts.sets) {
    adasid::apply_override(j, assignment);
  }
  if (opts.seed.has_value()) {
    j["train"]["seed"] = *opts.seed;
    j["synth"]["seed"] = *opts.seed;
  }
  return j;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw adasid::IoError("cannot create output directory " + dir + ": " +
                          ec.message());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw adasid::IoError("cannot open " + path + " for writing");
  }
  out << text;
  if (!out) {
    throw adasid::IoError("write failure on " + path);
  }
}

void echo_config(const adasid::AppConfig& config, const std::string& out_dir) {
  write_text(out_dir + "/config.json",
             adasid::app_config_to_json(config).dump(2) + "\n");
}

adasid::DiagnosticsReport run_train_to_dir(const adasid::AppConfig& config,
                                           const std::string& out_dir) {
  config.train.validate();
  if (config.data.features.empty() || config.data.pairs.empty()) {
    throw adasid::ConfigError("training requires data.features and data.pairs");
  }
  ensure_dir(out_dir);
  echo_config(config, out_dir);

  const adasid::ItemFeatureTable table = adasid::load_features(config.data.features);
  const adasid::PairList pairs = adasid::load_pairs(config.data.pairs, table);

  adasid::Trainer trainer(config.train, table, pairs);
  trainer.initialize();

  const std::string log_path = out_dir + "/loss_log.jsonl";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) {
    throw adasid::IoError("cannot open " + log_path + " for writing");
  }
  trainer.run([&log](const adasid::LossBreakdown& lb) {
    log << adasid::loss_breakdown_to_json(lb).dump() << '\n';
  });
  if (!log) {
    throw adasid::IoError("write failure on " + log_path);
  }
  log.close();

  adasid::save_checkpoint(trainer.model(), config.train, out_dir + "/checkpoint.bin");
  const adasid::SidTable sids = adasid::encode_corpus(trainer.model(), table);
  adasid::save_sid_table(sids, out_dir + "/sids.tsv");
  const adasid::DiagnosticsReport report = adasid::codebook_report(sids);
  write_text(out_dir + "/diagnostics.json",
             adasid::report_to_json(report).dump(2) + "\n");
  return report;
}

int cmd_gen_synth(const CommonOpts& opts) {
  const adasid::AppConfig config =
      adasid::app_config_from_json(effective_config_json(opts));
  config.synth.validate();
  ensure_dir(opts.out_dir);
  echo_config(config, opts.out_dir);

  const adasid::SynthData data = adasid::gen_synthetic(config.synth);
  adasid::save_features(data.table, opts.out_dir + "/features.bin");
  adasid::save_pairs(data.pairs, data.table, opts.out_dir + "/pairs.tsv");

  std::string labels;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    labels += data.table.ids[i];
    labels += '\t';
    labels += std::to_string(data.labels[i]);
    labels += '\n';
  }
  write_text(opts.out_dir + "/labels.tsv", labels);
  return 0;
}

int cmd_train(const CommonOpts& opts) {
  const adasid::AppConfig config =
      adasid::app_config_from_json(effective_config_json(opts));
  run_train_to_dir(config, opts.out_dir);
  return 0;
}

int cmd_encode(const CommonOpts& opts, const std::string& checkpoint_path,
               const std::string& features_flag) {
  const adasid::AppConfig config =
      adasid::app_config_from_json(effective_config_json(opts));
  const std::string features_path =
      features_flag.empty() ? config.data.features : features_flag;
  if (features_path.empty()) {
    throw adasid::ConfigError("encode requires --features or data.features");
  }
  const adasid::LoadedCheckpoint ckpt = adasid::load_checkpoint(checkpoint_path);
  const adasid::ItemFeatureTable table = adasid::load_features(features_path);
  const adasid::SidTable sids = adasid::encode_corpus(ckpt.state, table);
  ensure_dir(opts.out_dir);
  adasid::save_sid_table(sids, opts.out_dir + "/sids.tsv");
  return 0;
}

int cmd_diagnose(const std::vector<std::string>& table_paths,
                 const std::string& out_dir) {
  std::vector<std::pair<std::string, adasid::DiagnosticsReport>> reports;
  for (const std::string& path : table_paths) {
    const adasid::SidTable table = adasid::load_sid_table(path);
    reports.emplace_back(fs::path(path).stem().string(),
                         adasid::codebook_report(table));
  }
  ensure_dir(out_dir);
  adasid::export_landscape(reports, out_dir + "/landscape.csv");
  return 0;
}

// Axes mirror the tuned hyperparameter grids: one field set varies, the
// rest of the config stays fixed, all points share one master seed.
void apply_sweep_value(json& config, const std::string& axis, const json& value) {
  if (axis == "f_max") {
    if (!value.is_number()) {
      throw adasid::UsageError("sweep axis f_max needs numeric values");
    }
    config["regulation"]["f_max"] = value;
  } else if (axis == "eta_set") {
    if (!value.is_array()) {
      throw adasid::UsageError("sweep axis eta_set needs array values");
    }
    config["regulation"]["eta"] = value;
  } else if (axis == "schedule") {
    if (!value.is_array() || value.size() != 2) {
      throw adasid::UsageError("sweep axis schedule needs [t_start, t_end] values");
    }
    config["schedule"]["t_start"] = value[0];
    config["schedule"]["t_end"] = value[1];
  } else if (axis == "lambda_col_min") {
    if (!value.is_number()) {
      throw adasid::UsageError("sweep axis lambda_col_min needs numeric values");
    }
    config["schedule"]["lambda_col_min"] = value;
  } else if (axis == "lambda_cf_max") {
    if (!value.is_number()) {
      throw adasid::UsageError("sweep axis lambda_cf_max needs numeric values");
    }
    config["schedule"]["lambda_cf_max"] = value;
  } else {
    throw adasid::UsageError(
        "invalid sweep axis \"" + axis +
        "\" (expected f_max, eta_set, schedule, lambda_col_min, lambda_cf_max)");
  }
}

std::string csv_quote(const std::string& raw) {
  std::string out = "\"";
  for (const char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis,
              const std::string& values_text) {
  const json values = json::parse(values_text, nullptr, false);
  if (values.is_discarded() || !values.is_array()) {
    throw adasid::UsageError("--values must be a JSON array");
  }
  if (values.empty()) {
    throw adasid::UsageError("--values must not be empty");
  }

  const json base = effective_config_json(opts);
  ensure_dir(opts.out_dir);

  std::vector<std::pair<std::string, adasid::DiagnosticsReport>> reports;
  std::string sweep_csv = "name,value,sid_entropy,avg_ppl,min_ppl,mean_top1\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    json point = base;
    apply_sweep_value(point, axis, values[i]);
    const adasid::AppConfig config = adasid::app_config_from_json(point);
    const std::string name = "point_" + std::to_string(i);
    const adasid::DiagnosticsReport report =
        run_train_to_dir(config, opts.out_dir + "/" + name);
    sweep_csv += name;
    sweep_csv += ',';
    sweep_csv += csv_quote(values[i].dump());
    sweep_csv += ',';
    sweep_csv += json(report.sid_entropy).dump();
    sweep_csv += ',';
    sweep_csv += json(report.avg_perplexity).dump();
    sweep_csv += ',';
    sweep_csv += json(report.min_perplexity).dump();
    sweep_csv += ',';
    sweep_csv += json(report.mean_top1_load).dump();
    sweep_csv += '\n';
    reports.emplace_back(name, report);
  }
  write_text(opts.out_dir + "/sweep.csv", sweep_csv);
  adasid::export_landscape(reports, opts.out_dir + "/landscape.csv");
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"AdaSID: adaptive semantic-ID tokenizer"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  CLI::App* gen = app.add_subcommand(
      "gen-synth", "Generate a synthetic clustered corpus and pair list");
  add_common(gen, gen_opts);

  CommonOpts train_opts;
  CLI::App* train = app.add_subcommand(
      "train", "Train a tokenizer and export checkpoint, SIDs, diagnostics");
  add_common(train, train_opts);

  CommonOpts encode_opts;
  std::string encode_checkpoint;
  std::string encode_features;
  CLI::App* encode =
      app.add_subcommand("encode", "Encode a corpus to SIDs with a frozen model");
  add_common(encode, encode_opts);
  encode->add_option("--checkpoint", encode_checkpoint, "Checkpoint file")
      ->required();
  encode->add_option("--features", encode_features,
                     "Feature file (defaults to data.features)");

  std::vector<std::string> diagnose_tables;
  std::string diagnose_out;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "Landscape report over SID tables");
  diagnose->add_option("tables", diagnose_tables, "SID table files")->required();
  diagnose->add_option("-o,--out", diagnose_out, "Output directory")->required();

  CommonOpts sweep_opts;
  std::string sweep_axis;
  std::string sweep_values;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Train once per value of one hyperparameter axis");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", sweep_axis,
                    "f_max, eta_set, schedule, lambda_col_min, lambda_cf_max")
      ->required();
  sweep->add_option("--values", sweep_values, "JSON array of axis values")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << std::endl;
    return 2;
  }

  if (gen->parsed()) return cmd_gen_synth(gen_opts);
  if (train->parsed()) return cmd_train(train_opts);
  if (encode->parsed()) {
    return cmd_encode(encode_opts, encode_checkpoint, encode_features);
  }
  if (diagnose->parsed()) return cmd_diagnose(diagnose_tables, diagnose_out);
  if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_axis, sweep_values);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const adasid::Error& e) {
    std::cerr << "error[" << e.class_name() << "]: " << e.what() << std::endl;
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << std::endl;
    return 1;
  }
}
