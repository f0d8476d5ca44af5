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

#include "adasid/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "adasid/error.hpp"

namespace adasid {
namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::string& section,
                        std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("unknown config key " +
                        (section.empty() ? key : section + "." + key));
    }
  }
}

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_real(const json& obj, const std::string& section, const std::string& key,
                double fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) {
    throw ConfigError(section + "." + key + " must be a number");
  }
  return v->get<double>();
}

std::int64_t get_int(const json& obj, const std::string& section,
                     const std::string& key, std::int64_t fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) {
    throw ConfigError(section + "." + key + " must be an integer");
  }
  return v->get<std::int64_t>();
}

std::uint64_t get_uint(const json& obj, const std::string& section,
                       const std::string& key, std::uint64_t fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_unsigned() && !v->is_number_integer()) {
    throw ConfigError(section + "." + key + " must be a nonnegative integer");
  }
  if (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0) {
    throw ConfigError(section + "." + key + " must be a nonnegative integer");
  }
  return v->get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& section, const std::string& key,
              bool fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) {
    throw ConfigError(section + "." + key + " must be a boolean");
  }
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& section,
                       const std::string& key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) {
    throw ConfigError(section + "." + key + " must be a string");
  }
  return v->get<std::string>();
}

std::vector<double> get_real_vector(const json& obj, const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_array()) {
    throw ConfigError(section + "." + key + " must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v->size());
  for (const json& e : *v) {
    if (!e.is_number()) {
      throw ConfigError(section + "." + key + " must be an array of numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

const json& section_object(const json& j, const std::string& name) {
  static const json kEmpty = json::object();
  const json* v = find(j, name);
  if (v == nullptr) return kEmpty;
  if (!v->is_object()) {
    throw ConfigError("config section \"" + name + "\" must be an object");
  }
  return *v;
}

TokenizerConfig tokenizer_from_json(const json& s) {
  require_known_keys(s, "tokenizer", {"d_in", "d", "L", "K", "beta_commit"});
  TokenizerConfig c;
  c.d_in = get_int(s, "tokenizer", "d_in", c.d_in);
  c.d = get_int(s, "tokenizer", "d", c.d);
  c.L = get_int(s, "tokenizer", "L", c.L);
  c.K = get_int(s, "tokenizer", "K", c.K);
  c.beta_commit = get_real(s, "tokenizer", "beta_commit", c.beta_commit);
  return c;
}

RegulationConfig regulation_from_json(const json& s) {
  require_known_keys(s, "regulation",
                     {"eta", "f_max", "d_max", "alpha", "m_base",
                      "exclude_positive_pairs"});
  RegulationConfig c;
  c.eta = get_real_vector(s, "regulation", "eta", c.eta);
  c.f_max = get_real(s, "regulation", "f_max", c.f_max);
  c.d_max = get_int(s, "regulation", "d_max", c.d_max);
  c.alpha = get_real(s, "regulation", "alpha", c.alpha);
  c.m_base = get_real(s, "regulation", "m_base", c.m_base);
  c.exclude_positive_pairs =
      get_bool(s, "regulation", "exclude_positive_pairs", c.exclude_positive_pairs);
  return c;
}

ScheduleConfig schedule_from_json(const json& s) {
  require_known_keys(s, "schedule",
                     {"t_start", "t_end", "lambda_col_min", "lambda_cf_max"});
  ScheduleConfig c;
  c.t_start = get_int(s, "schedule", "t_start", c.t_start);
  c.t_end = get_int(s, "schedule", "t_end", c.t_end);
  c.lambda_col_min = get_real(s, "schedule", "lambda_col_min", c.lambda_col_min);
  c.lambda_cf_max = get_real(s, "schedule", "lambda_cf_max", c.lambda_cf_max);
  return c;
}

SynthConfig synth_from_json(const json& s) {
  require_known_keys(s, "synth",
                     {"n_items", "n_clusters", "dim", "cluster_spread",
                      "pair_within_cluster_prob", "pairs_per_item", "seed"});
  SynthConfig c;
  c.n_items = get_int(s, "synth", "n_items", c.n_items);
  c.n_clusters = get_int(s, "synth", "n_clusters", c.n_clusters);
  c.dim = get_int(s, "synth", "dim", c.dim);
  c.cluster_spread = get_real(s, "synth", "cluster_spread", c.cluster_spread);
  c.pair_within_cluster_prob =
      get_real(s, "synth", "pair_within_cluster_prob", c.pair_within_cluster_prob);
  c.pairs_per_item = get_int(s, "synth", "pairs_per_item", c.pairs_per_item);
  c.seed = get_uint(s, "synth", "seed", c.seed);
  return c;
}

void train_section_into(const json& s, TrainConfig& c) {
  require_known_keys(s, "train",
                     {"temperature", "batch_size", "total_steps", "seed",
                      "enable_sear", "enable_las", "enable_par",
                      "dead_code_refresh_steps", "lr", "beta1", "beta2", "eps"});
  c.temperature = get_real(s, "train", "temperature", c.temperature);
  c.batch_size = get_int(s, "train", "batch_size", c.batch_size);
  c.total_steps = get_int(s, "train", "total_steps", c.total_steps);
  c.seed = get_uint(s, "train", "seed", c.seed);
  c.enable_sear = get_bool(s, "train", "enable_sear", c.enable_sear);
  c.enable_las = get_bool(s, "train", "enable_las", c.enable_las);
  c.enable_par = get_bool(s, "train", "enable_par", c.enable_par);
  c.dead_code_refresh_steps =
      get_int(s, "train", "dead_code_refresh_steps", c.dead_code_refresh_steps);
  c.adam.lr = get_real(s, "train", "lr", c.adam.lr);
  c.adam.beta1 = get_real(s, "train", "beta1", c.adam.beta1);
  c.adam.beta2 = get_real(s, "train", "beta2", c.adam.beta2);
  c.adam.eps = get_real(s, "train", "eps", c.adam.eps);
}

json tokenizer_to_json(const TokenizerConfig& c) {
  json s;
  s["d_in"] = c.d_in;
  s["d"] = c.d;
  s["L"] = c.L;
  s["K"] = c.K;
  s["beta_commit"] = c.beta_commit;
  return s;
}

json regulation_to_json(const RegulationConfig& c) {
  json s;
  s["eta"] = c.eta;
  s["f_max"] = c.f_max;
  s["d_max"] = c.d_max;
  s["alpha"] = c.alpha;
  s["m_base"] = c.m_base;
  s["exclude_positive_pairs"] = c.exclude_positive_pairs;
  return s;
}

json schedule_to_json(const ScheduleConfig& c) {
  json s;
  s["t_start"] = c.t_start;
  s["t_end"] = c.t_end;
  s["lambda_col_min"] = c.lambda_col_min;
  s["lambda_cf_max"] = c.lambda_cf_max;
  return s;
}

json synth_to_json(const SynthConfig& c) {
  json s;
  s["n_items"] = c.n_items;
  s["n_clusters"] = c.n_clusters;
  s["dim"] = c.dim;
  s["cluster_spread"] = c.cluster_spread;
  s["pair_within_cluster_prob"] = c.pair_within_cluster_prob;
  s["pairs_per_item"] = c.pairs_per_item;
  s["seed"] = c.seed;
  return s;
}

json train_section_to_json(const TrainConfig& c) {
  json s;
  s["temperature"] = c.temperature;
  s["batch_size"] = c.batch_size;
  s["total_steps"] = c.total_steps;
  s["seed"] = c.seed;
  s["enable_sear"] = c.enable_sear;
  s["enable_las"] = c.enable_las;
  s["enable_par"] = c.enable_par;
  s["dead_code_refresh_steps"] = c.dead_code_refresh_steps;
  s["lr"] = c.adam.lr;
  s["beta1"] = c.adam.beta1;
  s["beta2"] = c.adam.beta2;
  s["eps"] = c.adam.eps;
  return s;
}

}  // namespace

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config root must be an object");
  }
  TrainConfig c;
  c.tokenizer = tokenizer_from_json(section_object(j, "tokenizer"));
  c.regulation = regulation_from_json(section_object(j, "regulation"));
  c.schedule = schedule_from_json(section_object(j, "schedule"));
  train_section_into(section_object(j, "train"), c);
  return c;
}

nlohmann::json train_config_to_json(const TrainConfig& config) {
  json j;
  j["tokenizer"] = tokenizer_to_json(config.tokenizer);
  j["regulation"] = regulation_to_json(config.regulation);
  j["schedule"] = schedule_to_json(config.schedule);
  j["train"] = train_section_to_json(config);
  return j;
}

AppConfig app_config_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config root must be an object");
  }
  require_known_keys(j, "",
                     {"data", "tokenizer", "regulation", "schedule", "train", "synth"});
  AppConfig c;
  const json& data = section_object(j, "data");
  require_known_keys(data, "data", {"features", "pairs"});
  c.data.features = get_string(data, "data", "features", "");
  c.data.pairs = get_string(data, "data", "pairs", "");
  c.train = train_config_from_json(j);
  c.synth = synth_from_json(section_object(j, "synth"));
  return c;
}

nlohmann::json app_config_to_json(const AppConfig& config) {
  json j = train_config_to_json(config.train);
  j["data"]["features"] = config.data.features;
  j["data"]["pairs"] = config.data.pairs;
  j["synth"] = synth_to_json(config.synth);
  return j;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open config file " + path);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw DataError(path + ": invalid JSON");
  }
  return j;
}

nlohmann::json loss_breakdown_to_json(const LossBreakdown& lb) {
  json j;
  j["step"] = lb.step;
  j["rec"] = lb.rec;
  j["rq"] = lb.rq;
  j["col_ada"] = lb.col_ada;
  j["cf"] = lb.cf;
  j["lambda_col"] = lb.lambda_col;
  j["lambda_cf"] = lb.lambda_cf;
  j["total"] = lb.total;
  j["active_pairs"] = lb.active_pairs;
  j["gated_pairs"] = lb.gated_pairs;
  return j;
}

LossBreakdown loss_breakdown_from_json(const nlohmann::json& j) {
  LossBreakdown lb;
  lb.step = j.at("step").get<std::int64_t>();
  lb.rec = j.at("rec").get<double>();
  lb.rq = j.at("rq").get<double>();
  lb.col_ada = j.at("col_ada").get<double>();
  lb.cf = j.at("cf").get<double>();
  lb.lambda_col = j.at("lambda_col").get<double>();
  lb.lambda_cf = j.at("lambda_cf").get<double>();
  lb.total = j.at("total").get<double>();
  lb.active_pairs = j.at("active_pairs").get<std::int64_t>();
  lb.gated_pairs = j.at("gated_pairs").get<std::int64_t>();
  return lb;
}

nlohmann::json report_to_json(const DiagnosticsReport& report) {
  json j;
  j["sid_entropy"] = report.sid_entropy;
  j["layer_perplexities"] = report.layer_perplexities;
  j["avg_perplexity"] = report.avg_perplexity;
  j["min_perplexity"] = report.min_perplexity;
  j["mean_top1_load"] = report.mean_top1_load;
  j["corpus_size"] = report.corpus_size;
  return j;
}

void apply_override(nlohmann::json& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("override must look like section.key=value, got \"" +
                     assignment + "\"");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;  // unquoted strings (e.g. paths)

  json* node = &config;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot - begin);
    if (key.empty()) {
      throw UsageError("override key \"" + path + "\" has an empty segment");
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object()) *node = json::object();
    begin = dot + 1;
  }
}

}  // namespace adasid
