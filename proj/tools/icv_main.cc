// Copyright 2026 The ICV Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// icv: train, roll out, attribute and verify from the command line.
//
//   icv train --env keylock --out runs/k
//   icv rollout --seed 1 --episodes 20 --out runs/k
//   icv attribute --seed 1 --kinds value,peak --out runs/k
//   icv verify --suite all --out runs/verify
//
// Flags override the matching entries of --config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "icv/icv.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::string> env;
  std::optional<std::string> layout;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> horizon;
  std::optional<std::string> kinds;
  std::optional<std::string> agents;
  std::optional<std::string> estimator;
  std::optional<std::string> filter;
  std::optional<std::string> scale;
  std::optional<int> stride;
  std::optional<std::string> out;
  std::optional<std::string> checkpoint;
  std::optional<std::string> traces;
  std::optional<std::string> suite;
  std::optional<std::string> lookup;
  bool export_records = false;
  bool corrupt_values = false;
  bool quiet = false;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
}

json BuildConfig(const std::string& command, const Flags& f) {
  json c = LoadConfig(f.config);
  if (f.env) c["env"]["id"] = *f.env;
  if (f.layout) c["env"]["layout"] = *f.layout;
  if (f.horizon) c["env"]["horizon"] = *f.horizon;
  if (f.seed) c["seed"] = *f.seed;
  if (f.out) c["out"] = *f.out;
  if (f.checkpoint) c["checkpoint"] = *f.checkpoint;
  if (f.traces) c["traces"] = *f.traces;
  if (f.lookup) c["lookup"] = *f.lookup;
  if (f.episodes) {
    const char* section = command == "train"     ? "training"
                          : command == "rollout" ? "rollout"
                          : command == "verify"  ? "verify"
                                                 : "attribution";
    c[section][command == "verify" ? "training_episodes" : "episodes"] =
        *f.episodes;
  }
  if (f.kinds) c["attribution"]["kinds"] = SplitList(*f.kinds);
  if (f.agents) {
    json agents = json::array();
    for (const std::string& a : SplitList(*f.agents)) {
      agents.push_back(std::stoi(a));
    }
    c["attribution"]["agents"] = agents;
  }
  if (f.estimator) c["attribution"]["estimator"] = *f.estimator;
  if (f.filter) c["attribution"]["coalition_filter"] = *f.filter;
  if (f.scale) c["attribution"]["scale"] = *f.scale;
  if (f.stride) c["attribution"]["stride"] = *f.stride;
  if (f.export_records) c["attribution"]["export_records"] = true;
  if (f.suite) c["verify"]["suite"] = *f.suite;
  if (f.corrupt_values) c["verify"]["corrupt_values"] = true;
  return c;
}

void PrintSummary(const std::string& command, const json& s) {
  if (command == "verify") {
    for (const json& suite : s.at("suites")) {
      for (const json& check : suite.at("checks")) {
        std::printf("%s %s/%s %s\n", check.at("passed").get<bool>() ? "PASS" : "FAIL",
                    suite.at("suite").get<std::string>().c_str(),
                    check.at("name").get<std::string>().c_str(),
                    check.at("detail").get<std::string>().c_str());
      }
    }
    return;
  }
  if (command == "attribute") {
    std::printf("agent kind phi_raw phi_normalized (kappa %.6g)\n",
                s.at("kappa").get<double>());
    for (const json& e : s.at("entries")) {
      std::printf("%d %s %.6g %.6g\n", e.at("agent").get<int>(),
                  e.at("kind").get<std::string>().c_str(),
                  e.at("phi_raw").get<double>(),
                  e.at("phi_normalized").get<double>());
    }
    return;
  }
  json brief = s;
  brief.erase("files");
  std::printf("%s\n", brief.dump(2).c_str());
}

int Run(const std::string& command, const Flags& flags) {
  json config;
  try {
    config = BuildConfig(command, flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "icv %s: %s\n", command.c_str(), e.what());
    return 2;
  }
  using CommandFn = icv_status (*)(const char*, char**);
  const CommandFn fn = command == "train"     ? icv_cmd_train
                       : command == "rollout" ? icv_cmd_rollout
                       : command == "attribute" ? icv_cmd_attribute
                                                : icv_cmd_verify;
  char* out = nullptr;
  const icv_status status = fn(config.dump().c_str(), &out);
  if (out != nullptr) {
    if (!flags.quiet) PrintSummary(command, json::parse(out));
    icv_free_string(out);
  }
  if (status != ICV_OK) {
    std::fprintf(stderr, "icv %s: %s error: %s\n", command.c_str(),
                 icv_status_name(status), icv_last_error());
    return status == ICV_ERR_CHECKS_FAILED ? 1 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action attribution for tabular multi-agent policies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(icv_version()));

  Flags flags;
  auto common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON configuration file");
    sub->add_option("--env", flags.env, "keylock, foraging or tag");
    sub->add_option("--layout", flags.layout, "keylock layout name or path");
    sub->add_option("--horizon", flags.horizon, "episode horizon");
    sub->add_option("--seed", flags.seed, "run seed");
    sub->add_option("--episodes", flags.episodes, "episode count");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_flag("--quiet", flags.quiet, "suppress the summary");
  };
  CLI::App* train = app.add_subcommand("train", "train tabular actor-critic");
  common(train);
  train->add_option("--checkpoint", flags.checkpoint, "checkpoint path");

  CLI::App* rollout = app.add_subcommand("rollout", "record episode traces");
  common(rollout);
  rollout->add_option("--checkpoint", flags.checkpoint, "checkpoint path");

  CLI::App* attribute = app.add_subcommand("attribute", "attribute traces");
  common(attribute);
  attribute->add_option("--checkpoint", flags.checkpoint, "checkpoint path");
  attribute->add_option("--traces", flags.traces, "trace file or directory");
  attribute->add_option("--kinds", flags.kinds, "comma-separated kinds");
  attribute->add_option("--agents", flags.agents, "comma-separated agents");
  attribute->add_option("--estimator", flags.estimator, "exact or mc");
  attribute->add_option("--coalition-filter", flags.filter,
                        "all, teammates or opponents");
  attribute->add_option("--scale", flags.scale, "natural or unit");
  attribute->add_option("--stride", flags.stride, "history stride");
  attribute->add_option("--lookup", flags.lookup, "strict or lenient");
  attribute->add_flag("--export-records", flags.export_records,
                      "write marginals.jsonl");

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  common(verify);
  verify->add_option("--suite", flags.suite,
                     "axioms, decomposability, propositions, estimator, "
                     "empowerment or all");
  verify->add_flag("--corrupt-values", flags.corrupt_values,
                   "inject a NaN into the trained value table");

  CLI11_PARSE(app, argc, argv);
  for (CLI::App* sub : {train, rollout, attribute, verify}) {
    if (sub->parsed()) return Run(sub->get_name(), flags);
  }
  return 2;
}
