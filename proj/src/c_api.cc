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

#include "icv/icv.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "commands.h"
#include "icv/attribution.h"
#include "icv/envs.h"
#include "icv/errors.h"
#include "icv/infotheory.h"
#include "icv/policy.h"
#include "icv/trace.h"

struct icv_env {
  icv::EnvSpec spec;
  std::unique_ptr<icv::EnvModel> model;
};

struct icv_model {
  icv::Checkpoint checkpoint;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json ParseJson(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw icv::ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename Fn>
icv_status Guard(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const icv::Error& e) {
    last_error = e.what();
    return static_cast<icv_status>(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("configuration: ") + e.what();
    return ICV_ERR_CONFIG;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ICV_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return ICV_ERR_INTERNAL;
  }
}

icv_status NullArg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return ICV_ERR_VALIDATION;
}

template <typename Cmd>
icv_status RunCommand(Cmd cmd, const char* config_json, char** out_json) {
  return Guard([&]() -> icv_status {
    const json summary = cmd(ParseJson(config_json));
    if (out_json != nullptr) *out_json = Dup(summary.dump(2));
    if (summary.contains("passed") && !summary.at("passed").get<bool>()) {
      last_error = "verification checks failed";
      return ICV_ERR_CHECKS_FAILED;
    }
    return ICV_OK;
  });
}

}  // namespace

extern "C" {

const char* icv_version(void) { return "0.1.0"; }

const char* icv_last_error(void) { return last_error.c_str(); }

const char* icv_status_name(icv_status status) {
  switch (status) {
    case ICV_OK: return "ok";
    case ICV_ERR_VALIDATION: return "validation";
    case ICV_ERR_SUPPORT: return "support";
    case ICV_ERR_ACTION: return "action";
    case ICV_ERR_SEQUENCE_COMPLETE: return "sequence_complete";
    case ICV_ERR_UNSUPPORTED: return "unsupported";
    case ICV_ERR_PARSE: return "parse";
    case ICV_ERR_VERSION: return "version";
    case ICV_ERR_CONFIG: return "config";
    case ICV_ERR_TRAINING: return "training";
    case ICV_ERR_LOOKUP: return "lookup";
    case ICV_ERR_EXCLUDED_ORDER: return "excluded_order";
    case ICV_ERR_IO: return "io";
    case ICV_ERR_CHECKS_FAILED: return "checks_failed";
    case ICV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void icv_free_string(char* s) { std::free(s); }

icv_status icv_cmd_train(const char* config_json, char** out_json) {
  return RunCommand(icv::CmdTrain, config_json, out_json);
}

icv_status icv_cmd_rollout(const char* config_json, char** out_json) {
  return RunCommand(icv::CmdRollout, config_json, out_json);
}

icv_status icv_cmd_attribute(const char* config_json, char** out_json) {
  return RunCommand(icv::CmdAttribute, config_json, out_json);
}

icv_status icv_cmd_verify(const char* config_json, char** out_json) {
  return RunCommand(icv::CmdVerify, config_json, out_json);
}

icv_status icv_env_create(const char* env_json, icv_env** out) {
  if (out == nullptr) return NullArg("out");
  *out = nullptr;
  return Guard([&]() -> icv_status {
    const json config = icv::ResolveConfig(
        "train", json{{"env", ParseJson(env_json)}});
    auto env = std::make_unique<icv_env>();
    env->spec = icv::EnvSpecFromConfig(config);
    env->model = icv::MakeEnv(env->spec);
    *out = env.release();
    return ICV_OK;
  });
}

void icv_env_destroy(icv_env* env) { delete env; }

icv_status icv_env_describe(const icv_env* env, char** out) {
  if (env == nullptr) return NullArg("env");
  if (out == nullptr) return NullArg("out");
  return Guard([&]() -> icv_status {
    *out = Dup(icv::DescribeEnvSpec(env->spec));
    return ICV_OK;
  });
}

icv_status icv_env_agent_count(const icv_env* env, int* out) {
  if (env == nullptr) return NullArg("env");
  if (out == nullptr) return NullArg("out");
  *out = env->model->agent_count();
  return ICV_OK;
}

icv_status icv_env_decomposability(const icv_env* env, double tolerance,
                                   int* passed, double* max_discrepancy) {
  if (env == nullptr) return NullArg("env");
  return Guard([&]() -> icv_status {
    icv::DecomposabilityMode mode;
    mode.exhaustive = true;
    mode.tolerance = tolerance;
    const icv::DecomposabilityReport report =
        icv::VerifyDecomposability(*env->model, mode);
    if (passed != nullptr) *passed = report.passed() ? 1 : 0;
    if (max_discrepancy != nullptr) *max_discrepancy = report.max_discrepancy;
    return ICV_OK;
  });
}

icv_status icv_model_load(const char* path, icv_model** out) {
  if (path == nullptr) return NullArg("path");
  if (out == nullptr) return NullArg("out");
  *out = nullptr;
  return Guard([&]() -> icv_status {
    auto model = std::make_unique<icv_model>();
    model->checkpoint = icv::LoadCheckpoint(path);
    *out = model.release();
    return ICV_OK;
  });
}

void icv_model_destroy(icv_model* model) { delete model; }

icv_status icv_attribute_traces(const icv_env* env, const icv_model* model,
                                const char* const* paths, size_t path_count,
                                const char* settings_json, char** out_json) {
  if (env == nullptr) return NullArg("env");
  if (model == nullptr) return NullArg("model");
  if (paths == nullptr && path_count > 0) return NullArg("paths");
  return Guard([&]() -> icv_status {
    const json config = icv::ResolveConfig("attribute", ParseJson(settings_json));
    const std::uint64_t seed =
        config.at("seed").is_null() ? 0 : config.at("seed").get<std::uint64_t>();
    const icv::AttributionSettings settings =
        icv::AttributionSettingsFromConfig(config, seed);
    std::vector<icv::EpisodeTrace> traces;
    for (size_t i = 0; i < path_count; ++i) {
      traces.push_back(icv::LoadTrace(paths[i]));
      icv::ValidateTrace(*env->model, traces.back());
    }
    const icv::Tables tables{&model->checkpoint.policy,
                             &model->checkpoint.values};
    const icv::AttributionReport report =
        icv::Attribute(*env->model, tables, traces, settings);
    if (out_json != nullptr) {
      *out_json = Dup(icv::AttributionReportJson(report).dump(2));
    }
    return ICV_OK;
  });
}

icv_status icv_entropy(const double* probs, size_t n, double* out_bits) {
  if (probs == nullptr) return NullArg("probs");
  if (out_bits == nullptr) return NullArg("out_bits");
  return Guard([&]() -> icv_status {
    *out_bits = icv::Entropy(icv::Pmf(std::vector<double>(probs, probs + n)));
    return ICV_OK;
  });
}

icv_status icv_channel_capacity(const double* matrix, size_t rows, size_t cols,
                                double* out_bits) {
  if (matrix == nullptr) return NullArg("matrix");
  if (out_bits == nullptr) return NullArg("out_bits");
  return Guard([&]() -> icv_status {
    std::vector<icv::Pmf> pmfs;
    for (size_t r = 0; r < rows; ++r) {
      pmfs.emplace_back(
          std::vector<double>(matrix + r * cols, matrix + (r + 1) * cols));
    }
    *out_bits = icv::ChannelCapacity(icv::Channel(std::move(pmfs))).capacity;
    return ICV_OK;
  });
}

}  // extern "C"
