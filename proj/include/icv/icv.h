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

#ifndef ICV_ICV_H_
#define ICV_ICV_H_

// C interface to the icv library. Every function returns an icv_status;
// on failure icv_last_error() describes the problem (thread-local, valid
// until the next call on that thread). Strings handed out through char**
// must be released with icv_free_string.

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum icv_status {
  ICV_OK = 0,
  ICV_ERR_VALIDATION = 1,
  ICV_ERR_SUPPORT = 2,
  ICV_ERR_ACTION = 3,
  ICV_ERR_SEQUENCE_COMPLETE = 4,
  ICV_ERR_UNSUPPORTED = 5,
  ICV_ERR_PARSE = 6,
  ICV_ERR_VERSION = 7,
  ICV_ERR_CONFIG = 8,
  ICV_ERR_TRAINING = 9,
  ICV_ERR_LOOKUP = 10,
  ICV_ERR_EXCLUDED_ORDER = 11,
  ICV_ERR_IO = 12,
  // The command ran but at least one verification check failed.
  ICV_ERR_CHECKS_FAILED = 64,
  ICV_ERR_INTERNAL = 99,
} icv_status;

typedef struct icv_env icv_env;
typedef struct icv_model icv_model;

const char* icv_version(void);
const char* icv_last_error(void);
const char* icv_status_name(icv_status status);
void icv_free_string(char* s);

// Commands. `config_json` is a JSON object (NULL or "" for defaults);
// `out_json` receives the JSON summary and may be NULL.
icv_status icv_cmd_train(const char* config_json, char** out_json);
icv_status icv_cmd_rollout(const char* config_json, char** out_json);
icv_status icv_cmd_attribute(const char* config_json, char** out_json);
icv_status icv_cmd_verify(const char* config_json, char** out_json);

// Environments, built from the "env" section of a config.
icv_status icv_env_create(const char* env_json, icv_env** out);
void icv_env_destroy(icv_env* env);
icv_status icv_env_describe(const icv_env* env, char** out);
icv_status icv_env_agent_count(const icv_env* env, int* out);
// Checks the sequential decomposition over every state and joint action.
icv_status icv_env_decomposability(const icv_env* env, double tolerance,
                                   int* passed, double* max_discrepancy);

// Trained tables loaded from a checkpoint file.
icv_status icv_model_load(const char* path, icv_model** out);
void icv_model_destroy(icv_model* model);

// Attributes the traces at `paths` using the "attribution" section of
// `settings_json` together with its "seed".
icv_status icv_attribute_traces(const icv_env* env, const icv_model* model,
                                const char* const* paths, size_t path_count,
                                const char* settings_json, char** out_json);

// Information measures in bits. `probs` must sum to one.
icv_status icv_entropy(const double* probs, size_t n, double* out_bits);
// Row-major channel matrix, one row per input.
icv_status icv_channel_capacity(const double* matrix, size_t rows, size_t cols,
                                double* out_bits);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // ICV_ICV_H_
