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

#ifndef ICV_VERIFY_H_
#define ICV_VERIFY_H_

// Self-check suites run by `icv verify`.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "icv/envs.h"
#include "icv/policy.h"

namespace icv {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  int training_episodes = 20000;
  int min_substeps = 10000;  // propositions, summed over environments
  int estimator_seeds = 200;
  int empowerment_states = 1000;
  double tolerance = 1e-9;
  // Replaces the value of the initial state with NaN before the
  // propositions suite runs.
  bool corrupt_values = false;
};

const std::vector<std::string>& SuiteNames();

// `suite` is one of SuiteNames() or "all". Throws ConfigError otherwise.
std::vector<SuiteReport> RunVerify(const std::string& suite,
                                   const VerifyOptions& options);

SuiteReport RunAxiomsSuite(const VerifyOptions& options);
SuiteReport RunPropositionsSuite(const VerifyOptions& options);
SuiteReport RunDecomposabilitySuite(const VerifyOptions& options);
SuiteReport RunEstimatorSuite(const VerifyOptions& options);
SuiteReport RunEmpowermentSuite(const VerifyOptions& options);

struct TrainedModel {
  EnvSpec spec;
  std::unique_ptr<EnvModel> env;
  TrainingResult result;
};

// Step sizes known to learn each built-in environment within the default
// episode budget.
TrainingConfig RecommendedTrainingConfig(const std::string& env_id);
TrainedModel TrainModel(const EnvSpec& spec, const TrainingConfig& config);

}  // namespace icv

#endif  // ICV_VERIFY_H_
