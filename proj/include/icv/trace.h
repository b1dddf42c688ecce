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

#ifndef ICV_TRACE_H_
#define ICV_TRACE_H_

// Episode traces: recording, a line-oriented text format, and offline chain
// reconstruction.
//
// File format (tab separated, integers in decimal, '-' for absent fields):
//   ICVTRACE <version> <env id> <agents> <shared> <seed> <horizon>
//   <t> <state> <actions> <rewards> <sigma> <owners>     one line per step
//   <T> <state> - - - -                                  final state
//   #truncated <reason>                                  optional
// <state> lists agent components then shared components, comma separated.
// <owners> holds, per shared component, the agent whose sub-step changed it
// or -1.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icv/game.h"
#include "icv/policy.h"

namespace icv {

struct StepRecord {
  int t = 0;
  GlobalState state;
  std::optional<ActionProfile> actions;
  std::optional<std::vector<double>> rewards;
  std::optional<Permutation> sigma;
  std::optional<std::vector<int>> shared_owner;

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeTrace {
  static constexpr int kVersion = 1;

  std::string env_id;
  int agent_count = 0;
  int shared_count = 0;
  std::uint64_t seed = 0;
  int horizon = 0;
  // steps[t] for t = 0..T; the last record carries the final state only.
  std::vector<StepRecord> steps;
  std::optional<std::string> truncation_reason;

  int length() const { return static_cast<int>(steps.size()) - 1; }
  bool operator==(const EpisodeTrace&) const = default;
};

struct RecordOptions {
  int horizon = 0;  // 0 = environment horizon
  std::uint64_t episode = 0;
  // Sequential execution samples σ each step, runs the sub-step kernels and
  // records σ with the owner annotations. Otherwise the joint kernel is used.
  bool sequential = true;
  OrderDistribution order = OrderDistribution::Uniform();
};

// Actions are drawn simultaneously from the policy at s_t. When `chains` is
// given, the online sub-step chains are appended to it.
EpisodeTrace RecordEpisode(const EnvModel& env, const TabularPolicy& policy,
                           std::uint64_t seed, const RecordOptions& options = {},
                           std::vector<Chain>* chains = nullptr);

std::string SerializeTrace(const EpisodeTrace& trace);
EpisodeTrace ParseTrace(const std::string& text);
void SaveTrace(const std::string& path, const EpisodeTrace& trace);
EpisodeTrace LoadTrace(const std::string& path);

// Checks shapes, contiguity and, for each step, that s_{t+1} lies in the
// support of the joint kernel. Throws ValidationError.
void ValidateTrace(const EnvModel& env, const EpisodeTrace& trace);

struct OrderSource {
  enum class Kind { kRecorded, kInjected };
  Kind kind = Kind::kRecorded;
  OrderDistribution injected = OrderDistribution::Uniform();

  static OrderSource Recorded() { return {}; }
  static OrderSource Injected(OrderDistribution d) {
    return {Kind::kInjected, std::move(d)};
  }
};

// One chain per recorded step. Injected orders come from the order stream
// of (seed, stream, t).
std::vector<Chain> ReconstructForAttribution(const EpisodeTrace& trace,
                                             const OrderSource& source,
                                             std::uint64_t seed,
                                             std::uint64_t stream = 0);

}  // namespace icv

#endif  // ICV_TRACE_H_
