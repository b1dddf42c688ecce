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

#ifndef ICV_POLICY_H_
#define ICV_POLICY_H_

// Tabular policies, value tables, actor-critic training and checkpoints.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "icv/envs.h"
#include "icv/game.h"
#include "icv/infotheory.h"

namespace icv {

// Strict lookups raise LookupError for keys that have neither an entry nor a
// declared default. Lenient lookups fall back (uniform policy, value 0) and
// count the miss so reports can flag it.
enum class LookupMode { kStrict, kLenient };

// What a key without an explicit entry evaluates to.
enum class PolicyDefault { kNone, kUniform };
enum class ValueDefault { kNone, kZero };

namespace internal {
// Copyable relaxed counter.
class Counter {
 public:
  Counter() = default;
  Counter(const Counter& other) : value_(other.get()) {}
  Counter& operator=(const Counter& other) {
    value_.store(other.get(), std::memory_order_relaxed);
    return *this;
  }
  void Increment() const { value_.fetch_add(1, std::memory_order_relaxed); }
  std::int64_t get() const { return value_.load(std::memory_order_relaxed); }
  void Reset() const { value_.store(0, std::memory_order_relaxed); }

 private:
  mutable std::atomic<std::int64_t> value_{0};
};
}  // namespace internal

class TabularPolicy {
 public:
  TabularPolicy() = default;
  explicit TabularPolicy(std::vector<int> action_counts,
                         PolicyDefault default_rule = PolicyDefault::kUniform);

  int agent_count() const { return static_cast<int>(action_counts_.size()); }
  int action_count(int agent) const { return action_counts_[agent]; }
  const std::vector<int>& action_counts() const { return action_counts_; }
  PolicyDefault default_rule() const { return default_rule_; }

  void set_mode(LookupMode mode) { mode_ = mode; }
  LookupMode mode() const { return mode_; }

  // Throws ValidationError if `probs` is not a valid Pmf of the right size.
  void Set(int agent, StateKey key, std::vector<double> probs);
  bool Contains(int agent, StateKey key) const;
  Pmf Distribution(int agent, StateKey key) const;

  // π^agent(· | s^{(view)}); view defaults to the agent itself.
  Pmf At(const EnvModel& env, int agent, const GlobalState& s) const;
  Pmf AtView(const EnvModel& env, int agent, const GlobalState& s,
             int view) const;

  std::size_t entry_count(int agent) const { return index_[agent].size(); }
  std::vector<StateKey> SortedKeys(int agent) const;

  std::int64_t lenient_misses() const { return misses_.get(); }
  std::int64_t default_hits() const { return default_hits_.get(); }

 private:
  void CheckAgent(int agent) const;

  std::vector<int> action_counts_;
  PolicyDefault default_rule_ = PolicyDefault::kUniform;
  LookupMode mode_ = LookupMode::kStrict;
  std::vector<std::vector<double>> probs_;  // flat rows per agent
  std::vector<std::unordered_map<StateKey, std::size_t>> index_;
  internal::Counter misses_;
  internal::Counter default_hits_;
};

// Per-agent table V^i keyed by ValueKey. A shared table stores one function
// read by every agent.
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(int agent_count, ValueDefault default_rule, bool shared = false);

  int agent_count() const { return agents_; }
  bool shared() const { return shared_; }
  ValueDefault default_rule() const { return default_rule_; }
  void set_mode(LookupMode mode) { mode_ = mode; }
  LookupMode mode() const { return mode_; }

  void Set(int agent, StateKey key, double value);
  // Stores any value, including non-finite ones (fault injection).
  void SetUnchecked(int agent, StateKey key, double value);
  bool Contains(int agent, StateKey key) const;
  double Get(int agent, StateKey key) const;

  std::size_t entry_count(int agent) const;
  std::vector<std::pair<StateKey, double>> SortedEntries(int agent) const;

  std::int64_t lenient_misses() const { return misses_.get(); }

 private:
  int Slot(int agent) const;

  int agents_ = 0;
  bool shared_ = false;
  ValueDefault default_rule_ = ValueDefault::kZero;
  LookupMode mode_ = LookupMode::kStrict;
  std::vector<std::unordered_map<StateKey, double>> tables_;
  internal::Counter misses_;
};

// Static-predictor lookup; intermediate states are looked up by their state.
double EvaluateValue(const ValueTable& vt, const EnvModel& env, int agent,
                     const GlobalState& s);
double EvaluateValue(const ValueTable& vt, const EnvModel& env, int agent,
                     const IntermediateState& s);

struct ScriptedRow {
  int agent = 0;
  StateKey key = 0;
  std::vector<double> probs;
};

TabularPolicy ScriptedPolicy(std::vector<int> action_counts,
                             const std::vector<ScriptedRow>& rows);

// Fills every key state for which `rule` returns a distribution.
using ScriptRule =
    std::function<std::optional<std::vector<double>>(int agent,
                                                     const Observation& obs)>;
TabularPolicy ScriptedPolicy(const EnvModel& env, const ScriptRule& rule);

// --- Training ------------------------------------------------------------------

struct TrainingConfig {
  double actor_step = 0.05;
  double critic_step = 0.1;
  double entropy_coef = 0.02;
  std::optional<double> discount;  // defaults to the environment's
  int episodes = 50000;
  int horizon = 0;  // 0 = environment horizon
  std::uint64_t seed = 0;
  bool shared_critic = false;
  // Fraction of episodes started from a uniformly sampled well-formed state
  // instead of the initial distribution.
  double exploring_starts = 0.5;
  double divergence_threshold = 1e6;
  int curve_interval = 500;

  std::uint64_t Hash() const;
};

struct CurvePoint {
  int episode = 0;        // last episode in the window
  double mean_return = 0.0;  // discounted, averaged over agents
  double mean_length = 0.0;
};

struct TrainingResult {
  TabularPolicy policy;
  ValueTable values;
  std::vector<CurvePoint> curve;
  double final_average_return = 0.0;  // last curve window
  double min_state_entropy = 0.0;     // bits, over visited observations
  double mean_state_entropy = 0.0;
  std::int64_t visited_observations = 0;
  std::uint64_t config_hash = 0;
};

// Softmax tabular actor-critic with one critic V^i(s) per agent over the
// global state and one actor per agent over its individualized observation.
// Throws TrainingError when a value magnitude exceeds the threshold.
TrainingResult TrainActorCritic(const EnvModel& env,
                                const TrainingConfig& config);

struct EvaluationResult {
  std::vector<double> mean_discounted_return;  // per agent
  std::vector<double> mean_return;             // undiscounted, per agent
  double success_rate = 0.0;  // episodes with a positive reward for agent 0
  double terminal_rate = 0.0;
  double mean_length = 0.0;
};

// Monte Carlo evaluation under simultaneous action selection.
EvaluationResult EvaluatePolicy(const EnvModel& env,
                                const TabularPolicy& policy, int episodes,
                                std::uint64_t seed, int horizon = 0);

// --- Checkpoints ------------------------------------------------------------------

struct Checkpoint {
  static constexpr int kVersion = 1;

  std::string env;  // DescribeEnvSpec or env id
  std::vector<int> action_counts;
  std::uint64_t config_hash = 0;
  TabularPolicy policy;
  ValueTable values;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(const std::string& text);
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

std::uint64_t Fnv1a(std::string_view data,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace icv

#endif  // ICV_POLICY_H_
