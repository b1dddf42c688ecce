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

#ifndef ICV_GAME_H_
#define ICV_GAME_H_

// Markov-game model and its sequential (per-agent sub-step) decomposition.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "icv/rng.h"

namespace icv {

// Factored global state: one opaque discrete local state per agent plus
// discrete components owned by no agent (locks, apples, ...).
struct GlobalState {
  std::vector<int> agents;
  std::vector<int> shared;

  bool operator==(const GlobalState&) const = default;
  auto operator<=>(const GlobalState&) const = default;
};

std::string ToString(const GlobalState& s);
// Test-framework printer.
inline void PrintTo(const GlobalState& s, std::ostream* os) { *os << ToString(s); }

struct ActionProfile {
  std::vector<int> actions;

  bool operator==(const ActionProfile&) const = default;
};

// A bijection from sub-step position (0-based) to agent index.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> order);
  static Permutation Identity(int n);

  int size() const { return static_cast<int>(order_.size()); }
  int at(int position) const { return order_[position]; }
  int PositionOf(int agent) const { return position_[agent]; }
  const std::vector<int>& order() const { return order_; }
  bool IsLast(int agent) const { return PositionOf(agent) == size() - 1; }

  // Agents acting after `agent`, in order: the coalition C_σ^i.
  std::vector<int> Successors(int agent) const;

  bool operator==(const Permutation& other) const {
    return order_ == other.order_;
  }

 private:
  std::vector<int> order_;
  std::vector<int> position_;
};

std::vector<Permutation> AllPermutations(int n);
// Orders placing `agent` anywhere but last (Σ₊^i).
std::vector<Permutation> AdmissibleOrders(int n, int agent);
std::uint64_t Factorial(int n);

class OrderDistribution {
 public:
  enum class Kind { kUniform, kFixed, kUniformRestricted };

  static OrderDistribution Uniform() { return OrderDistribution(Kind::kUniform); }
  static OrderDistribution Fixed(Permutation order);
  static OrderDistribution UniformRestricted(int agent);

  Kind kind() const { return kind_; }
  const std::optional<Permutation>& fixed_order() const { return fixed_; }
  int restricted_agent() const { return agent_; }

 private:
  explicit OrderDistribution(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::optional<Permutation> fixed_;
  int agent_ = -1;
};

Permutation SampleOrder(const OrderDistribution& dist, int n, Rng& rng);

struct Transition {
  GlobalState state;
  double probability = 1.0;
};

enum class GameType { kCooperative, kCompetitive, kMixed };

struct RewardBounds {
  double min = 0.0;
  double max = 0.0;
};

// A finite Markov game with per-agent sequential kernels. Environments are
// immutable after construction; every method is const and thread-safe.
class EnvModel {
 public:
  virtual ~EnvModel() = default;

  virtual std::string id() const = 0;
  virtual int agent_count() const = 0;
  virtual int action_count(int agent) const = 0;
  virtual std::string action_name(int agent, int action) const = 0;
  // Cardinality of each agent's local state space and each shared component.
  virtual int local_state_count(int agent) const = 0;
  virtual int shared_count() const = 0;
  virtual int shared_state_count(int component) const = 0;

  virtual GameType game_type() const = 0;
  virtual int team(int /*agent*/) const { return 0; }
  virtual double discount() const = 0;
  virtual int horizon() const = 0;
  virtual RewardBounds reward_bounds() const = 0;

  // ρ.
  virtual std::vector<Transition> InitialDistribution() const = 0;
  // P^i(· | s, a^i): changes only agent i's component and shared components
  // that agent i's action causally flips.
  virtual std::vector<Transition> SubstepKernel(const GlobalState& s, int agent,
                                                int action) const = 0;
  virtual bool has_joint_kernel() const { return true; }
  // P(· | s, a), written directly in simultaneous-move semantics.
  virtual std::vector<Transition> JointKernel(const GlobalState& s,
                                              const ActionProfile& a) const = 0;
  // Per-agent rewards on a full-step transition. Sub-steps carry no reward.
  virtual std::vector<double> Rewards(const GlobalState& s,
                                      const ActionProfile& a,
                                      const GlobalState& next) const = 0;
  virtual bool IsTerminal(const GlobalState& s) const = 0;

  // Every decision-step state (used by exhaustive checks).
  virtual std::vector<GlobalState> EnumerateStates() const = 0;
  // True for shared components that only ever change on the last sub-step of
  // a step (whoever acts last); recorders then leave the owner unannotated.
  virtual bool SharedFlipsAtCompletion(int /*component*/) const {
    return false;
  }
  // Whether an in-range state is one EnumerateStates would list.
  virtual bool IsWellFormed(const GlobalState&) const { return true; }

  // Tables are keyed on this projection, which drops pure bookkeeping
  // components. Identity by default.
  virtual GlobalState KeyProjection(const GlobalState& s) const { return s; }
  virtual int key_local_state_count(int agent) const {
    return local_state_count(agent);
  }
  virtual int key_shared_state_count(int component) const {
    return shared_state_count(component);
  }
  // Distinct projected states, one representative each.
  virtual std::vector<GlobalState> EnumerateKeyStates() const {
    return EnumerateStates();
  }

  // Throws ValidationError on a state outside the declared spaces.
  void ValidateState(const GlobalState& s) const;
  void ValidateActions(const ActionProfile& a) const;
};

// Uniform over well-formed, non-terminal states (rejection sampling).
GlobalState SampleUniformState(const EnvModel& env, Rng& rng);

// Sub-step snapshot S_{t,(k)}.
struct IntermediateState {
  GlobalState base;
  int substep = 0;
  Permutation sigma;
  std::vector<std::pair<int, int>> applied_actions;  // (agent, action)
  // Agent whose sub-step last changed each shared component, or -1.
  std::vector<int> shared_owner;

  int acting_agent() const { return sigma.at(substep); }
  bool complete() const { return substep == sigma.size(); }
};

using Chain = std::vector<IntermediateState>;

IntermediateState StartChain(const GlobalState& s, const Permutation& sigma);

// Executes the next agent's pre-committed action (do-intervention).
// `rng` is needed only for stochastic sub-step kernels.
IntermediateState StepSubstep(const EnvModel& env,
                              const IntermediateState& state, int action,
                              Rng* rng = nullptr);

Chain BuildChain(const EnvModel& env, const GlobalState& s,
                 const ActionProfile& actions, const Permutation& sigma,
                 Rng* rng = nullptr);

// Offline reconstruction from two recorded consecutive global states; needs
// no dynamics. Agent j's component comes from `s_next` once j has acted.
// Shared component c comes from `s_next` once `shared_owner[c]` has acted;
// a component without a recorded owner switches at the last sub-step.
Chain ReconstructChain(const GlobalState& s_t, const GlobalState& s_next,
                       const Permutation& sigma,
                       const std::vector<int>& shared_owner = {},
                       const ActionProfile* actions = nullptr);

struct DecompositionViolation {
  GlobalState state;
  ActionProfile actions;
  double discrepancy = 0.0;
};

struct DecomposabilityReport {
  std::int64_t pairs_checked = 0;
  double max_discrepancy = 0.0;
  std::int64_t violation_count = 0;
  std::vector<DecompositionViolation> violations;  // first few, for diagnostics
  bool passed() const { return violation_count == 0; }
};

struct DecomposabilityMode {
  bool exhaustive = true;
  std::int64_t samples = 0;  // sampled mode: number of (s, a) pairs
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  int max_recorded_violations = 16;
};

// Compares P(s'|s,a) with E_σ∼U(Σ) of the chained sub-step kernels.
DecomposabilityReport VerifyDecomposability(const EnvModel& env,
                                            const DecomposabilityMode& mode);

// Distribution of S_{t,(n)} under chained sub-step kernels for one order.
std::vector<Transition> ChainedKernel(const EnvModel& env, const GlobalState& s,
                                      const ActionProfile& actions,
                                      const Permutation& sigma);

}  // namespace icv

#endif  // ICV_GAME_H_
