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

#ifndef ICV_ENVS_H_
#define ICV_ENVS_H_

// Built-in desk-scale environments with exact tabular dynamics.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "icv/game.h"

namespace icv {

// Individualized view s^{(i)}: agent i's component first, the remaining
// agents in increasing index order, shared components unchanged.
struct Observation {
  std::vector<int> agents;
  std::vector<int> shared;

  bool operator==(const Observation&) const = default;
};

Observation Individualize(const GlobalState& s, int agent);
GlobalState Deindividualize(const Observation& obs, int agent);

using StateKey = std::uint64_t;

// Mixed-radix key of the individualized, key-projected observation. The same
// key space is shared by all agents, so agent i's table can be queried with
// ObservationKey(env, s, j) (the state-exchange intervention).
StateKey ObservationKey(const EnvModel& env, const GlobalState& s, int agent);
// Mixed-radix key of the key-projected global state.
StateKey ValueKey(const EnvModel& env, const GlobalState& s);

// Directory holding layout files; ICV_DATA_DIR overrides the built-in path.
std::string DataDirectory();

enum class Move { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

// --- KeyLockGrid -----------------------------------------------------------

// Grid map parsed from text. First line is the format tag
// "keylock-layout v1"; every following non-empty line is one grid row.
//   '.' free   '#' wall   'L' gray lock (never opens)   'G' green lock
//   'K' key    'T' target '1'..'6' agent start (on a free cell)
struct KeyLockLayout {
  static constexpr const char* kFormatTag = "keylock-layout v1";

  int rows = 0;
  int cols = 0;
  std::vector<char> cells;  // row-major; agent starts stored as '.'
  std::vector<int> starts;  // cell index per agent
  int key_cell = -1;
  int lock_cell = -1;
  std::vector<int> target_cells;

  static KeyLockLayout Parse(const std::string& text);
  static KeyLockLayout Load(const std::string& path);
  // Resolves a bare name ("keylock_2p") against DataDirectory().
  static KeyLockLayout LoadNamed(const std::string& name);

  char at(int cell) const { return cells[cell]; }
};

struct KeyLockOptions {
  bool allow_stay = true;
  int horizon = 20;
  double discount = 0.95;
};

// Cooperative: every agent must stand on a target cell; reaching that state
// pays 1 to every agent and ends the episode. Moving onto the key opens the
// green lock for good. Agents may share cells. The joint kernel executes the
// agents in a uniformly random internal order, so whether an agent slips
// through the lock in the step it opens is resolved by that order.
class KeyLockEnv : public EnvModel {
 public:
  static constexpr int kLockClosed = 0;
  static constexpr int kLockOpen = 1;
  static constexpr int kStay = 4;

  explicit KeyLockEnv(KeyLockLayout layout, KeyLockOptions options = {});

  std::string id() const override { return "keylock"; }
  int agent_count() const override {
    return static_cast<int>(layout_.starts.size());
  }
  int action_count(int) const override { return options_.allow_stay ? 5 : 4; }
  std::string action_name(int agent, int action) const override;
  int local_state_count(int) const override {
    return layout_.rows * layout_.cols;
  }
  int shared_count() const override { return 1; }
  int shared_state_count(int) const override { return 2; }
  GameType game_type() const override { return GameType::kCooperative; }
  double discount() const override { return options_.discount; }
  int horizon() const override { return options_.horizon; }
  RewardBounds reward_bounds() const override { return {0.0, 1.0}; }

  std::vector<Transition> InitialDistribution() const override;
  std::vector<Transition> SubstepKernel(const GlobalState& s, int agent,
                                        int action) const override;
  std::vector<Transition> JointKernel(const GlobalState& s,
                                      const ActionProfile& a) const override;
  std::vector<double> Rewards(const GlobalState& s, const ActionProfile& a,
                              const GlobalState& next) const override;
  bool IsTerminal(const GlobalState& s) const override;
  std::vector<GlobalState> EnumerateStates() const override;
  bool IsWellFormed(const GlobalState& s) const override;

  const KeyLockLayout& layout() const { return layout_; }
  // Cell reached from `cell` by `action` given the lock status.
  int Target(int cell, int action, bool lock_open) const;
  bool Passable(int cell, bool lock_open) const;

 private:
  KeyLockLayout layout_;
  KeyLockOptions options_;
};

// --- MiniForaging ------------------------------------------------------------

struct ForagingOptions {
  int grid_size = 6;
  int agents = 3;
  int apples = 2;
  int horizon = 15;
  double discount = 0.95;
  // Optional explicit placement (cell = row * grid_size + col).
  std::vector<int> apple_cells;
  std::vector<int> agent_cells;
};

// Cooperative foraging. Actions: up, down, left, right, load. An apple is
// removed, paying 1 to every agent, when every agent selected load in the
// same step while all agents stand on distinct cells adjacent to it.
//
// Local state = (cell, loaded-flag, step parity). The parity flips on every
// sub-step of its agent, so the last actor of a step sees all parities
// equal and is the one whose sub-step removes the apple. Tables key on the
// cell only.
class ForagingEnv : public EnvModel {
 public:
  static constexpr int kLoad = 4;

  explicit ForagingEnv(ForagingOptions options = {});

  std::string id() const override { return "foraging"; }
  int agent_count() const override { return options_.agents; }
  int action_count(int) const override { return 5; }
  std::string action_name(int agent, int action) const override;
  int local_state_count(int) const override { return 4 * cells(); }
  int shared_count() const override { return options_.apples; }
  int shared_state_count(int) const override { return 2; }
  GameType game_type() const override { return GameType::kCooperative; }
  double discount() const override { return options_.discount; }
  int horizon() const override { return options_.horizon; }
  RewardBounds reward_bounds() const override;

  std::vector<Transition> InitialDistribution() const override;
  std::vector<Transition> SubstepKernel(const GlobalState& s, int agent,
                                        int action) const override;
  std::vector<Transition> JointKernel(const GlobalState& s,
                                      const ActionProfile& a) const override;
  std::vector<double> Rewards(const GlobalState& s, const ActionProfile& a,
                              const GlobalState& next) const override;
  bool IsTerminal(const GlobalState& s) const override;
  std::vector<GlobalState> EnumerateStates() const override;
  bool IsWellFormed(const GlobalState& s) const override;

  bool SharedFlipsAtCompletion(int) const override { return true; }
  GlobalState KeyProjection(const GlobalState& s) const override;
  int key_local_state_count(int) const override { return cells(); }
  std::vector<GlobalState> EnumerateKeyStates() const override;

  const ForagingOptions& options() const { return options_; }
  int cells() const { return options_.grid_size * options_.grid_size; }

  int Cell(int local) const { return local % cells(); }
  bool Loaded(int local) const { return (local / cells()) % 2 == 1; }
  int Parity(int local) const { return local / (2 * cells()); }
  int Pack(int cell, bool loaded, int parity) const {
    return cell + cells() * (loaded ? 1 : 0) + 2 * cells() * parity;
  }
  bool AllAdjacentDistinct(const std::vector<int>& agent_cells,
                           int apple) const;

 private:
  int MoveTarget(const GlobalState& s, int cell, int action) const;
  // Lowest-index present apple loadable by the given cells, or -1.
  int LoadableApple(const GlobalState& s,
                    const std::vector<int>& agent_cells) const;

  ForagingOptions options_;
};

// --- MiniTag -----------------------------------------------------------------

struct TagOptions {
  int grid_size = 5;
  int predators = 2;
  int prey = 1;
  int horizon = 50;
  double discount = 0.95;
  // Prey pays 0.01 per step while a predator is within distance 2.
  bool proximity_shaping = true;
  double shaping_penalty = 0.01;
  int shaping_radius = 2;
};

// Mixed-motive tag. Agents 0..predators-1 are predators (team 0), the rest
// prey (team 1). Whenever a prey shares a cell with a predator after a step
// it receives -1 and the predators split +1. Actions: up, down, left,
// right, stay; agents never block each other.
class TagEnv : public EnvModel {
 public:
  static constexpr int kStay = 4;

  explicit TagEnv(TagOptions options = {});

  std::string id() const override { return "tag"; }
  int agent_count() const override {
    return options_.predators + options_.prey;
  }
  int action_count(int) const override { return 5; }
  std::string action_name(int agent, int action) const override;
  int local_state_count(int) const override {
    return options_.grid_size * options_.grid_size;
  }
  int shared_count() const override { return 0; }
  int shared_state_count(int) const override { return 0; }
  GameType game_type() const override { return GameType::kMixed; }
  int team(int agent) const override {
    return agent < options_.predators ? 0 : 1;
  }
  double discount() const override { return options_.discount; }
  int horizon() const override { return options_.horizon; }
  RewardBounds reward_bounds() const override;

  std::vector<Transition> InitialDistribution() const override;
  std::vector<Transition> SubstepKernel(const GlobalState& s, int agent,
                                        int action) const override;
  std::vector<Transition> JointKernel(const GlobalState& s,
                                      const ActionProfile& a) const override;
  std::vector<double> Rewards(const GlobalState& s, const ActionProfile& a,
                              const GlobalState& next) const override;
  bool IsTerminal(const GlobalState&) const override { return false; }
  std::vector<GlobalState> EnumerateStates() const override;
  bool IsWellFormed(const GlobalState& s) const override;

  const TagOptions& options() const { return options_; }
  bool IsPredator(int agent) const { return agent < options_.predators; }
  // Rewards without proximity shaping (the pure tagging component).
  std::vector<double> TaggingRewards(const GlobalState& next) const;

 private:
  int MoveTarget(int cell, int action) const;
  TagOptions options_;
};

// --- Order-contention counterexample -----------------------------------------

// Two agents at the ends of a three-cell corridor may both step into the
// single center cell. The sequential kernels let the first mover win while
// the joint kernel always favors agent 0, so the joint kernel is not the
// order average of the sub-step kernels.
class ContentionEnv : public EnvModel {
 public:
  static constexpr int kStay = 0;
  static constexpr int kAdvance = 1;

  std::string id() const override { return "contention"; }
  int agent_count() const override { return 2; }
  int action_count(int) const override { return 2; }
  std::string action_name(int agent, int action) const override;
  int local_state_count(int) const override { return 3; }
  int shared_count() const override { return 0; }
  int shared_state_count(int) const override { return 0; }
  GameType game_type() const override { return GameType::kCooperative; }
  double discount() const override { return 0.95; }
  int horizon() const override { return 5; }
  RewardBounds reward_bounds() const override { return {0.0, 0.0}; }

  std::vector<Transition> InitialDistribution() const override;
  std::vector<Transition> SubstepKernel(const GlobalState& s, int agent,
                                        int action) const override;
  std::vector<Transition> JointKernel(const GlobalState& s,
                                      const ActionProfile& a) const override;
  std::vector<double> Rewards(const GlobalState&, const ActionProfile&,
                              const GlobalState&) const override {
    return {0.0, 0.0};
  }
  bool IsTerminal(const GlobalState&) const override { return false; }
  std::vector<GlobalState> EnumerateStates() const override;
  bool IsWellFormed(const GlobalState& s) const override;
};

// --- Factory ------------------------------------------------------------------

struct EnvSpec {
  std::string id = "keylock";  // keylock | foraging | tag | contention
  std::string layout = "keylock_2p";
  bool allow_stay = true;
  int grid_size = 0;  // 0 = environment default
  int agents = 0;
  int apples = 0;
  int predators = 0;
  int prey = 0;
  int horizon = 0;
  double discount = 0.95;
  bool proximity_shaping = true;
};

std::unique_ptr<EnvModel> MakeEnv(const EnvSpec& spec);

// Canonical text of an EnvSpec, used in checkpoint headers.
std::string DescribeEnvSpec(const EnvSpec& spec);

}  // namespace icv

#endif  // ICV_ENVS_H_
