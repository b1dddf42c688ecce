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

#include "icv/envs.h"

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "generators.h"
#include "gtest/gtest.h"
#include "icv/errors.h"

namespace icv {
namespace {

constexpr int kUp = 0;
constexpr int kDown = 1;
constexpr int kLeft = 2;
constexpr int kRight = 3;

GlobalState State(std::vector<int> agents, std::vector<int> shared = {}) {
  return GlobalState{std::move(agents), std::move(shared)};
}

std::string LayoutMessage(const std::string& text) {
  try {
    KeyLockLayout::Parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(KeyLockLayoutTest, ParsesBundledLayout) {
  const KeyLockLayout layout = KeyLockLayout::LoadNamed("keylock_2p");
  EXPECT_EQ(layout.rows, 5);
  EXPECT_EQ(layout.cols, 5);
  EXPECT_EQ(layout.key_cell, 12);
  EXPECT_EQ(layout.lock_cell, 2);
  EXPECT_EQ(layout.starts, (std::vector<int>{17, 4}));
  EXPECT_EQ(layout.target_cells, (std::vector<int>{0}));
  EXPECT_EQ(KeyLockLayout::LoadNamed("keylock_3p").starts.size(), 3u);
}

TEST(KeyLockLayoutTest, MalformedLayoutsNameTheLine) {
  EXPECT_NE(LayoutMessage("keylock-layout v2\n1KGT\n").find("line 1"),
            std::string::npos);
  EXPECT_NE(LayoutMessage("keylock-layout v1\n1KGT\n..\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(LayoutMessage("keylock-layout v1\n1KGTx\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(LayoutMessage("keylock-layout v1\n1KGT\nK...\n").find("two keys"),
            std::string::npos);
  EXPECT_NE(LayoutMessage("keylock-layout v1\n2KGT\n").find("1..n"),
            std::string::npos);
  EXPECT_NE(LayoutMessage("keylock-layout v1\n1K.T\n").find("green lock"),
            std::string::npos);
  EXPECT_THROW(KeyLockLayout::Load("/nonexistent/layout.txt"), Error);
}

TEST(KeyLockEnvTest, KeyOpensLockAndGrayBlocks) {
  const KeyLockEnv env(KeyLockLayout::LoadNamed("keylock_2p"));
  const auto opened = env.SubstepKernel(State({17, 4}, {0}), 0, kUp);
  ASSERT_EQ(opened.size(), 1u);
  EXPECT_EQ(opened[0].state, State({12, 4}, {KeyLockEnv::kLockOpen}));

  // Cell 14 sits above the gray lock at 19.
  const auto gray = env.SubstepKernel(State({17, 14}, {1}), 1, kDown);
  EXPECT_EQ(gray[0].state, State({17, 14}, {1}));
  // The green lock blocks while closed and passes once open.
  EXPECT_EQ(env.SubstepKernel(State({17, 3}, {0}), 1, kLeft)[0].state,
            State({17, 3}, {0}));
  EXPECT_EQ(env.SubstepKernel(State({12, 3}, {1}), 1, kLeft)[0].state,
            State({12, 2}, {1}));
  // Walls and the grid edge.
  EXPECT_EQ(env.SubstepKernel(State({17, 4}, {0}), 0, kLeft)[0].state,
            State({17, 4}, {0}));
  EXPECT_EQ(env.SubstepKernel(State({17, 4}, {0}), 1, kUp)[0].state,
            State({17, 4}, {0}));
}

TEST(KeyLockEnvTest, BothOnTargetPaysEveryone) {
  const KeyLockEnv env(KeyLockLayout::LoadNamed("keylock_2p"));
  const GlobalState before = State({5, 1}, {1});
  const ActionProfile a{{kUp, kLeft}};
  const auto next = env.JointKernel(before, a);
  ASSERT_EQ(next.size(), 1u);
  EXPECT_EQ(next[0].state, State({0, 0}, {1}));
  EXPECT_TRUE(env.IsTerminal(next[0].state));
  EXPECT_EQ(env.Rewards(before, a, next[0].state), (std::vector<double>{1, 1}));
  EXPECT_EQ(env.Rewards(State({5, 2}, {1}), a, State({0, 1}, {1})),
            (std::vector<double>{0, 0}));
}

TEST(KeyLockEnvTest, LockRaceIsResolvedByOrder) {
  // P1 steps on the key while P2 walks into the closed lock in one step.
  const KeyLockEnv env(KeyLockLayout::LoadNamed("keylock_2p"));
  const auto next = env.JointKernel(State({17, 3}, {0}), ActionProfile{{kUp, kLeft}});
  ASSERT_EQ(next.size(), 2u);
  std::set<GlobalState> outcomes;
  for (const Transition& t : next) {
    EXPECT_DOUBLE_EQ(t.probability, 0.5);
    outcomes.insert(t.state);
  }
  EXPECT_TRUE(outcomes.count(State({12, 2}, {1})));
  EXPECT_TRUE(outcomes.count(State({12, 3}, {1})));
}

TEST(ForagingEnvTest, DefaultInstance) {
  const ForagingEnv env;
  EXPECT_EQ(env.cells(), 36);
  EXPECT_EQ(env.agent_count(), 3);
  EXPECT_EQ(env.shared_count(), 2);
  EXPECT_EQ(env.horizon(), 15);
  EXPECT_EQ(env.options().apple_cells, (std::vector<int>{14, 28}));
}

TEST(ForagingEnvTest, SurroundAndLoadRemovesApple) {
  const ForagingEnv env;
  const GlobalState s = State({8, 13, 15}, {1, 1});
  const ActionProfile load{{4, 4, 4}};
  const auto next = env.JointKernel(s, load);
  ASSERT_EQ(next.size(), 1u);
  EXPECT_EQ(next[0].state.shared, (std::vector<int>{0, 1}));
  EXPECT_EQ(env.Rewards(s, load, next[0].state), (std::vector<double>{1, 1, 1}));
}

TEST(ForagingEnvTest, LoadingAloneDoesNothing) {
  const ForagingEnv env;
  const GlobalState s = State({8, 0, 35}, {1, 1});
  const ActionProfile a{{4, kUp, kUp}};
  const auto next = env.JointKernel(s, a);
  EXPECT_EQ(next[0].state.shared, (std::vector<int>{1, 1}));
  EXPECT_EQ(env.Cell(next[0].state.agents[0]), 8);
  EXPECT_EQ(env.Rewards(s, a, next[0].state), (std::vector<double>{0, 0, 0}));
}

TEST(ForagingEnvTest, RejectsInvalidPlacement) {
  EXPECT_THROW(ForagingEnv(ForagingOptions{6, 1, 2, 15, 0.95, {}, {}}),
               ValidationError);
  EXPECT_THROW(ForagingEnv(ForagingOptions{6, 2, 1, 15, 0.95, {14}, {14, 0}}),
               ValidationError);
  EXPECT_THROW(ForagingEnv(ForagingOptions{6, 2, 1, 15, 0.95, {40}, {0, 1}}),
               ValidationError);
}

TEST(TagEnvTest, TaggingRewards) {
  const TagEnv env(TagOptions{5, 2, 1, 50, 0.95, false, 0.01, 2});
  EXPECT_EQ(env.team(0), 0);
  EXPECT_EQ(env.team(2), 1);
  const GlobalState s = State({6, 0, 8});
  const ActionProfile a{{kRight, TagEnv::kStay, TagEnv::kStay}};
  const auto next = env.JointKernel(s, a);
  ASSERT_EQ(next[0].state, State({7, 0, 8}));
  EXPECT_EQ(env.Rewards(s, a, next[0].state), (std::vector<double>{0, 0, 0}));
  const ActionProfile tag{{kRight, TagEnv::kStay, kLeft}};
  const auto caught = env.JointKernel(s, tag);
  EXPECT_EQ(caught[0].state, State({7, 0, 7}));
  EXPECT_EQ(env.Rewards(s, tag, caught[0].state),
            (std::vector<double>{0.5, 0.5, -1.0}));
}

TEST(TagEnvTest, ShapingPenalizesNearbyPrey) {
  const TagEnv env;
  const GlobalState next = State({0, 4, 2});
  const std::vector<double> r = env.Rewards(next, ActionProfile{{4, 4, 4}}, next);
  EXPECT_DOUBLE_EQ(r[2], -0.01);
  EXPECT_EQ(env.TaggingRewards(next), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(TagEnv(TagOptions{5, 1, 1, 50, 0.95, true, 0.01, 2}),
               ValidationError);
}

TEST(TagEnvTest, InitialPlacement) {
  const TagEnv env(TagOptions{5, 3, 2, 50, 0.95, true, 0.01, 2});
  EXPECT_EQ(env.InitialDistribution().front().state,
            State({0, 4, 1, 22, 21}));
}

TEST(IndividualizeTest, SingleAgentIsIdentity) {
  const GlobalState s = State({7}, {1, 0});
  const Observation o = Individualize(s, 0);
  EXPECT_EQ(o.agents, s.agents);
  EXPECT_EQ(o.shared, s.shared);
}

TEST(IndividualizeTest, PutsTheAgentFirst) {
  const Observation o = Individualize(State({5, 6, 7}, {1}), 1);
  EXPECT_EQ(o.agents, (std::vector<int>{6, 5, 7}));
  EXPECT_EQ(o.shared, (std::vector<int>{1}));
}

TEST(DataDirectoryTest, EnvironmentOverride) {
  const std::string builtin = DataDirectory();
  setenv("ICV_DATA_DIR", "/tmp/icv-data-override", 1);
  EXPECT_EQ(DataDirectory(), "/tmp/icv-data-override");
  EXPECT_THROW(KeyLockLayout::LoadNamed("keylock_2p"), Error);
  unsetenv("ICV_DATA_DIR");
  EXPECT_EQ(DataDirectory(), builtin);
}

TEST(MakeEnvTest, FactoryAndDescription) {
  EnvSpec spec;
  spec.id = "foraging";
  spec.agents = 4;
  const auto env = MakeEnv(spec);
  EXPECT_EQ(env->agent_count(), 4);
  spec.id = "nothing";
  EXPECT_THROW(MakeEnv(spec), ConfigError);
  EnvSpec a;
  EnvSpec b;
  b.horizon = 7;
  EXPECT_NE(DescribeEnvSpec(a), DescribeEnvSpec(b));
  EXPECT_EQ(DescribeEnvSpec(a), DescribeEnvSpec(EnvSpec{}));
}

// --- properties ---------------------------------------------------------------

std::vector<std::unique_ptr<EnvModel>> BuiltinEnvs() {
  std::vector<std::unique_ptr<EnvModel>> envs;
  envs.push_back(std::make_unique<KeyLockEnv>(KeyLockLayout::LoadNamed("keylock_2p")));
  envs.push_back(std::make_unique<KeyLockEnv>(KeyLockLayout::LoadNamed("keylock_3p")));
  envs.push_back(std::make_unique<ForagingEnv>());
  envs.push_back(std::make_unique<TagEnv>());
  envs.push_back(std::make_unique<ContentionEnv>());
  return envs;
}

TEST(EnvsProperty, IndividualizationRoundTrips) {
  testing::Gen g(31);
  for (const auto& env : BuiltinEnvs()) {
    for (int trial = 0; trial < 300; ++trial) {
      const GlobalState s = testing::RandomState(g, *env);
      for (int i = 0; i < env->agent_count(); ++i) {
        EXPECT_EQ(Deindividualize(Individualize(s, i), i), s) << env->id();
      }
    }
  }
}

TEST(EnvsProperty, KernelsAreDistributionsAndCooperativeRewardsAgree) {
  testing::Gen g(32);
  for (const auto& env : BuiltinEnvs()) {
    for (int trial = 0; trial < 300; ++trial) {
      const GlobalState s = testing::RandomState(g, *env);
      const ActionProfile a = testing::RandomActions(g, *env);
      double total = 0.0;
      for (const Transition& t : env->JointKernel(s, a)) {
        EXPECT_GT(t.probability, 0.0);
        total += t.probability;
        EXPECT_NO_THROW(env->ValidateState(t.state));
        const std::vector<double> r = env->Rewards(s, a, t.state);
        ASSERT_EQ(static_cast<int>(r.size()), env->agent_count());
        if (env->game_type() == GameType::kCooperative) {
          for (double x : r) EXPECT_EQ(x, r[0]);
        }
        const RewardBounds b = env->reward_bounds();
        for (double x : r) {
          EXPECT_GE(x, b.min - 1e-12);
          EXPECT_LE(x, b.max + 1e-12);
        }
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
      for (int i = 0; i < env->agent_count(); ++i) {
        double sub = 0.0;
        for (const Transition& t : env->SubstepKernel(s, i, a.actions[i])) {
          sub += t.probability;
          // Locality: only agent i's component may change.
          for (int j = 0; j < env->agent_count(); ++j) {
            if (j != i) {
              EXPECT_EQ(t.state.agents[j], s.agents[j]);
            }
          }
        }
        EXPECT_NEAR(sub, 1.0, 1e-12);
      }
    }
  }
}

TEST(EnvsProperty, ObservationKeysAreInjective) {
  for (const auto& env : BuiltinEnvs()) {
    if (env->id() == "tag") continue;  // 15625 states; covered by the key test
    std::set<StateKey> value_keys;
    std::vector<std::set<StateKey>> obs_keys(env->agent_count());
    const std::vector<GlobalState> states = env->EnumerateKeyStates();
    for (const GlobalState& s : states) {
      value_keys.insert(ValueKey(*env, s));
      for (int i = 0; i < env->agent_count(); ++i) {
        obs_keys[i].insert(ObservationKey(*env, s, i));
      }
    }
    EXPECT_EQ(value_keys.size(), states.size()) << env->id();
    for (const auto& keys : obs_keys) EXPECT_EQ(keys.size(), states.size());
  }
}

TEST(EnvsProperty, TaggingIsZeroSum) {
  testing::Gen g(33);
  const TagEnv env(TagOptions{4, 3, 2, 50, 0.95, false, 0.01, 2});
  for (int trial = 0; trial < 2000; ++trial) {
    const GlobalState s = testing::RandomState(g, env);
    double total = 0.0;
    const std::vector<double> r = env.TaggingRewards(s);
    for (double x : r) total += x;
    EXPECT_NEAR(total, 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace icv
