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

#include "icv/game.h"

#include <map>
#include <vector>

#include "generators.h"
#include "gtest/gtest.h"
#include "icv/envs.h"
#include "icv/errors.h"

namespace icv {
namespace {

constexpr int kUp = 0;
constexpr int kDown = 1;
constexpr int kLeft = 2;
constexpr int kRight = 3;

KeyLockEnv TwoPlayerKeyLock(bool allow_stay = true) {
  return KeyLockEnv(KeyLockLayout::LoadNamed("keylock_2p"),
                    KeyLockOptions{allow_stay, 20, 0.95});
}

GlobalState State(std::vector<int> agents, std::vector<int> shared = {}) {
  return GlobalState{std::move(agents), std::move(shared)};
}

TEST(PermutationTest, ValidatesAndReportsSuccessors) {
  EXPECT_THROW(Permutation({0, 0}), ValidationError);
  EXPECT_THROW(Permutation({1, 2}), ValidationError);
  const Permutation sigma({2, 0, 1});
  EXPECT_EQ(sigma.PositionOf(0), 1);
  EXPECT_EQ(sigma.Successors(2), (std::vector<int>{0, 1}));
  EXPECT_TRUE(sigma.Successors(1).empty());
  EXPECT_EQ(AllPermutations(4).size(), 24u);
  EXPECT_EQ(AdmissibleOrders(4, 2).size(), 18u);
  EXPECT_EQ(Factorial(6), 720u);
}

TEST(SampleOrderTest, RestrictedTwoAgentsIsForced) {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(SampleOrder(OrderDistribution::UniformRestricted(0), 2, rng),
              Permutation({0, 1}));
  }
}

TEST(SampleOrderTest, RestrictedThreeAgentsIsUniformOverAdmissible) {
  Rng rng(2);
  std::map<std::vector<int>, int> counts;
  const int draws = 40000;
  for (int k = 0; k < draws; ++k) {
    const Permutation p =
        SampleOrder(OrderDistribution::UniformRestricted(1), 3, rng);
    ASSERT_FALSE(p.IsLast(1));
    ++counts[p.order()];
  }
  ASSERT_EQ(counts.size(), 4u);
  // Binomial(40000, 1/4): sd ≈ 86.6; allow 5 sd.
  for (const auto& [order, c] : counts) EXPECT_NEAR(c, draws / 4.0, 433.0);
}

TEST(SampleOrderTest, FixedOrder) {
  Rng rng(3);
  const auto dist = OrderDistribution::Fixed(Permutation({1, 0, 2}));
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(SampleOrder(dist, 3, rng), Permutation({1, 0, 2}));
  }
  EXPECT_THROW(SampleOrder(dist, 2, rng), ValidationError);
}

TEST(StepSubstepTest, FreeMoveChangesOnlyTheActor) {
  const KeyLockEnv env = TwoPlayerKeyLock();
  const GlobalState s = State({17, 4}, {0});
  IntermediateState st = StartChain(s, Permutation({1, 0}));
  st = StepSubstep(env, st, kLeft);
  EXPECT_EQ(st.base, State({17, 3}, {0}));
  EXPECT_EQ(st.substep, 1);
  ASSERT_EQ(st.applied_actions.size(), 1u);
  EXPECT_EQ(st.applied_actions[0], std::make_pair(1, kLeft));
}

TEST(StepSubstepTest, NoOpKeepsBase) {
  const KeyLockEnv env = TwoPlayerKeyLock();
  const GlobalState s = State({17, 4}, {0});
  const IntermediateState st =
      StepSubstep(env, StartChain(s, Permutation({0, 1})), KeyLockEnv::kStay);
  EXPECT_EQ(st.base, s);
  EXPECT_EQ(st.substep, 1);
}

TEST(StepSubstepTest, SteppingOnKeyOpensLock) {
  const KeyLockEnv env = TwoPlayerKeyLock();
  const IntermediateState st = StepSubstep(
      env, StartChain(State({17, 4}, {0}), Permutation({0, 1})), kUp);
  EXPECT_EQ(st.base, State({12, 4}, {KeyLockEnv::kLockOpen}));
  EXPECT_EQ(st.shared_owner, (std::vector<int>{0}));
}

TEST(StepSubstepTest, Errors) {
  const KeyLockEnv env = TwoPlayerKeyLock(false);
  IntermediateState st = StartChain(State({17, 4}, {0}), Permutation({0, 1}));
  EXPECT_THROW(StepSubstep(env, st, 4), ActionError);
  st = StepSubstep(env, st, kUp);
  st = StepSubstep(env, st, kUp);
  EXPECT_THROW(StepSubstep(env, st, kUp), SequenceCompleteError);
}

TEST(BuildChainTest, SingleAgentEqualsPlainStep) {
  const KeyLockEnv env(KeyLockLayout::Parse("keylock-layout v1\n1KG.T\n"));
  const GlobalState s = env.InitialDistribution().front().state;
  const ActionProfile a{{kRight}};
  const Chain chain = BuildChain(env, s, a, Permutation::Identity(1));
  ASSERT_EQ(chain.size(), 2u);
  const auto joint = env.JointKernel(s, a);
  ASSERT_EQ(joint.size(), 1u);
  EXPECT_EQ(chain[1].base, joint[0].state);
}

TEST(BuildChainTest, AllNoOpsKeepEveryBase) {
  const KeyLockEnv env(KeyLockLayout::LoadNamed("keylock_3p"));
  const GlobalState s = env.InitialDistribution().front().state;
  const ActionProfile a{{KeyLockEnv::kStay, KeyLockEnv::kStay, KeyLockEnv::kStay}};
  const Chain chain = BuildChain(env, s, a, Permutation({2, 0, 1}));
  ASSERT_EQ(chain.size(), 4u);
  for (const IntermediateState& st : chain) EXPECT_EQ(st.base, s);
}

// Hand-walked on the default 6×6 foraging map: apples at cells 14 and 28,
// local state = cell + 36·loaded + 72·parity.
TEST(BuildChainTest, ForagingGoldenWalk) {
  const ForagingEnv env;
  const GlobalState s = State({2, 12, 26}, {1, 1});
  const Chain moves =
      BuildChain(env, s, ActionProfile{{kDown, kRight, kUp}}, Permutation({2, 0, 1}));
  ASSERT_EQ(moves.size(), 4u);
  EXPECT_EQ(moves[1].base, State({2, 12, 20 + 72}, {1, 1}));
  EXPECT_EQ(moves[2].base, State({8 + 72, 12, 92}, {1, 1}));
  EXPECT_EQ(moves[3].base, State({80, 13 + 72, 92}, {1, 1}));

  // Three agents around apple 0 (cell 14) all load; the last actor removes it.
  const GlobalState around = State({8, 13, 15}, {1, 1});
  const Chain load = BuildChain(env, around, ActionProfile{{4, 4, 4}},
                                Permutation({1, 2, 0}));
  EXPECT_EQ(load[1].base, State({8, 13 + 36 + 72, 15}, {1, 1}));
  EXPECT_EQ(load[2].base, State({8, 121, 15 + 108}, {1, 1}));
  EXPECT_EQ(load[3].base, State({8 + 108, 121, 123}, {0, 1}));
}

TEST(ReconstructChainTest, HandFormula) {
  const GlobalState st = State({10, 11, 12});
  const GlobalState next = State({20, 21, 22});
  const Chain chain = ReconstructChain(st, next, Permutation({1, 0, 2}));
  ASSERT_EQ(chain.size(), 4u);
  EXPECT_EQ(chain[0].base, State({10, 11, 12}));
  EXPECT_EQ(chain[1].base, State({10, 21, 12}));
  EXPECT_EQ(chain[2].base, State({20, 21, 12}));
  EXPECT_EQ(chain[3].base, State({20, 21, 22}));
}

TEST(ReconstructChainTest, IdenticalStatesGiveConstantChain) {
  const GlobalState s = State({3, 4}, {1});
  const Chain chain = ReconstructChain(s, s, Permutation({1, 0}), {-1});
  for (const IntermediateState& st : chain) EXPECT_EQ(st.base, s);
}

TEST(ReconstructChainTest, SharedComponentFollowsOwner) {
  const GlobalState s = State({17, 4}, {0});
  const GlobalState next = State({12, 3}, {1});
  const Chain owned = ReconstructChain(s, next, Permutation({1, 0}), {0});
  EXPECT_EQ(owned[1].base, State({17, 3}, {0}));
  EXPECT_EQ(owned[2].base, next);
  const Chain unowned = ReconstructChain(s, next, Permutation({0, 1}), {-1});
  EXPECT_EQ(unowned[1].base, State({12, 4}, {0}));
  EXPECT_EQ(unowned[2].base, next);
}

TEST(ReconstructChainTest, RejectsMismatchedSpaces) {
  EXPECT_THROW(ReconstructChain(State({1, 2}), State({1}), Permutation({0, 1})),
               ValidationError);
  EXPECT_THROW(ReconstructChain(State({1, 2}, {0}), State({1, 2}),
                                Permutation({0, 1})),
               ValidationError);
  EXPECT_THROW(ReconstructChain(State({1, 2}), State({1, 2}), Permutation({0})),
               ValidationError);
}

TEST(DecomposabilityTest, KeyLockExhaustive) {
  const KeyLockEnv env = TwoPlayerKeyLock();
  const DecomposabilityReport r = VerifyDecomposability(env, {});
  EXPECT_TRUE(r.passed()) << r.max_discrepancy;
  EXPECT_EQ(r.pairs_checked,
            static_cast<std::int64_t>(env.EnumerateStates().size()) * 25);
}

TEST(DecomposabilityTest, NonInteractingMovesAreExact) {
  // Two agents fenced off from the key: plain deterministic moves.
  const KeyLockEnv env(
      KeyLockLayout::Parse("keylock-layout v1\n1..#K\n...#G\n.2.#T\n"));
  const DecomposabilityReport r = VerifyDecomposability(env, {});
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.pairs_checked, 0);
  EXPECT_EQ(r.max_discrepancy, 0.0);
}

TEST(DecomposabilityTest, ContentionIsFlagged) {
  const ContentionEnv env;
  const DecomposabilityReport r = VerifyDecomposability(env, {});
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.violation_count, 0);
  ASSERT_FALSE(r.violations.empty());
  // Oracle: from the two ends, both advancing; a joint kernel that always
  // favors agent 0 differs from the order average by 1/2 per outcome.
  EXPECT_NEAR(r.max_discrepancy, 0.5, 1e-12);
}

// --- properties ---------------------------------------------------------------

TEST(GameProperty, ChainInvariants) {
  testing::Gen g(21);
  const KeyLockEnv keylock(KeyLockLayout::LoadNamed("keylock_3p"));
  const ForagingEnv foraging;
  const TagEnv tag(TagOptions{5, 3, 1, 50, 0.95, true, 0.01, 2});
  const std::vector<const EnvModel*> envs = {&keylock, &foraging, &tag};
  for (int trial = 0; trial < 600; ++trial) {
    const EnvModel& env = *envs[trial % envs.size()];
    const int n = env.agent_count();
    const GlobalState s = testing::RandomState(g, env);
    const ActionProfile a = testing::RandomActions(g, env);
    const Permutation sigma = testing::RandomPermutation(g, n);
    const Chain chain = BuildChain(env, s, a, sigma);
    ASSERT_EQ(static_cast<int>(chain.size()), n + 1);
    const GlobalState& last = chain.back().base;
    for (int k = 0; k <= n; ++k) {
      const IntermediateState& st = chain[k];
      EXPECT_EQ(st.substep, k);
      ASSERT_EQ(static_cast<int>(st.applied_actions.size()), k);
      for (int m = 0; m < k; ++m) {
        EXPECT_EQ(st.applied_actions[m].first, sigma.at(m));
        EXPECT_EQ(st.applied_actions[m].second, a.actions[sigma.at(m)]);
      }
      for (int j = 0; j < n; ++j) {
        const bool acted = sigma.PositionOf(j) < k;
        EXPECT_EQ(st.base.agents[j], acted ? last.agents[j] : s.agents[j]);
      }
    }
    // Offline reconstruction reproduces the online chain.
    const Chain offline = ReconstructChain(s, last, sigma, chain.back().shared_owner);
    for (int k = 0; k <= n; ++k) EXPECT_EQ(offline[k].base, chain[k].base);
  }
}

TEST(GameProperty, ChainedKernelsAreDistributions) {
  testing::Gen g(22);
  const KeyLockEnv env = TwoPlayerKeyLock();
  for (int trial = 0; trial < 300; ++trial) {
    const GlobalState s = testing::RandomState(g, env);
    const ActionProfile a = testing::RandomActions(g, env);
    for (const auto& dist :
         {ChainedKernel(env, s, a, Permutation({0, 1})), env.JointKernel(s, a)}) {
      double total = 0.0;
      for (const Transition& tr : dist) {
        EXPECT_GT(tr.probability, 0.0);
        total += tr.probability;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

}  // namespace
}  // namespace icv
