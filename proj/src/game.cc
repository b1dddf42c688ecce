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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "icv/errors.h"

namespace icv {

std::string ToString(const GlobalState& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.agents[i]);
  }
  if (!s.shared.empty()) {
    out += ";";
    for (std::size_t i = 0; i < s.shared.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s.shared[i]);
    }
  }
  return out + ")";
}

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  const int n = static_cast<int>(order_.size());
  position_.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    const int agent = order_[k];
    if (agent < 0 || agent >= n || position_[agent] != -1) {
      throw ValidationError("order is not a permutation");
    }
    position_[agent] = k;
  }
}

Permutation Permutation::Identity(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return Permutation(std::move(order));
}

std::vector<int> Permutation::Successors(int agent) const {
  return {order_.begin() + PositionOf(agent) + 1, order_.end()};
}

std::uint64_t Factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<Permutation> AllPermutations(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Permutation> out;
  out.reserve(Factorial(n));
  do {
    out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::vector<Permutation> AdmissibleOrders(int n, int agent) {
  std::vector<Permutation> out;
  for (Permutation& p : AllPermutations(n)) {
    if (!p.IsLast(agent)) out.push_back(std::move(p));
  }
  return out;
}

OrderDistribution OrderDistribution::Fixed(Permutation order) {
  OrderDistribution d(Kind::kFixed);
  d.fixed_ = std::move(order);
  return d;
}

OrderDistribution OrderDistribution::UniformRestricted(int agent) {
  if (agent < 0) throw ValidationError("restricted agent out of range");
  OrderDistribution d(Kind::kUniformRestricted);
  d.agent_ = agent;
  return d;
}

Permutation SampleOrder(const OrderDistribution& dist, int n, Rng& rng) {
  switch (dist.kind()) {
    case OrderDistribution::Kind::kFixed:
      if (dist.fixed_order()->size() != n) {
        throw ValidationError("fixed order has the wrong length");
      }
      return *dist.fixed_order();
    case OrderDistribution::Kind::kUniform:
    case OrderDistribution::Kind::kUniformRestricted: {
      const bool restricted =
          dist.kind() == OrderDistribution::Kind::kUniformRestricted;
      if (restricted && (dist.restricted_agent() >= n || n < 2)) {
        throw ValidationError("no admissible order for restricted agent");
      }
      std::vector<int> order(n);
      // Rejection keeps the restricted draw uniform over Σ₊^i.
      while (true) {
        std::iota(order.begin(), order.end(), 0);
        for (int k = n - 1; k > 0; --k) {
          std::swap(order[k], order[rng.Below(k + 1)]);
        }
        if (!restricted || order.back() != dist.restricted_agent()) break;
      }
      return Permutation(std::move(order));
    }
  }
  throw ValidationError("unknown order distribution");
}

void EnvModel::ValidateState(const GlobalState& s) const {
  if (static_cast<int>(s.agents.size()) != agent_count()) {
    throw ValidationError("state has " + std::to_string(s.agents.size()) +
                          " agent components, expected " +
                          std::to_string(agent_count()));
  }
  if (static_cast<int>(s.shared.size()) != shared_count()) {
    throw ValidationError("state has the wrong number of shared components");
  }
  for (int i = 0; i < agent_count(); ++i) {
    if (s.agents[i] < 0 || s.agents[i] >= local_state_count(i)) {
      throw ValidationError("agent " + std::to_string(i) +
                            " component out of range in " + ToString(s));
    }
  }
  for (int c = 0; c < shared_count(); ++c) {
    if (s.shared[c] < 0 || s.shared[c] >= shared_state_count(c)) {
      throw ValidationError("shared component out of range in " + ToString(s));
    }
  }
}

void EnvModel::ValidateActions(const ActionProfile& a) const {
  if (static_cast<int>(a.actions.size()) != agent_count()) {
    throw ActionError("action profile has the wrong length");
  }
  for (int i = 0; i < agent_count(); ++i) {
    if (a.actions[i] < 0 || a.actions[i] >= action_count(i)) {
      throw ActionError("illegal action " + std::to_string(a.actions[i]) +
                        " for agent " + std::to_string(i));
    }
  }
}

GlobalState SampleUniformState(const EnvModel& env, Rng& rng) {
  GlobalState s;
  s.agents.resize(env.agent_count());
  s.shared.resize(env.shared_count());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (int i = 0; i < env.agent_count(); ++i) {
      s.agents[i] = static_cast<int>(rng.Below(env.local_state_count(i)));
    }
    for (int c = 0; c < env.shared_count(); ++c) {
      s.shared[c] = static_cast<int>(rng.Below(env.shared_state_count(c)));
    }
    if (env.IsWellFormed(s) && !env.IsTerminal(s)) return s;
  }
  throw UnsupportedError("could not sample a well-formed state of " + env.id());
}

IntermediateState StartChain(const GlobalState& s, const Permutation& sigma) {
  IntermediateState start;
  start.base = s;
  start.substep = 0;
  start.sigma = sigma;
  start.shared_owner.assign(s.shared.size(), -1);
  return start;
}

IntermediateState StepSubstep(const EnvModel& env,
                              const IntermediateState& state, int action,
                              Rng* rng) {
  if (state.complete()) {
    throw SequenceCompleteError("all agents already acted in this step");
  }
  const int agent = state.acting_agent();
  if (action < 0 || action >= env.action_count(agent)) {
    throw ActionError("illegal action " + std::to_string(action) +
                      " for agent " + std::to_string(agent));
  }
  std::vector<Transition> outcomes = env.SubstepKernel(state.base, agent, action);
  const GlobalState* next = &outcomes.front().state;
  if (outcomes.size() > 1) {
    if (rng == nullptr) {
      throw ValidationError("stochastic sub-step kernel needs a random stream");
    }
    std::vector<double> probs;
    for (const Transition& t : outcomes) probs.push_back(t.probability);
    next = &outcomes[rng->Categorical(probs)].state;
  }
  IntermediateState out;
  out.base = *next;
  out.substep = state.substep + 1;
  out.sigma = state.sigma;
  out.applied_actions = state.applied_actions;
  out.applied_actions.emplace_back(agent, action);
  out.shared_owner = state.shared_owner;
  for (std::size_t c = 0; c < out.base.shared.size(); ++c) {
    if (out.base.shared[c] != state.base.shared[c]) out.shared_owner[c] = agent;
  }
  return out;
}

Chain BuildChain(const EnvModel& env, const GlobalState& s,
                 const ActionProfile& actions, const Permutation& sigma,
                 Rng* rng) {
  env.ValidateActions(actions);
  if (sigma.size() != env.agent_count()) {
    throw ValidationError("order length does not match agent count");
  }
  Chain chain;
  chain.reserve(sigma.size() + 1);
  chain.push_back(StartChain(s, sigma));
  for (int k = 0; k < sigma.size(); ++k) {
    const int agent = sigma.at(k);
    chain.push_back(StepSubstep(env, chain.back(), actions.actions[agent], rng));
  }
  return chain;
}

Chain ReconstructChain(const GlobalState& s_t, const GlobalState& s_next,
                       const Permutation& sigma,
                       const std::vector<int>& shared_owner,
                       const ActionProfile* actions) {
  const int n = sigma.size();
  if (static_cast<int>(s_t.agents.size()) != n ||
      s_next.agents.size() != s_t.agents.size() ||
      s_next.shared.size() != s_t.shared.size()) {
    throw ValidationError("recorded states do not share a component space");
  }
  if (!shared_owner.empty() && shared_owner.size() != s_t.shared.size()) {
    throw ValidationError("owner annotations do not match shared components");
  }
  if (actions != nullptr && static_cast<int>(actions->actions.size()) != n) {
    throw ValidationError("action profile length does not match");
  }
  Chain chain;
  chain.reserve(n + 1);
  IntermediateState current = StartChain(s_t, sigma);
  chain.push_back(current);
  for (int k = 0; k < n; ++k) {
    const int agent = sigma.at(k);
    current.base.agents[agent] = s_next.agents[agent];
    for (std::size_t c = 0; c < s_t.shared.size(); ++c) {
      const int owner = shared_owner.empty() ? -1 : shared_owner[c];
      const bool switch_now = owner >= 0 ? owner == agent : k == n - 1;
      if (switch_now && s_next.shared[c] != s_t.shared[c]) {
        current.base.shared[c] = s_next.shared[c];
        current.shared_owner[c] = agent;
      }
    }
    current.substep = k + 1;
    current.applied_actions.emplace_back(
        agent, actions != nullptr ? actions->actions[agent] : -1);
    chain.push_back(current);
  }
  return chain;
}

std::vector<Transition> ChainedKernel(const EnvModel& env, const GlobalState& s,
                                      const ActionProfile& actions,
                                      const Permutation& sigma) {
  std::map<GlobalState, double> frontier{{s, 1.0}};
  for (int k = 0; k < sigma.size(); ++k) {
    const int agent = sigma.at(k);
    std::map<GlobalState, double> next;
    for (const auto& [state, prob] : frontier) {
      for (const Transition& t :
           env.SubstepKernel(state, agent, actions.actions[agent])) {
        if (t.probability > 0.0) next[t.state] += prob * t.probability;
      }
    }
    frontier = std::move(next);
  }
  std::vector<Transition> out;
  for (auto& [state, prob] : frontier) out.push_back({state, prob});
  return out;
}

namespace {

std::vector<ActionProfile> AllJointActions(const EnvModel& env) {
  std::vector<ActionProfile> out{ActionProfile{}};
  for (int i = 0; i < env.agent_count(); ++i) {
    std::vector<ActionProfile> grown;
    for (const ActionProfile& partial : out) {
      for (int a = 0; a < env.action_count(i); ++a) {
        ActionProfile p = partial;
        p.actions.push_back(a);
        grown.push_back(std::move(p));
      }
    }
    out = std::move(grown);
  }
  return out;
}

double CompareKernels(const EnvModel& env, const GlobalState& s,
                      const ActionProfile& a,
                      const std::vector<Permutation>& orders) {
  std::map<GlobalState, double> expected;
  for (const Transition& t : env.JointKernel(s, a)) {
    expected[t.state] += t.probability;
  }
  std::map<GlobalState, double> decomposed;
  const double w = 1.0 / static_cast<double>(orders.size());
  for (const Permutation& sigma : orders) {
    for (const Transition& t : ChainedKernel(env, s, a, sigma)) {
      decomposed[t.state] += w * t.probability;
    }
  }
  double worst = 0.0;
  for (const auto& [state, p] : expected) {
    auto it = decomposed.find(state);
    worst = std::max(worst,
                     std::abs(p - (it == decomposed.end() ? 0.0 : it->second)));
  }
  for (const auto& [state, p] : decomposed) {
    if (!expected.contains(state)) worst = std::max(worst, p);
  }
  return worst;
}

}  // namespace

DecomposabilityReport VerifyDecomposability(const EnvModel& env,
                                            const DecomposabilityMode& mode) {
  if (!env.has_joint_kernel()) {
    throw UnsupportedError("environment " + env.id() +
                           " does not expose a joint kernel");
  }
  const std::vector<Permutation> orders = AllPermutations(env.agent_count());
  DecomposabilityReport report;
  auto check = [&](const GlobalState& s, const ActionProfile& a) {
    const double d = CompareKernels(env, s, a, orders);
    ++report.pairs_checked;
    report.max_discrepancy = std::max(report.max_discrepancy, d);
    if (d > mode.tolerance) {
      ++report.violation_count;
      if (static_cast<int>(report.violations.size()) <
          mode.max_recorded_violations) {
        report.violations.push_back({s, a, d});
      }
    }
  };
  if (mode.exhaustive) {
    const std::vector<ActionProfile> joint = AllJointActions(env);
    for (const GlobalState& s : env.EnumerateStates()) {
      for (const ActionProfile& a : joint) check(s, a);
    }
  } else {
    Rng rng(DeriveSeed(mode.seed, {static_cast<std::uint64_t>(
                                      StreamPurpose::kVerify)}));
    for (std::int64_t k = 0; k < mode.samples; ++k) {
      const GlobalState s = SampleUniformState(env, rng);
      ActionProfile a;
      for (int i = 0; i < env.agent_count(); ++i) {
        a.actions.push_back(static_cast<int>(rng.Below(env.action_count(i))));
      }
      check(s, a);
    }
  }
  return report;
}

}  // namespace icv
