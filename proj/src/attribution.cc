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

#include "icv/attribution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "icv/envs.h"
#include "icv/errors.h"
#include "icv/rng.h"

namespace icv {
namespace {

// Neumaier-compensated running sum; the result depends only on the order of
// additions, which every estimator fixes.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

const std::vector<std::pair<Kind, const char*>>& KindTable() {
  static const std::vector<std::pair<Kind, const char*>> table = {
      {Kind::kValue, "value"},
      {Kind::kPeak, "peak"},
      {Kind::kConsensusBoth, "consensus_both"},
      {Kind::kConsensusSelf, "consensus_self"},
      {Kind::kConsensusOther, "consensus_other"},
      {Kind::kDissimilarityBoth, "dissimilarity_both"},
      {Kind::kDissimilaritySelf, "dissimilarity_self"},
      {Kind::kDissimilarityOther, "dissimilarity_other"},
      {Kind::kStrategyChange, "strategy_change"},
  };
  return table;
}

ConsensusMode ModeOf(Kind kind) {
  switch (kind) {
    case Kind::kConsensusSelf:
    case Kind::kDissimilaritySelf:
      return ConsensusMode::kSelf;
    case Kind::kConsensusOther:
    case Kind::kDissimilarityOther:
      return ConsensusMode::kOther;
    default:
      return ConsensusMode::kBoth;
  }
}

bool IsDissimilarity(Kind kind) {
  return kind == Kind::kDissimilarityBoth || kind == Kind::kDissimilaritySelf ||
         kind == Kind::kDissimilarityOther;
}

const TabularPolicy& RequirePolicy(const Tables& tables) {
  if (tables.policy == nullptr) {
    throw ValidationError("this characteristic kind needs a policy table");
  }
  return *tables.policy;
}

const ValueTable& RequireValues(const Tables& tables) {
  if (tables.values == nullptr) {
    throw ValidationError("the value kind needs a value table");
  }
  return *tables.values;
}

// ν(C, s) for every kind except strategy change.
double Nu(const EnvModel& env, Kind kind, const Coalition& c,
          const IntermediateState& s, const Tables& tables) {
  switch (kind) {
    case Kind::kValue:
      return NuValue(env, c.members, s, RequireValues(tables));
    case Kind::kPeak:
      return NuPeak(env, c.members, s, RequirePolicy(tables));
    case Kind::kStrategyChange:
      break;
    default:
      return NuConsensus(env, c.members, c.agent, s, RequirePolicy(tables),
                         ModeOf(kind), IsDissimilarity(kind));
  }
  throw ValidationError("strategy change is not a state function");
}

}  // namespace

// --- Names --------------------------------------------------------------------------

const std::vector<Kind>& AllKinds() {
  static const std::vector<Kind> kinds = [] {
    std::vector<Kind> out;
    for (const auto& [k, name] : KindTable()) out.push_back(k);
    return out;
  }();
  return kinds;
}

std::string KindName(Kind kind) {
  for (const auto& [k, name] : KindTable()) {
    if (k == kind) return name;
  }
  return "unknown";
}

Kind ParseKind(const std::string& name) {
  for (const auto& [k, n] : KindTable()) {
    if (name == n) return k;
  }
  throw ConfigError("unknown characteristic kind '" + name + "'");
}

bool NeedsValues(Kind kind) { return kind == Kind::kValue; }

bool IsConsensusKind(Kind kind) {
  return kind != Kind::kValue && kind != Kind::kPeak &&
         kind != Kind::kStrategyChange;
}

std::string FilterName(CoalitionFilter filter) {
  switch (filter) {
    case CoalitionFilter::kAll: return "all";
    case CoalitionFilter::kTeammates: return "teammates";
    case CoalitionFilter::kOpponents: return "opponents";
  }
  return "unknown";
}

CoalitionFilter ParseFilter(const std::string& name) {
  if (name == "all") return CoalitionFilter::kAll;
  if (name == "teammates") return CoalitionFilter::kTeammates;
  if (name == "opponents") return CoalitionFilter::kOpponents;
  throw ConfigError("unknown coalition filter '" + name + "'");
}

std::string EstimatorName(Estimator e) {
  return e == Estimator::kExact ? "exact" : "mc";
}

Estimator ParseEstimator(const std::string& name) {
  if (name == "exact") return Estimator::kExact;
  if (name == "mc") return Estimator::kMonteCarlo;
  throw ConfigError("unknown estimator '" + name + "' (exact | mc)");
}

Coalition MakeCoalition(const EnvModel& env, const Permutation& sigma,
                        int agent, CoalitionFilter filter) {
  if (agent < 0 || agent >= sigma.size()) {
    throw ValidationError("agent out of range for the order");
  }
  Coalition c;
  c.agent = agent;
  c.sigma = sigma;
  for (int j : sigma.Successors(agent)) {
    const bool same_team = env.team(j) == env.team(agent);
    if (filter == CoalitionFilter::kTeammates && !same_team) continue;
    if (filter == CoalitionFilter::kOpponents && same_team) continue;
    c.members.push_back(j);
  }
  return c;
}

// --- Characteristic functions -----------------------------------------------------

double NuValue(const EnvModel& env, const std::vector<int>& coalition,
               const IntermediateState& s, const ValueTable& vt) {
  double total = 0.0;
  for (int j : coalition) total += EvaluateValue(vt, env, j, s);
  return total;
}

double NuPeak(const EnvModel& env, const std::vector<int>& coalition,
              const IntermediateState& s, const TabularPolicy& policy) {
  double total = 0.0;
  for (int j : coalition) total += Peakedness(policy.At(env, j, s.base));
  return total;
}

double NuConsensus(const EnvModel& env, const std::vector<int>& coalition,
                   int agent, const IntermediateState& s,
                   const TabularPolicy& policy, ConsensusMode mode,
                   bool dissimilarity) {
  const auto term = [&](const Pmf& p, const Pmf& q) {
    return dissimilarity ? Jsd(p, q) : Similarity(p, q);
  };
  double total = 0.0;
  for (int j : coalition) {
    if (policy.action_count(j) != policy.action_count(agent)) {
      throw UnsupportedError("agents " + std::to_string(agent) + " and " +
                             std::to_string(j) +
                             " have different action sets; consensus is "
                             "undefined");
    }
    if (mode != ConsensusMode::kSelf) {
      total += term(policy.AtView(env, agent, s.base, j),
                    policy.AtView(env, j, s.base, j));
    }
    if (mode != ConsensusMode::kOther) {
      total += term(policy.AtView(env, agent, s.base, agent),
                    policy.AtView(env, j, s.base, agent));
    }
  }
  return total;
}

double NuStrategyChange(const EnvModel& env, int agent,
                        const IntermediateState& prev,
                        const IntermediateState& next,
                        const TabularPolicy& policy) {
  if (next.substep != prev.substep + 1 || !(next.sigma == prev.sigma)) {
    throw ValidationError("strategy change needs consecutive sub-steps");
  }
  return Jsd(policy.At(env, agent, next.base), policy.At(env, agent, prev.base));
}

double UnitScale(const EnvModel& env, Kind kind,
                 const std::vector<int>& coalition) {
  const double size = static_cast<double>(coalition.size());
  if (size == 0.0) return 1.0;
  switch (kind) {
    case Kind::kValue: {
      const RewardBounds b = env.reward_bounds();
      const double range = (b.max - b.min) / (1.0 - env.discount());
      return range > 0.0 ? size * range : size;
    }
    case Kind::kPeak: {
      double bits = 0.0;
      for (int j : coalition) bits += std::log2(env.action_count(j));
      return bits > 0.0 ? bits : 1.0;
    }
    case Kind::kConsensusBoth:
    case Kind::kDissimilarityBoth:
      return 2.0 * size;
    default:
      return size;
  }
}

// --- Marginal contributions ------------------------------------------------------------

MarginalRecord MarginalContribution(const EnvModel& env, Kind kind,
                                    const Coalition& coalition,
                                    const Chain& chain, int k,
                                    const Tables& tables, Scale scale) {
  if (k < 1 || k >= static_cast<int>(chain.size())) {
    throw ValidationError("sub-step index out of range");
  }
  const IntermediateState& before = chain[k - 1];
  const IntermediateState& after = chain[k];
  if (before.acting_agent() != coalition.agent ||
      !(before.sigma == coalition.sigma)) {
    throw ValidationError("coalition does not belong to this sub-step");
  }
  if (coalition.members.empty()) {
    throw ExcludedOrderError("agent " + std::to_string(coalition.agent) +
                             " has an empty coalition under this order");
  }
  MarginalRecord rec;
  rec.substep = k;
  rec.agent = coalition.agent;
  rec.sigma = coalition.sigma;
  rec.coalition = coalition.members;
  rec.kind = kind;
  if (kind == Kind::kStrategyChange) {
    const TabularPolicy& policy = RequirePolicy(tables);
    double total = 0.0;
    for (int j : coalition.members) {
      total += NuStrategyChange(env, j, before, after, policy);
    }
    rec.delta = total;
  } else {
    rec.delta = Nu(env, kind, coalition, after, tables) -
                Nu(env, kind, coalition, before, tables);
  }
  if (scale == Scale::kUnit) rec.delta /= UnitScale(env, kind, coalition.members);
  if (!std::isfinite(rec.delta)) {
    throw ValidationError("non-finite marginal contribution for agent " +
                          std::to_string(coalition.agent) + " at sub-step " +
                          std::to_string(k) + " (" + KindName(kind) + ")");
  }
  return rec;
}

// --- Estimators ---------------------------------------------------------------------------

const ReportEntry& AttributionReport::Entry(int agent, Kind kind) const {
  for (const ReportEntry& e : entries) {
    if (e.agent == agent && e.kind == kind) return e;
  }
  throw LookupError("report has no entry for agent " + std::to_string(agent) +
                    " and kind " + KindName(kind));
}

namespace {

void ValidateSettings(const EnvModel& env, const Tables& tables,
                      const AttributionSettings& s) {
  const int n = env.agent_count();
  if (s.kinds.empty()) throw ConfigError("no characteristic kinds requested");
  if (s.stride < 1) throw ConfigError("stride must be at least 1");
  for (int i : s.agents) {
    if (i < 0 || i >= n) {
      throw ConfigError("agent " + std::to_string(i) + " does not exist");
    }
  }
  if (n < 2) throw ConfigError("attribution needs at least two agents");
  if (s.estimator == Estimator::kExact && n > kMaxExactAgents) {
    throw UnsupportedError("exact enumeration is limited to " +
                           std::to_string(kMaxExactAgents) +
                           " agents; use the mc estimator");
  }
  bool multi_team = false;
  for (int i = 1; i < n; ++i) multi_team = multi_team || env.team(i) != env.team(0);
  if (s.filter == CoalitionFilter::kOpponents && !multi_team) {
    throw ConfigError("the opponents filter needs an environment with teams");
  }
  for (Kind k : s.kinds) {
    if (NeedsValues(k) && tables.values == nullptr) {
      throw ConfigError("kind value needs a value table");
    }
    if (!NeedsValues(k) && tables.policy == nullptr) {
      throw ConfigError("kind " + KindName(k) + " needs a policy table");
    }
    if (IsConsensusKind(k)) {
      for (int i = 1; i < n; ++i) {
        if (env.action_count(i) != env.action_count(0)) {
          throw ConfigError("kind " + KindName(k) +
                            " needs identical action sets across agents");
        }
      }
    }
  }
}

}  // namespace

AttributionReport Attribute(const EnvModel& env, const Tables& tables,
                            const std::vector<EpisodeTrace>& traces,
                            const AttributionSettings& settings) {
  ValidateSettings(env, tables, settings);
  const int n = env.agent_count();
  std::vector<int> agents = settings.agents;
  if (agents.empty()) {
    for (int i = 0; i < n; ++i) agents.push_back(i);
  }
  std::vector<bool> selected(n, false);
  for (int i : agents) selected[i] = true;
  const std::size_t kinds = settings.kinds.size();
  const auto slot = [&](int agent, std::size_t kind) {
    return static_cast<std::size_t>(agent) * kinds + kind;
  };

  const std::int64_t misses_before =
      (tables.policy ? tables.policy->lenient_misses() : 0) +
      (tables.values ? tables.values->lenient_misses() : 0);

  std::vector<Permutation> orders;
  double weight = 1.0;
  if (settings.estimator == Estimator::kExact) {
    orders = AllPermutations(n);
    weight = 1.0 / static_cast<double>(Factorial(n) - Factorial(n - 1));
  }

  AttributionReport report;
  report.estimator = settings.estimator;
  report.seed = settings.seed;
  report.filter = settings.filter;
  report.scale = settings.scale;
  report.stride = settings.stride;

  std::vector<CompensatedSum> phi(n * kinds);
  std::vector<std::map<int, std::pair<CompensatedSum, int>>> history(n * kinds);
  std::vector<double> step_value(n * kinds);

  auto contribute = [&](const Chain& chain, int k, int agent,
                        const Permutation& sigma, std::uint64_t episode, int t,
                        double w, std::vector<CompensatedSum>& acc) {
    const Coalition c = MakeCoalition(env, sigma, agent, settings.filter);
    if (c.members.empty()) return;  // filtered to nothing: contributes 0
    for (std::size_t q = 0; q < kinds; ++q) {
      MarginalRecord rec = MarginalContribution(env, settings.kinds[q], c,
                                                chain, k, tables, settings.scale);
      acc[slot(agent, q)].Add(w * rec.delta);
      if (settings.keep_records) {
        rec.episode = episode;
        rec.t = t;
        report.records.push_back(std::move(rec));
      }
    }
  };

  int used_episodes = 0;
  for (std::size_t m = 0; m < traces.size(); ++m) {
    const EpisodeTrace& trace = traces[m];
    if (trace.env_id != env.id() || trace.agent_count != n ||
        trace.shared_count != env.shared_count()) {
      throw ValidationError("trace " + std::to_string(m) +
                            " does not belong to environment " + env.id());
    }
    std::vector<CompensatedSum> episode_sum(n * kinds);
    int included = 0;
    for (int t = 0; t < trace.length(); t += settings.stride) {
      const StepRecord& rec = trace.steps[t];
      const GlobalState& next = trace.steps[t + 1].state;
      const std::vector<int> owners =
          rec.shared_owner ? *rec.shared_owner : std::vector<int>{};
      const ActionProfile* actions = rec.actions ? &*rec.actions : nullptr;
      std::vector<CompensatedSum> step(n * kinds);
      if (settings.estimator == Estimator::kExact) {
        for (const Permutation& sigma : orders) {
          const Chain chain =
              ReconstructChain(rec.state, next, sigma, owners, actions);
          for (int k = 1; k < n; ++k) {
            const int agent = sigma.at(k - 1);
            if (selected[agent]) {
              contribute(chain, k, agent, sigma, m, t, weight, step);
            }
          }
        }
      } else {
        for (int agent : agents) {
          Rng rng = Rng::ForStream(settings.seed, m, t, StreamPurpose::kOrder,
                                   static_cast<std::uint64_t>(agent));
          const Permutation sigma =
              SampleOrder(OrderDistribution::UniformRestricted(agent), n, rng);
          const Chain chain =
              ReconstructChain(rec.state, next, sigma, owners, actions);
          contribute(chain, sigma.PositionOf(agent) + 1, agent, sigma, m, t,
                     1.0, step);
        }
      }
      for (std::size_t s = 0; s < step.size(); ++s) {
        const double x = step[s].value();
        episode_sum[s].Add(x);
        auto& h = history[s][t];
        h.first.Add(x);
        ++h.second;
      }
      ++included;
    }
    if (included == 0) continue;
    ++used_episodes;
    report.horizon = std::max(report.horizon, trace.length());
    for (std::size_t s = 0; s < phi.size(); ++s) {
      phi[s].Add(episode_sum[s].value() / included);
    }
  }
  if (used_episodes == 0) {
    throw ValidationError("no trace contributed an evaluated step");
  }
  report.episodes = used_episodes;
  for (int agent : agents) {
    for (std::size_t q = 0; q < kinds; ++q) {
      ReportEntry e;
      e.agent = agent;
      e.kind = settings.kinds[q];
      e.phi_raw = phi[slot(agent, q)].value() / used_episodes;
      for (const auto& [t, h] : history[slot(agent, q)]) {
        e.history.emplace_back(t, h.first.value() / h.second);
      }
      report.entries.push_back(std::move(e));
    }
  }
  report.lenient_misses =
      (tables.policy ? tables.policy->lenient_misses() : 0) +
      (tables.values ? tables.values->lenient_misses() : 0) - misses_before;
  NormalizeReport(report);
  return report;
}

AttributionReport AttributeRollouts(const EnvModel& env, const Tables& tables,
                                    int episodes, int horizon,
                                    std::uint64_t rollout_seed,
                                    const AttributionSettings& settings) {
  if (tables.policy == nullptr) throw ConfigError("rollouts need a policy");
  if (episodes < 1) throw ConfigError("episodes must be positive");
  std::vector<EpisodeTrace> traces;
  traces.reserve(episodes);
  for (int m = 0; m < episodes; ++m) {
    RecordOptions options;
    options.horizon = horizon;
    options.episode = static_cast<std::uint64_t>(m);
    traces.push_back(RecordEpisode(env, *tables.policy, rollout_seed, options));
  }
  return Attribute(env, tables, traces, settings);
}

void NormalizeReport(AttributionReport& report) {
  report.normalization_skipped = false;
  report.kappa_from_magnitude = false;
  if (report.entries.empty()) {
    report.normalization_skipped = true;
    report.kappa = 0.0;
    return;
  }
  double hi = -std::numeric_limits<double>::infinity();
  double magnitude = 0.0;
  for (const ReportEntry& e : report.entries) {
    if (!std::isfinite(e.phi_raw)) {
      throw ValidationError("report holds a non-finite entry");
    }
    hi = std::max(hi, e.phi_raw);
    magnitude = std::max(magnitude, std::abs(e.phi_raw));
  }
  double kappa = hi;
  if (kappa <= 0.0) {
    if (magnitude == 0.0) {
      report.normalization_skipped = true;
      report.kappa = 0.0;
      for (ReportEntry& e : report.entries) e.phi_normalized = e.phi_raw;
      return;
    }
    report.kappa_from_magnitude = true;
    kappa = magnitude;
  }
  report.kappa = kappa;
  for (ReportEntry& e : report.entries) e.phi_normalized = e.phi_raw / kappa;
}

// --- Diagnostics -------------------------------------------------------------------------------

double SampledAdvantage(const EnvModel& env, const ValueTable& vt, int agent,
                        const GlobalState& s, const GlobalState& next,
                        double reward, double discount_factor) {
  return reward + discount_factor * EvaluateValue(vt, env, agent, next) -
         EvaluateValue(vt, env, agent, s);
}

int ChoicesMetric(const EnvModel& env, const ValueTable& vt, int agent,
                  const GlobalState& s, const ActionProfile& joint) {
  env.ValidateState(s);
  env.ValidateActions(joint);
  const double gamma = env.discount();
  const double baseline = EvaluateValue(vt, env, agent, s);
  int count = 0;
  ActionProfile a = joint;
  for (int action = 0; action < env.action_count(agent); ++action) {
    a.actions[agent] = action;
    double expected = 0.0;
    for (const Transition& tr : env.JointKernel(s, a)) {
      const double r = env.Rewards(s, a, tr.state)[agent];
      const double v =
          env.IsTerminal(tr.state) ? 0.0 : EvaluateValue(vt, env, agent, tr.state);
      expected += tr.probability * (r + gamma * v);
    }
    if (expected - baseline >= -1e-12) ++count;
  }
  return count;
}

BestResponse BestResponseCheck(const EnvModel& env, const TabularPolicy& policy,
                               const Chain& chain, int k, Kind kind) {
  if (kind == Kind::kStrategyChange) {
    throw ValidationError("best responses are defined for state kinds only");
  }
  if (k < 1 || k >= static_cast<int>(chain.size())) {
    throw ValidationError("sub-step index out of range");
  }
  const IntermediateState& before = chain[k - 1];
  const int agent = before.acting_agent();
  const Coalition c = MakeCoalition(env, before.sigma, agent);
  if (c.members.empty()) {
    throw ExcludedOrderError("the last agent in the order has no coalition");
  }
  BestResponse out;
  out.chosen = chain[k].applied_actions.back().second;
  if (out.chosen < 0) {
    throw ValidationError("chain does not record the executed action");
  }
  Tables tables{&policy, nullptr};
  const double base = Nu(env, kind, c, before, tables);
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < env.action_count(agent); ++a) {
    const IntermediateState hypothetical = StepSubstep(env, before, a);
    const double d = Nu(env, kind, c, hypothetical, tables) - base;
    out.deltas.push_back(d);
    if (d > best) {
      best = d;
      out.argmax = a;
    }
  }
  out.is_best = out.deltas[out.chosen] >= best - kBestResponseTolerance;
  return out;
}

CapacityResult InstrumentalEmpowerment(const EnvModel& env,
                                       const TabularPolicy& policy, int j,
                                       const IntermediateState& prev) {
  if (prev.complete()) {
    throw SequenceCompleteError("no agent acts after the last sub-step");
  }
  const int agent = prev.acting_agent();
  std::vector<Pmf> rows;
  for (int a = 0; a < env.action_count(agent); ++a) {
    const std::vector<Transition> outcomes =
        env.SubstepKernel(prev.base, agent, a);
    if (outcomes.size() == 1) {
      rows.push_back(policy.At(env, j, outcomes.front().state));
      continue;
    }
    std::vector<double> mix(policy.action_count(j), 0.0);
    for (const Transition& tr : outcomes) {
      const Pmf p = policy.At(env, j, tr.state);
      for (int b = 0; b < p.outcome_count(); ++b) {
        mix[b] += tr.probability * p[b];
      }
    }
    rows.push_back(Pmf::Normalize(std::move(mix)));
  }
  return ChannelCapacity(Channel(std::move(rows)));
}

}  // namespace icv
