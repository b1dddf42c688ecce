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

#ifndef ICV_ATTRIBUTION_H_
#define ICV_ATTRIBUTION_H_

// Characteristic functions over sub-step chains, marginal contributions and
// the order-averaged attribution estimators built on them.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icv/game.h"
#include "icv/infotheory.h"
#include "icv/policy.h"
#include "icv/trace.h"

namespace icv {

enum class Kind {
  kValue,
  kPeak,
  kConsensusBoth,
  kConsensusSelf,
  kConsensusOther,
  kDissimilarityBoth,
  kDissimilaritySelf,
  kDissimilarityOther,
  kStrategyChange,
};

const std::vector<Kind>& AllKinds();
std::string KindName(Kind kind);
Kind ParseKind(const std::string& name);  // throws ConfigError
bool NeedsValues(Kind kind);
bool IsConsensusKind(Kind kind);

enum class CoalitionFilter { kAll, kTeammates, kOpponents };
std::string FilterName(CoalitionFilter filter);
CoalitionFilter ParseFilter(const std::string& name);

// kNatural leaves every ν in its own units. kUnit rescales each ν to a
// comparable [0, 1]-sized range before differencing (see README).
enum class Scale { kNatural, kUnit };

enum class Estimator { kExact, kMonteCarlo };
std::string EstimatorName(Estimator e);
Estimator ParseEstimator(const std::string& name);

struct Coalition {
  std::vector<int> members;  // a subset of the successors of `agent` in σ
  int agent = -1;
  Permutation sigma;
};

// Successors of `agent` in σ, then restricted by team membership.
Coalition MakeCoalition(const EnvModel& env, const Permutation& sigma,
                        int agent,
                        CoalitionFilter filter = CoalitionFilter::kAll);

struct Tables {
  const TabularPolicy* policy = nullptr;
  const ValueTable* values = nullptr;
};

// --- Characteristic functions ---------------------------------------------------

double NuValue(const EnvModel& env, const std::vector<int>& coalition,
               const IntermediateState& s, const ValueTable& vt);
double NuPeak(const EnvModel& env, const std::vector<int>& coalition,
              const IntermediateState& s, const TabularPolicy& policy);

enum class ConsensusMode { kSelf, kOther, kBoth };

// Σ_j of 𝒥 (or J̄ when `dissimilarity`) between π^i and π^j, both read at
// s^{(j)} for the other-term and at s^{(i)} for the self-term. Throws
// UnsupportedError when i and some j have different action-set sizes.
double NuConsensus(const EnvModel& env, const std::vector<int>& coalition,
                   int agent, const IntermediateState& s,
                   const TabularPolicy& policy, ConsensusMode mode,
                   bool dissimilarity);

// J̄ between agent j's policy at two consecutive states of one chain.
double NuStrategyChange(const EnvModel& env, int agent,
                        const IntermediateState& prev,
                        const IntermediateState& next,
                        const TabularPolicy& policy);

// Divisor turning ν into its unit-scale variant for this coalition.
double UnitScale(const EnvModel& env, Kind kind,
                 const std::vector<int>& coalition);

// --- Marginal contributions ---------------------------------------------------------

struct MarginalRecord {
  std::uint64_t episode = 0;
  int t = 0;
  int substep = 0;  // k in [1, n]
  int agent = -1;
  Permutation sigma;
  std::vector<int> coalition;
  Kind kind = Kind::kValue;
  double delta = 0.0;
};

// Δν(C, s_{t,(k)}) = ν(C, chain[k]) − ν(C, chain[k−1]) for the agent acting
// at sub-step k. Throws ExcludedOrderError for an empty coalition.
MarginalRecord MarginalContribution(const EnvModel& env, Kind kind,
                                    const Coalition& coalition,
                                    const Chain& chain, int k,
                                    const Tables& tables,
                                    Scale scale = Scale::kNatural);

// --- Estimators -------------------------------------------------------------------------

struct AttributionSettings {
  std::vector<Kind> kinds = {Kind::kValue, Kind::kPeak};
  std::vector<int> agents;  // empty = every agent
  CoalitionFilter filter = CoalitionFilter::kAll;
  Scale scale = Scale::kNatural;
  Estimator estimator = Estimator::kExact;
  std::uint64_t seed = 0;  // order stream for the Monte Carlo estimator
  int stride = 1;          // evaluate every stride-th step
  bool keep_records = false;
};

struct ReportEntry {
  int agent = 0;
  Kind kind = Kind::kValue;
  double phi_raw = 0.0;
  double phi_normalized = 0.0;
  // Mean per-step contribution at each evaluated t across episodes.
  std::vector<std::pair<int, double>> history;
};

struct AttributionReport {
  std::vector<ReportEntry> entries;
  double kappa = 0.0;
  bool normalization_skipped = false;  // every raw value is zero
  bool kappa_from_magnitude = false;   // max raw ≤ 0, |raw| used instead
  int episodes = 0;
  int horizon = 0;  // longest evaluated trace
  Estimator estimator = Estimator::kExact;
  std::uint64_t seed = 0;
  CoalitionFilter filter = CoalitionFilter::kAll;
  Scale scale = Scale::kNatural;
  int stride = 1;
  std::int64_t lenient_misses = 0;
  std::vector<MarginalRecord> records;

  const ReportEntry& Entry(int agent, Kind kind) const;
};

inline constexpr int kMaxExactAgents = 6;

// Φ_i(ν) averaged over the traces. Chains are rebuilt offline from each
// trace step for every order considered; traces must come from `env`.
AttributionReport Attribute(const EnvModel& env, const Tables& tables,
                            const std::vector<EpisodeTrace>& traces,
                            const AttributionSettings& settings);

// Records `episodes` rollouts with `rollout_seed` and attributes them.
AttributionReport AttributeRollouts(const EnvModel& env, const Tables& tables,
                                    int episodes, int horizon,
                                    std::uint64_t rollout_seed,
                                    const AttributionSettings& settings);

// κ = max raw Φ over the report; see AttributionReport flags.
void NormalizeReport(AttributionReport& report);

// --- Diagnostics --------------------------------------------------------------------------

// R + discount_factor · V^j(s') − V^j(s). Sub-steps use reward 0, factor 1.
double SampledAdvantage(const EnvModel& env, const ValueTable& vt, int agent,
                        const GlobalState& s, const GlobalState& next,
                        double reward, double discount_factor);

// Number of a^i for which the expected advantage Λ^i(s, (a^i, a^{−i})),
// computed from the joint kernel, is non-negative (within 1e-12).
int ChoicesMetric(const EnvModel& env, const ValueTable& vt, int agent,
                  const GlobalState& s, const ActionProfile& joint);

struct BestResponse {
  int chosen = -1;
  int argmax = -1;  // lowest-index maximizer
  bool is_best = false;
  std::vector<double> deltas;  // Δν_c for every action of the acting agent
};

inline constexpr double kBestResponseTolerance = 1e-12;

// Hypothetically executes every action of the agent acting at sub-step k
// from chain[k−1] and compares Δν for a consensus kind.
BestResponse BestResponseCheck(const EnvModel& env, const TabularPolicy& policy,
                               const Chain& chain, int k,
                               Kind kind = Kind::kConsensusBoth);

// Capacity of the channel a^i → A^j with rows π^j at the successor of
// `prev` under each action of i = prev.acting_agent().
CapacityResult InstrumentalEmpowerment(const EnvModel& env,
                                       const TabularPolicy& policy, int j,
                                       const IntermediateState& prev);

}  // namespace icv

#endif  // ICV_ATTRIBUTION_H_
