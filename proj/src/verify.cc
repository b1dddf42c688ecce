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

#include "icv/verify.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "icv/attribution.h"
#include "icv/errors.h"
#include "icv/rng.h"
#include "icv/shapley.h"
#include "icv/trace.h"

namespace icv {
namespace {

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

CheckResult Fail(CheckResult c, std::string detail) {
  c.passed = false;
  c.detail = std::move(detail);
  return c;
}

EnvSpec Spec(const std::string& id, const std::string& layout = "keylock_2p") {
  EnvSpec spec;
  spec.id = id;
  spec.layout = layout;
  return spec;
}

TrainedModel QuickModel(const EnvSpec& spec, const VerifyOptions& options) {
  TrainingConfig config = RecommendedTrainingConfig(spec.id);
  config.episodes = options.training_episodes;
  config.seed = options.seed;
  return TrainModel(spec, config);
}

// --- axioms -------------------------------------------------------------------------

CoalitionalGame RandomGame(int n, Rng& rng) {
  std::vector<double> v(std::size_t{1} << n);
  for (std::size_t k = 1; k < v.size(); ++k) v[k] = 2.0 * rng.Uniform() - 1.0;
  // Plant an interchangeable pair (0, 1) and a dummy (n - 1) half the time.
  if (n >= 2 && rng.Uniform() < 0.5) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if ((k & 1) && !(k & 2)) v[(k & ~std::size_t{1}) | 2] = v[k];
    }
  }
  if (rng.Uniform() < 0.5) {
    const std::size_t d = std::size_t{1} << (n - 1);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k & d) v[k] = v[k & ~d];
    }
  }
  v[0] = 0.0;
  return CoalitionalGame(n, std::move(v));
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

const std::vector<std::string>& SuiteNames() {
  static const std::vector<std::string> names = {
      "axioms", "propositions", "decomposability", "estimator", "empowerment"};
  return names;
}

TrainingConfig RecommendedTrainingConfig(const std::string& env_id) {
  TrainingConfig config;
  if (env_id == "foraging") config.actor_step = 0.3;
  if (env_id == "tag") config.actor_step = 2.0;
  return config;
}

TrainedModel TrainModel(const EnvSpec& spec, const TrainingConfig& config) {
  TrainedModel model;
  model.spec = spec;
  model.env = MakeEnv(spec);
  model.result = TrainActorCritic(*model.env, config);
  return model;
}

SuiteReport RunAxiomsSuite(const VerifyOptions& options) {
  SuiteReport report{"axioms", {}};
  Rng rng(DeriveSeed(options.seed, {static_cast<std::uint64_t>(
                                       StreamPurpose::kVerify), 1}));
  for (int n : {3, 4, 5}) {
    CheckResult c{"axioms_n" + std::to_string(n), true, "", {}};
    int pairs = 0;
    int dummies = 0;
    for (int g = 0; g < 1000; ++g) {
      const CoalitionalGame game = RandomGame(n, rng);
      const CoalitionalGame other = RandomGame(n, rng);
      const AxiomReport r = VerifyAxioms(game, other, options.tolerance);
      pairs += r.interchangeable_pairs;
      dummies += r.dummy_players;
      if (!r.passed() && c.passed) {
        c = Fail(c, "game " + std::to_string(g) + ": " +
                        (r.diagnostics.empty() ? "" : r.diagnostics.front()));
      }
    }
    c.metrics = {{"games", 1000}, {"interchangeable_pairs", pairs},
                 {"dummies", dummies}};
    report.checks.push_back(std::move(c));
  }
  CheckResult agree{"subset_vs_permutation", true, "", {}};
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    for (int g = 0; g < 100; ++g) {
      const CoalitionalGame game = RandomGame(n, rng);
      const std::vector<double> a = ShapleyValues(game);
      const std::vector<double> b = ShapleyValuesByPermutation(game);
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
  }
  agree.metrics = {{"max_abs_diff", worst}};
  if (worst > 1e-12) agree = Fail(agree, "max difference " + Fmt(worst));
  report.checks.push_back(std::move(agree));
  return report;
}

// --- propositions --------------------------------------------------------------------

SuiteReport RunPropositionsSuite(const VerifyOptions& options) {
  SuiteReport report{"propositions", {}};
  const std::vector<std::string> ids = {"keylock", "foraging", "tag"};
  const int per_env =
      (options.min_substeps + static_cast<int>(ids.size()) - 1) /
      static_cast<int>(ids.size());
  for (const std::string& id : ids) {
    TrainedModel model = QuickModel(Spec(id), options);
    const EnvModel& env = *model.env;
    ValueTable values = model.result.values;
    const TabularPolicy& policy = model.result.policy;
    if (options.corrupt_values) {
      const GlobalState s0 = env.InitialDistribution().front().state;
      for (int i = 0; i < env.agent_count(); ++i) {
        values.SetUnchecked(i, ValueKey(env, s0), std::nan(""));
      }
    }
    const Tables tables{&policy, &values};
    CheckResult p1{"value_delta_advantage:" + id, true, "", {}};
    CheckResult p2{"peak_delta_mi:" + id, true, "", {}};
    double worst1 = 0.0;
    double worst2 = 0.0;
    int substeps = 0;
    const std::vector<Permutation> orders = AllPermutations(env.agent_count());
    for (std::uint64_t episode = 0; substeps < per_env; ++episode) {
      RecordOptions ro;
      ro.episode = episode;
      const EpisodeTrace trace = RecordEpisode(env, policy, options.seed, ro);
      for (int t = 0; t < trace.length() && substeps < per_env; ++t) {
        const StepRecord& step = trace.steps[t];
        for (const Permutation& sigma : orders) {
          const Chain chain = BuildChain(env, step.state, *step.actions, sigma);
          for (int k = 1; k < sigma.size(); ++k) {
            const int agent = sigma.at(k - 1);
            const Coalition c = MakeCoalition(env, sigma, agent);
            const std::string where =
                id + " episode " + std::to_string(episode) + " t " +
                std::to_string(t) + " substep " + std::to_string(k) +
                " agent " + std::to_string(agent) + " state " +
                ToString(chain[k - 1].base);
            double advantage = 0.0;
            for (int j : c.members) {
              advantage += SampledAdvantage(env, values, j, chain[k - 1].base,
                                            chain[k].base, 0.0, 1.0);
            }
            double d1 = std::nan("");
            try {
              d1 = std::abs(MarginalContribution(env, Kind::kValue, c, chain, k,
                                                 tables)
                                .delta -
                            advantage);
            } catch (const ValidationError&) {
            }
            if (!(d1 <= options.tolerance) && p1.passed) {
              p1 = Fail(p1, "delta_v differs from the sampled advantage at " +
                                where + " (discrepancy " + Fmt(d1) + ")");
            }
            if (std::isfinite(d1)) worst1 = std::max(worst1, d1);

            double mi = 0.0;
            for (int j : c.members) {
              mi += PointwiseConditionalMi(policy.At(env, j, chain[k - 1].base),
                                           policy.At(env, j, chain[k].base));
            }
            const double d2 = std::abs(
                MarginalContribution(env, Kind::kPeak, c, chain, k, tables)
                    .delta -
                mi);
            if (!(d2 <= options.tolerance) && p2.passed) {
              p2 = Fail(p2, "delta_p differs from the pointwise MI at " + where +
                                " (discrepancy " + Fmt(d2) + ")");
            }
            worst2 = std::max(worst2, d2);
            ++substeps;
          }
        }
      }
    }
    p1.metrics = {{"substeps", substeps}, {"max_discrepancy", worst1}};
    p2.metrics = {{"substeps", substeps}, {"max_discrepancy", worst2}};
    report.checks.push_back(std::move(p1));
    report.checks.push_back(std::move(p2));
  }
  return report;
}

// --- decomposability -----------------------------------------------------------------

SuiteReport RunDecomposabilitySuite(const VerifyOptions& options) {
  SuiteReport report{"decomposability", {}};
  struct Case {
    std::string name;
    EnvSpec spec;
    bool exhaustive;
    bool expect_violations;
  };
  const std::vector<Case> cases = {
      {"keylock_2p", Spec("keylock", "keylock_2p"), true, false},
      {"keylock_3p", Spec("keylock", "keylock_3p"), false, false},
      {"foraging", Spec("foraging"), false, false},
      {"tag", Spec("tag"), true, false},
      {"contention", Spec("contention"), true, true},
  };
  for (const Case& c : cases) {
    const auto env = MakeEnv(c.spec);
    DecomposabilityMode mode;
    mode.exhaustive = c.exhaustive;
    mode.samples = 5000;
    mode.seed = options.seed;
    mode.tolerance = options.tolerance;
    const DecomposabilityReport r = VerifyDecomposability(*env, mode);
    CheckResult check{(c.expect_violations ? "flags_counterexample:"
                                           : "decomposable:") +
                          c.name,
                      true, "", {}};
    check.metrics = {{"pairs_checked", static_cast<double>(r.pairs_checked)},
                     {"violations", static_cast<double>(r.violation_count)},
                     {"max_discrepancy", r.max_discrepancy}};
    if (c.expect_violations && r.passed()) {
      check = Fail(check, "order-dependent environment was not flagged");
    } else if (!c.expect_violations && !r.passed()) {
      const DecompositionViolation& v = r.violations.front();
      check = Fail(check, "first violation at " + ToString(v.state) +
                              " discrepancy " + Fmt(v.discrepancy));
    } else if (c.expect_violations) {
      const DecompositionViolation& v = r.violations.front();
      check.detail = "first violation at " + ToString(v.state);
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

// --- estimator -----------------------------------------------------------------------

SuiteReport RunEstimatorSuite(const VerifyOptions& options) {
  SuiteReport report{"estimator", {}};
  const std::vector<Kind>& kinds = AllKinds();
  {
    TrainedModel model = QuickModel(Spec("keylock", "keylock_2p"), options);
    const Tables tables{&model.result.policy, &model.result.values};
    std::vector<EpisodeTrace> traces;
    for (int m = 0; m < 10; ++m) {
      RecordOptions ro;
      ro.episode = static_cast<std::uint64_t>(m);
      traces.push_back(
          RecordEpisode(*model.env, model.result.policy, options.seed, ro));
    }
    AttributionSettings s;
    s.kinds = kinds;
    const AttributionReport exact = Attribute(*model.env, tables, traces, s);
    s.estimator = Estimator::kMonteCarlo;
    s.seed = options.seed + 1;
    const AttributionReport mc = Attribute(*model.env, tables, traces, s);
    CheckResult c{"mc_equals_exact_n2", true, "", {}};
    for (std::size_t e = 0; e < exact.entries.size(); ++e) {
      if (exact.entries[e].phi_raw != mc.entries[e].phi_raw && c.passed) {
        c = Fail(c, "agent " + std::to_string(exact.entries[e].agent) + " " +
                        KindName(exact.entries[e].kind) + ": exact " +
                        Fmt(exact.entries[e].phi_raw) + " mc " +
                        Fmt(mc.entries[e].phi_raw));
      }
    }
    report.checks.push_back(std::move(c));
  }
  {
    TrainedModel model = QuickModel(Spec("keylock", "keylock_3p"), options);
    const Tables tables{&model.result.policy, &model.result.values};
    std::vector<EpisodeTrace> traces;
    for (int m = 0; m < 5; ++m) {
      RecordOptions ro;
      ro.episode = static_cast<std::uint64_t>(m);
      traces.push_back(
          RecordEpisode(*model.env, model.result.policy, options.seed, ro));
    }
    AttributionSettings s;
    s.kinds = kinds;
    const AttributionReport exact = Attribute(*model.env, tables, traces, s);
    s.estimator = Estimator::kMonteCarlo;
    const std::size_t entries = exact.entries.size();
    std::vector<double> sum(entries, 0.0);
    std::vector<double> sum_sq(entries, 0.0);
    const int seeds = options.estimator_seeds;
    for (int k = 0; k < seeds; ++k) {
      s.seed = DeriveSeed(options.seed, {7, static_cast<std::uint64_t>(k)});
      const AttributionReport mc = Attribute(*model.env, tables, traces, s);
      for (std::size_t e = 0; e < entries; ++e) {
        sum[e] += mc.entries[e].phi_raw;
        sum_sq[e] += mc.entries[e].phi_raw * mc.entries[e].phi_raw;
      }
    }
    CheckResult c{"mc_unbiased_n3", true, "", {}};
    double worst_z = 0.0;
    for (std::size_t e = 0; e < entries; ++e) {
      const double mean = sum[e] / seeds;
      const double var =
          std::max(0.0, (sum_sq[e] - seeds * mean * mean) / (seeds - 1));
      const double se = std::sqrt(var / seeds);
      const double diff = std::abs(mean - exact.entries[e].phi_raw);
      const bool ok = se > 0.0 ? diff <= 3.0 * se + 1e-12 : diff <= 1e-12;
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
      if (!ok && c.passed) {
        c = Fail(c, "agent " + std::to_string(exact.entries[e].agent) + " " +
                        KindName(exact.entries[e].kind) + ": mean " +
                        Fmt(mean) + " exact " +
                        Fmt(exact.entries[e].phi_raw) + " se " + Fmt(se));
      }
    }
    c.metrics = {{"seeds", seeds}, {"max_z", worst_z}};
    report.checks.push_back(std::move(c));
  }
  return report;
}

// --- empowerment -------------------------------------------------------------------

SuiteReport RunEmpowermentSuite(const VerifyOptions& options) {
  SuiteReport report{"empowerment", {}};
  {
    const double eps = 0.1;
    const Channel bsc({Pmf({1 - eps, eps}), Pmf({eps, 1 - eps})});
    const double closed =
        1.0 + eps * std::log2(eps) + (1 - eps) * std::log2(1 - eps);
    const CapacityResult r = ChannelCapacity(bsc);
    CheckResult c{"bsc_capacity", true, "", {}};
    c.metrics = {{"capacity", r.capacity}, {"closed_form", closed}};
    if (std::abs(r.capacity - 0.5310) > 1e-4 ||
        std::abs(r.capacity - closed) > 1e-9) {
      c = Fail(c, "capacity " + Fmt(r.capacity) + " closed form " + Fmt(closed));
    }
    report.checks.push_back(std::move(c));
  }
  CheckResult c{"empowerment_dominates_pointwise_mi", true, "", {}};
  int states = 0;
  int violations = 0;
  double worst_gap = 0.0;
  std::string first;
  for (const std::string& id : {std::string("keylock"), std::string("tag")}) {
    TrainedModel model = QuickModel(Spec(id), options);
    const EnvModel& env = *model.env;
    const TabularPolicy& policy = model.result.policy;
    const int quota = (options.empowerment_states + 1) / 2;
    int env_states = 0;
    for (std::uint64_t episode = 0; env_states < quota; ++episode) {
      RecordOptions ro;
      ro.episode = episode;
      std::vector<Chain> chains;
      RecordEpisode(env, policy, options.seed, ro, &chains);
      for (const Chain& chain : chains) {
        for (int k = 1; k < static_cast<int>(chain.size()) - 1; ++k) {
          const IntermediateState& prev = chain[k - 1];
          for (int j : prev.sigma.Successors(prev.acting_agent())) {
            const double e = InstrumentalEmpowerment(env, policy, j, prev).capacity;
            const double mi = PointwiseConditionalMi(
                policy.At(env, j, prev.base), policy.At(env, j, chain[k].base));
            ++states;
            ++env_states;
            if (e < mi - 1e-9) {
              ++violations;
              if (mi - e > worst_gap) worst_gap = mi - e;
              if (first.empty()) {
                first = id + " state " + ToString(prev.base) + " agent " +
                        std::to_string(j) + ": capacity " + Fmt(e) +
                        " < pointwise MI " + Fmt(mi);
              }
            }
          }
        }
      }
    }
  }
  c.metrics = {{"states", states}, {"violations", violations},
               {"max_gap", worst_gap}};
  if (violations > 0) c = Fail(c, first);
  report.checks.push_back(std::move(c));
  return report;
}

std::vector<SuiteReport> RunVerify(const std::string& suite,
                                   const VerifyOptions& options) {
  std::vector<std::string> chosen;
  if (suite == "all") {
    chosen = SuiteNames();
  } else if (std::find(SuiteNames().begin(), SuiteNames().end(), suite) !=
             SuiteNames().end()) {
    chosen = {suite};
  } else {
    throw ConfigError("unknown verify suite '" + suite + "'");
  }
  std::vector<SuiteReport> out;
  for (const std::string& name : chosen) {
    if (name == "axioms") out.push_back(RunAxiomsSuite(options));
    if (name == "propositions") out.push_back(RunPropositionsSuite(options));
    if (name == "decomposability") out.push_back(RunDecomposabilitySuite(options));
    if (name == "estimator") out.push_back(RunEstimatorSuite(options));
    if (name == "empowerment") out.push_back(RunEmpowermentSuite(options));
  }
  return out;
}

}  // namespace icv
