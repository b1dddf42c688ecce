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

#include "icv/policy.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "icv/errors.h"
#include "icv/rng.h"

namespace icv {
namespace {

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double ParseDouble(const std::string& s, int line) {
  if (s.empty()) throw ParseError(line, "empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ParseError(line, "bad number '" + s + "'");
  }
  return v;
}

std::int64_t ParseInt(const std::string& s, int line) {
  if (s.empty()) throw ParseError(line, "empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) {
    throw ParseError(line, "bad integer '" + s + "'");
  }
  return v;
}

std::uint64_t ParseU64(const std::string& s, int line, int base = 10) {
  if (s.empty() || s[0] == '-') throw ParseError(line, "bad unsigned '" + s + "'");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, base);
  if (end != s.c_str() + s.size()) {
    throw ParseError(line, "bad unsigned '" + s + "'");
  }
  return v;
}

double EntropyNats(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

void Softmax(const double* logits, int count, double* out) {
  double hi = logits[0];
  for (int a = 1; a < count; ++a) hi = std::max(hi, logits[a]);
  double sum = 0.0;
  for (int a = 0; a < count; ++a) {
    out[a] = std::exp(logits[a] - hi);
    sum += out[a];
  }
  for (int a = 0; a < count; ++a) out[a] /= sum;
}

std::uint64_t KeySpace(const EnvModel& env) {
  int radix = 1;
  for (int i = 0; i < env.agent_count(); ++i) {
    radix = std::max(radix, env.key_local_state_count(i));
  }
  std::uint64_t size = 1;
  for (int i = 0; i < env.agent_count(); ++i) size *= radix;
  for (int c = 0; c < env.shared_count(); ++c) {
    size *= env.key_shared_state_count(c);
  }
  return size;
}

const GlobalState& SampleTransition(const std::vector<Transition>& outcomes,
                                    Rng& rng) {
  if (outcomes.size() == 1) return outcomes.front().state;
  std::vector<double> probs;
  probs.reserve(outcomes.size());
  for (const Transition& t : outcomes) probs.push_back(t.probability);
  return outcomes[rng.Categorical(probs)].state;
}

}  // namespace

std::uint64_t Fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- TabularPolicy -----------------------------------------------------------------

TabularPolicy::TabularPolicy(std::vector<int> action_counts,
                             PolicyDefault default_rule)
    : action_counts_(std::move(action_counts)),
      default_rule_(default_rule),
      probs_(action_counts_.size()),
      index_(action_counts_.size()) {
  for (int c : action_counts_) {
    if (c < 1) throw ValidationError("every agent needs at least one action");
  }
}

void TabularPolicy::CheckAgent(int agent) const {
  if (agent < 0 || agent >= agent_count()) {
    throw ValidationError("policy has no agent " + std::to_string(agent));
  }
}

void TabularPolicy::Set(int agent, StateKey key, std::vector<double> probs) {
  CheckAgent(agent);
  if (static_cast<int>(probs.size()) != action_counts_[agent]) {
    throw ValidationError("policy row has " + std::to_string(probs.size()) +
                          " entries, agent " + std::to_string(agent) +
                          " has " + std::to_string(action_counts_[agent]) +
                          " actions");
  }
  Pmf checked(probs);  // validates
  auto [it, inserted] = index_[agent].emplace(key, probs_[agent].size());
  if (inserted) {
    probs_[agent].insert(probs_[agent].end(), probs.begin(), probs.end());
  } else {
    std::copy(probs.begin(), probs.end(), probs_[agent].begin() + it->second);
  }
}

bool TabularPolicy::Contains(int agent, StateKey key) const {
  CheckAgent(agent);
  return index_[agent].contains(key);
}

Pmf TabularPolicy::Distribution(int agent, StateKey key) const {
  CheckAgent(agent);
  const int count = action_counts_[agent];
  auto it = index_[agent].find(key);
  if (it != index_[agent].end()) {
    const double* row = probs_[agent].data() + it->second;
    return Pmf(std::vector<double>(row, row + count));
  }
  if (default_rule_ == PolicyDefault::kUniform) {
    default_hits_.Increment();
    return Pmf::Uniform(count);
  }
  if (mode_ == LookupMode::kLenient) {
    misses_.Increment();
    return Pmf::Uniform(count);
  }
  throw LookupError("no policy entry for agent " + std::to_string(agent) +
                    " at observation key " + std::to_string(key));
}

Pmf TabularPolicy::At(const EnvModel& env, int agent,
                      const GlobalState& s) const {
  return Distribution(agent, ObservationKey(env, s, agent));
}

Pmf TabularPolicy::AtView(const EnvModel& env, int agent, const GlobalState& s,
                          int view) const {
  return Distribution(agent, ObservationKey(env, s, view));
}

std::vector<StateKey> TabularPolicy::SortedKeys(int agent) const {
  CheckAgent(agent);
  std::vector<StateKey> keys;
  keys.reserve(index_[agent].size());
  for (const auto& [k, off] : index_[agent]) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

// --- ValueTable ----------------------------------------------------------------------

ValueTable::ValueTable(int agent_count, ValueDefault default_rule, bool shared)
    : agents_(agent_count),
      shared_(shared),
      default_rule_(default_rule),
      tables_(shared ? 1 : agent_count) {
  if (agent_count < 1) throw ValidationError("value table needs agents");
}

int ValueTable::Slot(int agent) const {
  if (agent < 0 || agent >= agents_) {
    throw ValidationError("value table has no agent " + std::to_string(agent));
  }
  return shared_ ? 0 : agent;
}

void ValueTable::Set(int agent, StateKey key, double value) {
  if (!std::isfinite(value)) {
    throw ValidationError("value for agent " + std::to_string(agent) +
                          " is not finite");
  }
  tables_[Slot(agent)][key] = value;
}

void ValueTable::SetUnchecked(int agent, StateKey key, double value) {
  tables_[Slot(agent)][key] = value;
}

bool ValueTable::Contains(int agent, StateKey key) const {
  return tables_[Slot(agent)].contains(key);
}

double ValueTable::Get(int agent, StateKey key) const {
  const auto& table = tables_[Slot(agent)];
  auto it = table.find(key);
  if (it != table.end()) return it->second;
  if (default_rule_ == ValueDefault::kZero) return 0.0;
  if (mode_ == LookupMode::kLenient) {
    misses_.Increment();
    return 0.0;
  }
  throw LookupError("no value for agent " + std::to_string(agent) +
                    " at state key " + std::to_string(key));
}

std::size_t ValueTable::entry_count(int agent) const {
  return tables_[Slot(agent)].size();
}

std::vector<std::pair<StateKey, double>> ValueTable::SortedEntries(
    int agent) const {
  const auto& table = tables_[Slot(agent)];
  std::vector<std::pair<StateKey, double>> out(table.begin(), table.end());
  std::sort(out.begin(), out.end());
  return out;
}

double EvaluateValue(const ValueTable& vt, const EnvModel& env, int agent,
                     const GlobalState& s) {
  return vt.Get(agent, ValueKey(env, s));
}

double EvaluateValue(const ValueTable& vt, const EnvModel& env, int agent,
                     const IntermediateState& s) {
  return EvaluateValue(vt, env, agent, s.base);
}

// --- Scripted policies -------------------------------------------------------------------

TabularPolicy ScriptedPolicy(std::vector<int> action_counts,
                             const std::vector<ScriptedRow>& rows) {
  TabularPolicy policy(std::move(action_counts));
  for (const ScriptedRow& row : rows) policy.Set(row.agent, row.key, row.probs);
  return policy;
}

TabularPolicy ScriptedPolicy(const EnvModel& env, const ScriptRule& rule) {
  std::vector<int> counts;
  for (int i = 0; i < env.agent_count(); ++i) {
    counts.push_back(env.action_count(i));
  }
  TabularPolicy policy(counts);
  for (const GlobalState& s : env.EnumerateKeyStates()) {
    for (int i = 0; i < env.agent_count(); ++i) {
      const StateKey key = ObservationKey(env, s, i);
      if (policy.Contains(i, key)) continue;
      if (auto row = rule(i, Individualize(env.KeyProjection(s), i))) {
        policy.Set(i, key, std::move(*row));
      }
    }
  }
  return policy;
}

// --- Training ------------------------------------------------------------------------------

std::uint64_t TrainingConfig::Hash() const {
  std::string canon = "actor=" + FormatDouble(actor_step) +
                      ";critic=" + FormatDouble(critic_step) +
                      ";entropy=" + FormatDouble(entropy_coef) +
                      ";discount=" +
                      (discount ? FormatDouble(*discount) : std::string("env")) +
                      ";episodes=" + std::to_string(episodes) +
                      ";horizon=" + std::to_string(horizon) +
                      ";seed=" + std::to_string(seed) +
                      ";shared=" + std::to_string(shared_critic) +
                      ";explore=" + FormatDouble(exploring_starts) +
                      ";threshold=" + FormatDouble(divergence_threshold);
  return Fnv1a(canon);
}

TrainingResult TrainActorCritic(const EnvModel& env,
                                const TrainingConfig& config) {
  if (config.episodes < 1) throw ConfigError("episodes must be positive");
  if (config.actor_step <= 0.0 || config.critic_step <= 0.0 ||
      config.critic_step > 1.0) {
    throw ConfigError("step sizes must be in (0, 1]");
  }
  if (config.entropy_coef < 0.0) throw ConfigError("entropy_coef must be >= 0");
  if (config.exploring_starts < 0.0 || config.exploring_starts > 1.0) {
    throw ConfigError("exploring_starts must be in [0, 1]");
  }
  if (config.shared_critic && env.game_type() != GameType::kCooperative) {
    throw ConfigError("a shared critic requires a cooperative environment");
  }
  const int n = env.agent_count();
  const double gamma = config.discount.value_or(env.discount());
  const int horizon = config.horizon > 0 ? config.horizon : env.horizon();
  const std::uint64_t space = KeySpace(env);
  if (space > (std::uint64_t{1} << 26)) {
    throw UnsupportedError("key space too large for dense tabular training");
  }

  std::vector<int> counts(n);
  std::vector<std::vector<double>> logits(n);
  std::vector<std::vector<std::uint32_t>> visits(n);
  for (int i = 0; i < n; ++i) {
    counts[i] = env.action_count(i);
    logits[i].assign(space * counts[i], 0.0);
    visits[i].assign(space, 0);
  }
  const int critics = config.shared_critic ? 1 : n;
  std::vector<std::vector<double>> values(critics,
                                          std::vector<double>(space, 0.0));
  std::vector<std::uint8_t> value_seen(space, 0);

  TrainingResult result;
  result.config_hash = config.Hash();
  const int window = std::max(1, config.curve_interval);
  double window_return = 0.0;
  double window_length = 0.0;
  int window_count = 0;

  std::vector<StateKey> obs(n);
  std::vector<std::vector<double>> pi(n);
  for (int i = 0; i < n; ++i) pi[i].resize(counts[i]);
  ActionProfile joint;
  joint.actions.resize(n);

  for (int episode = 0; episode < config.episodes; ++episode) {
    Rng rng = Rng::ForStream(config.seed, episode, 0, StreamPurpose::kTraining);
    const bool explore = rng.Uniform() < config.exploring_starts;
    GlobalState s = explore ? SampleUniformState(env, rng)
                            : SampleTransition(env.InitialDistribution(), rng);
    double episode_return = 0.0;
    double discount_acc = 1.0;
    int length = 0;
    for (int t = 0; t < horizon && !env.IsTerminal(s); ++t) {
      for (int i = 0; i < n; ++i) {
        obs[i] = ObservationKey(env, s, i);
        Softmax(&logits[i][obs[i] * counts[i]], counts[i], pi[i].data());
        joint.actions[i] = rng.Categorical(pi[i]);
      }
      const GlobalState next = SampleTransition(env.JointKernel(s, joint), rng);
      const std::vector<double> rewards = env.Rewards(s, joint, next);
      const StateKey vk = ValueKey(env, s);
      const StateKey vk_next = ValueKey(env, next);
      const bool terminal = env.IsTerminal(next);
      value_seen[vk] = 1;
      value_seen[vk_next] = 1;

      std::vector<double> delta(critics);
      for (int c = 0; c < critics; ++c) {
        const double bootstrap = terminal ? 0.0 : values[c][vk_next];
        delta[c] = rewards[c] + gamma * bootstrap - values[c][vk];
      }
      for (int c = 0; c < critics; ++c) {
        double& v = values[c][vk];
        v += config.critic_step * delta[c];
        if (!std::isfinite(v) || std::abs(v) > config.divergence_threshold) {
          throw TrainingError(
              "critic diverged: agent " + std::to_string(c) + " episode " +
              std::to_string(episode) + " step " + std::to_string(t) +
              " state " + ToString(s) + " value " + FormatDouble(v));
        }
      }
      for (int i = 0; i < n; ++i) {
        const double d = delta[config.shared_critic ? 0 : i];
        double* row = &logits[i][obs[i] * counts[i]];
        const double h = EntropyNats(pi[i]);
        for (int b = 0; b < counts[i]; ++b) {
          const double grad_logp = (b == joint.actions[i] ? 1.0 : 0.0) - pi[i][b];
          const double grad_h =
              pi[i][b] > 0.0 ? -pi[i][b] * (std::log(pi[i][b]) + h) : 0.0;
          row[b] += config.actor_step *
                    (d * grad_logp + config.entropy_coef * grad_h);
        }
        if (visits[i][obs[i]] < UINT32_MAX) ++visits[i][obs[i]];
      }
      double mean_reward = 0.0;
      for (double r : rewards) mean_reward += r;
      episode_return += discount_acc * mean_reward / n;
      discount_acc *= gamma;
      ++length;
      s = next;
    }
    if (!explore) {
      window_return += episode_return;
      window_length += length;
      ++window_count;
    }
    if (window_count > 0 &&
        ((episode + 1) % window == 0 || episode + 1 == config.episodes)) {
      result.curve.push_back({episode + 1, window_return / window_count,
                              window_length / window_count});
      window_return = window_length = 0.0;
      window_count = 0;
    }
  }
  if (result.curve.empty()) {
    throw ConfigError("no episode started from the initial distribution");
  }
  result.final_average_return = result.curve.back().mean_return;

  result.policy = TabularPolicy(counts);
  double entropy_sum = 0.0;
  double entropy_min = std::numeric_limits<double>::infinity();
  std::int64_t visited = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(counts[i]);
    for (std::uint64_t k = 0; k < space; ++k) {
      if (visits[i][k] == 0) continue;
      Softmax(&logits[i][k * counts[i]], counts[i], row.data());
      result.policy.Set(i, k, row);
      const double h = Entropy(Pmf(row));
      entropy_sum += h;
      entropy_min = std::min(entropy_min, h);
      ++visited;
    }
  }
  result.visited_observations = visited;
  result.min_state_entropy = visited ? entropy_min : 0.0;
  result.mean_state_entropy = visited ? entropy_sum / visited : 0.0;

  result.values = ValueTable(n, ValueDefault::kZero, config.shared_critic);
  for (std::uint64_t k = 0; k < space; ++k) {
    if (!value_seen[k]) continue;
    for (int c = 0; c < critics; ++c) result.values.Set(c, k, values[c][k]);
  }
  return result;
}

EvaluationResult EvaluatePolicy(const EnvModel& env,
                                const TabularPolicy& policy, int episodes,
                                std::uint64_t seed, int horizon) {
  if (episodes < 1) throw ValidationError("episodes must be positive");
  const int n = env.agent_count();
  const int T = horizon > 0 ? horizon : env.horizon();
  const double gamma = env.discount();
  EvaluationResult out;
  out.mean_discounted_return.assign(n, 0.0);
  out.mean_return.assign(n, 0.0);
  ActionProfile joint;
  joint.actions.resize(n);
  for (int e = 0; e < episodes; ++e) {
    Rng rng = Rng::ForStream(seed, e, 0, StreamPurpose::kRollout);
    GlobalState s = SampleTransition(env.InitialDistribution(), rng);
    double disc = 1.0;
    bool success = false;
    int t = 0;
    for (; t < T && !env.IsTerminal(s); ++t) {
      for (int i = 0; i < n; ++i) {
        const Pmf p = policy.At(env, i, s);
        joint.actions[i] = rng.Categorical(p.probs());
      }
      const GlobalState next = SampleTransition(env.JointKernel(s, joint), rng);
      const std::vector<double> r = env.Rewards(s, joint, next);
      for (int i = 0; i < n; ++i) {
        out.mean_discounted_return[i] += disc * r[i];
        out.mean_return[i] += r[i];
      }
      success = success || r[0] > 0.0;
      disc *= gamma;
      s = next;
    }
    out.success_rate += success ? 1.0 : 0.0;
    out.terminal_rate += env.IsTerminal(s) ? 1.0 : 0.0;
    out.mean_length += t;
  }
  for (int i = 0; i < n; ++i) {
    out.mean_discounted_return[i] /= episodes;
    out.mean_return[i] /= episodes;
  }
  out.success_rate /= episodes;
  out.terminal_rate /= episodes;
  out.mean_length /= episodes;
  return out;
}

// --- Checkpoints --------------------------------------------------------------------------

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  const TabularPolicy& policy = ckpt.policy;
  const ValueTable& values = ckpt.values;
  if (policy.action_counts() != ckpt.action_counts ||
      values.agent_count() != policy.agent_count()) {
    throw ValidationError("checkpoint tables do not match the header");
  }
  std::string out = "ICVCKPT\t" + std::to_string(Checkpoint::kVersion) + "\n";
  out += "env\t" + ckpt.env + "\n";
  out += "agents\t" + std::to_string(policy.agent_count()) + "\n";
  out += "actions\t";
  for (std::size_t i = 0; i < ckpt.action_counts.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(ckpt.action_counts[i]);
  }
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, ckpt.config_hash);
  out += "\nconfig_hash\t" + std::string(hash) + "\n";
  out += std::string("policy_default\t") +
         (policy.default_rule() == PolicyDefault::kUniform ? "uniform" : "none") +
         "\n";
  out += std::string("value_default\t") +
         (values.default_rule() == ValueDefault::kZero ? "zero" : "none") + "\n";
  out += "shared_critic\t" + std::to_string(values.shared() ? 1 : 0) + "\n";
  for (int i = 0; i < policy.agent_count(); ++i) {
    for (StateKey key : policy.SortedKeys(i)) {
      const Pmf p = policy.Distribution(i, key);
      out += "policy\t" + std::to_string(i) + "\t" + std::to_string(key) + "\t";
      for (int a = 0; a < p.outcome_count(); ++a) {
        if (a) out += ",";
        out += FormatDouble(p[a]);
      }
      out += "\n";
    }
  }
  const int slots = values.shared() ? 1 : values.agent_count();
  for (int i = 0; i < slots; ++i) {
    for (const auto& [key, v] : values.SortedEntries(i)) {
      out += "value\t" + std::to_string(i) + "\t" + std::to_string(key) + "\t" +
             FormatDouble(v) + "\n";
    }
  }
  out += "end\n";
  return out;
}

Checkpoint ParseCheckpoint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_field = [&](const char* name) -> std::string {
    if (!std::getline(in, line)) {
      throw ParseError(line_no + 1, std::string("missing ") + name);
    }
    ++line_no;
    const auto parts = Split(line, '\t');
    if (parts.size() != 2 || parts[0] != name) {
      throw ParseError(line_no, std::string("expected ") + name);
    }
    return parts[1];
  };
  if (!std::getline(in, line)) throw ParseError(1, "empty checkpoint");
  ++line_no;
  {
    const auto parts = Split(line, '\t');
    if (parts.size() != 2 || parts[0] != "ICVCKPT") {
      throw ParseError(1, "not a checkpoint file");
    }
    if (parts[1] != std::to_string(Checkpoint::kVersion)) {
      throw VersionError("checkpoint version " + parts[1] +
                         " is not supported (expected " +
                         std::to_string(Checkpoint::kVersion) + ")");
    }
  }
  Checkpoint ckpt;
  ckpt.env = next_field("env");
  const std::int64_t n = ParseInt(next_field("agents"), line_no);
  for (const std::string& c : Split(next_field("actions"), ',')) {
    ckpt.action_counts.push_back(static_cast<int>(ParseInt(c, line_no)));
  }
  if (n < 1 || static_cast<std::int64_t>(ckpt.action_counts.size()) != n) {
    throw ParseError(line_no, "action list does not match agent count");
  }
  ckpt.config_hash = ParseU64(next_field("config_hash"), line_no + 1, 16);
  const std::string pdef = next_field("policy_default");
  if (pdef != "uniform" && pdef != "none") {
    throw ParseError(line_no, "bad policy_default");
  }
  const std::string vdef = next_field("value_default");
  if (vdef != "zero" && vdef != "none") {
    throw ParseError(line_no, "bad value_default");
  }
  const std::string shared = next_field("shared_critic");
  if (shared != "0" && shared != "1") throw ParseError(line_no, "bad flag");
  ckpt.policy = TabularPolicy(ckpt.action_counts, pdef == "uniform"
                                                      ? PolicyDefault::kUniform
                                                      : PolicyDefault::kNone);
  ckpt.values = ValueTable(static_cast<int>(n),
                           vdef == "zero" ? ValueDefault::kZero
                                          : ValueDefault::kNone,
                           shared == "1");
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line == "end") {
      ended = true;
      break;
    }
    const auto parts = Split(line, '\t');
    if (parts.size() != 4) throw ParseError(line_no, "malformed record");
    const std::int64_t agent = ParseInt(parts[1], line_no);
    if (agent < 0 || agent >= n) throw ParseError(line_no, "agent out of range");
    const StateKey key = ParseU64(parts[2], line_no);
    try {
      if (parts[0] == "policy") {
        std::vector<double> row;
        for (const std::string& p : Split(parts[3], ',')) {
          row.push_back(ParseDouble(p, line_no));
        }
        ckpt.policy.Set(static_cast<int>(agent), key, std::move(row));
      } else if (parts[0] == "value") {
        ckpt.values.Set(static_cast<int>(agent), key,
                        ParseDouble(parts[3], line_no));
      } else {
        throw ParseError(line_no, "unknown record '" + parts[0] + "'");
      }
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!ended) throw ParseError(line_no, "checkpoint truncated (no end marker)");
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out << SerializeCheckpoint(ckpt);
  if (!out) throw IoError("failed writing checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseCheckpoint(buf.str());
}

}  // namespace icv
