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

#include "commands.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "icv/attribution.h"
#include "icv/envs.h"
#include "icv/errors.h"
#include "icv/policy.h"
#include "icv/trace.h"
#include "icv/verify.h"

namespace icv {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char kCheckpointName[] = "checkpoint.ckpt";

json Defaults() {
  return {
      {"seed", nullptr},
      {"out", "icv_out"},
      {"checkpoint", ""},
      {"traces", ""},
      {"lookup", "lenient"},
      {"env",
       {{"id", "keylock"},
        {"layout", "keylock_2p"},
        {"allow_stay", true},
        {"grid_size", 0},
        {"agents", 0},
        {"apples", 0},
        {"predators", 0},
        {"prey", 0},
        {"horizon", 0},
        {"discount", 0.95},
        {"proximity_shaping", true}}},
      {"training",
       {{"actor_step", nullptr},
        {"critic_step", 0.1},
        {"entropy_coef", 0.02},
        {"episodes", 50000},
        {"seed", 0},
        {"shared_critic", false},
        {"exploring_starts", 0.5},
        {"divergence_threshold", 1e6},
        {"curve_interval", 500}}},
      {"rollout", {{"episodes", 10}, {"sequential", true}}},
      {"attribution",
       {{"kinds", {"value", "peak"}},
        {"agents", json::array()},
        {"coalition_filter", "all"},
        {"scale", "natural"},
        {"estimator", "exact"},
        {"stride", 1},
        {"episodes", 10},
        {"export_records", false}}},
      {"verify",
       {{"suite", "all"},
        {"training_episodes", 20000},
        {"estimator_seeds", 200},
        {"min_substeps", 10000},
        {"empowerment_states", 1000},
        {"corrupt_values", false}}},
  };
}

bool SameShape(const json& def, const json& user) {
  if (def.is_null()) return user.is_null() || user.is_number();
  if (def.is_boolean()) return user.is_boolean();
  if (def.is_number_integer()) return user.is_number_integer();
  if (def.is_number()) return user.is_number();
  if (def.is_string()) return user.is_string();
  if (def.is_array()) return user.is_array();
  return false;
}

void Merge(json& target, const json& user, const std::string& path) {
  if (!user.is_object()) {
    throw ConfigError("configuration '" + (path.empty() ? "<root>" : path) +
                      "' must be an object");
  }
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!target.contains(it.key())) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
    json& slot = target[it.key()];
    if (slot.is_object()) {
      Merge(slot, it.value(), key);
    } else if (!SameShape(slot, it.value())) {
      throw ConfigError("configuration key '" + key + "' has the wrong type");
    } else {
      slot = it.value();
    }
  }
}

EnvSpec EnvSpecFromConfigImpl(const json& c) {
  const json& e = c.at("env");
  EnvSpec spec;
  spec.id = e.at("id").get<std::string>();
  spec.layout = e.at("layout").get<std::string>();
  spec.allow_stay = e.at("allow_stay").get<bool>();
  spec.grid_size = e.at("grid_size").get<int>();
  spec.agents = e.at("agents").get<int>();
  spec.apples = e.at("apples").get<int>();
  spec.predators = e.at("predators").get<int>();
  spec.prey = e.at("prey").get<int>();
  spec.horizon = e.at("horizon").get<int>();
  spec.discount = e.at("discount").get<double>();
  spec.proximity_shaping = e.at("proximity_shaping").get<bool>();
  if (!(spec.discount >= 0.0 && spec.discount < 1.0)) {
    throw ConfigError("env.discount must be in [0, 1)");
  }
  return spec;
}

std::optional<std::uint64_t> SeedFrom(const json& c) {
  const json& s = c.at("seed");
  if (s.is_null()) return std::nullopt;
  if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
    throw ConfigError("seed must be a non-negative integer");
  }
  return s.get<std::uint64_t>();
}

std::uint64_t RequireSeed(const json& c, const char* command) {
  const auto seed = SeedFrom(c);
  if (!seed) {
    throw ConfigError(std::string(command) +
                      " needs an explicit seed (--seed or \"seed\")");
  }
  return *seed;
}

std::string Timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void WriteJson(const fs::path& path, json doc) {
  doc["timestamp"] = Timestamp();
  WriteFile(path, doc.dump(2) + "\n");
}

// Single instance per output directory.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    path_ = dir / ".icv.lock";
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw IoError("output directory " + dir.string() +
                    " is locked by another icv process (remove " +
                    path_.string() + " if stale)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
};

fs::path CheckpointPath(const json& c) {
  const std::string explicit_path = c.at("checkpoint").get<std::string>();
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(c.at("out").get<std::string>()) / kCheckpointName;
}

Checkpoint LoadModel(const json& c, const EnvSpec& spec) {
  const fs::path path = CheckpointPath(c);
  if (!fs::exists(path)) {
    throw IoError("checkpoint not found: " + path.string() +
                  " (run train first or pass --checkpoint)");
  }
  Checkpoint ckpt = LoadCheckpoint(path.string());
  if (ckpt.env != DescribeEnvSpec(spec)) {
    throw ConfigError("checkpoint " + path.string() + " was trained on '" +
                      ckpt.env + "', the configuration describes '" +
                      DescribeEnvSpec(spec) + "'");
  }
  const LookupMode mode = c.at("lookup").get<std::string>() == "strict"
                              ? LookupMode::kStrict
                              : LookupMode::kLenient;
  ckpt.policy.set_mode(mode);
  ckpt.values.set_mode(mode);
  return ckpt;
}

TrainingConfig TrainingFrom(const json& c, const std::string& env_id) {
  const json& t = c.at("training");
  TrainingConfig config = RecommendedTrainingConfig(env_id);
  if (!t.at("actor_step").is_null()) {
    config.actor_step = t.at("actor_step").get<double>();
  }
  config.critic_step = t.at("critic_step").get<double>();
  config.entropy_coef = t.at("entropy_coef").get<double>();
  config.episodes = t.at("episodes").get<int>();
  config.seed = t.at("seed").get<std::uint64_t>();
  if (const auto seed = SeedFrom(c)) config.seed = *seed;
  config.shared_critic = t.at("shared_critic").get<bool>();
  config.exploring_starts = t.at("exploring_starts").get<double>();
  config.divergence_threshold = t.at("divergence_threshold").get<double>();
  config.curve_interval = t.at("curve_interval").get<int>();
  return config;
}

json ReportJsonImpl(const AttributionReport& r) {
  json entries = json::array();
  for (const ReportEntry& e : r.entries) {
    json history = json::array();
    for (const auto& [t, v] : e.history) history.push_back({t, v});
    entries.push_back({{"agent", e.agent},
                       {"kind", KindName(e.kind)},
                       {"phi_raw", e.phi_raw},
                       {"phi_normalized", e.phi_normalized},
                       {"history", std::move(history)}});
  }
  return {{"entries", std::move(entries)},
          {"kappa", r.kappa},
          {"normalization_skipped", r.normalization_skipped},
          {"kappa_from_magnitude", r.kappa_from_magnitude},
          {"M", r.episodes},
          {"T", r.horizon},
          {"estimator", EstimatorName(r.estimator)},
          {"seed", r.seed},
          {"coalition_filter", FilterName(r.filter)},
          {"scale", r.scale == Scale::kUnit ? "unit" : "natural"},
          {"stride", r.stride},
          {"lenient_misses", r.lenient_misses}};
}

std::vector<fs::path> TraceFiles(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    if (fs::exists(dir)) return {dir};
    throw IoError("trace path not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".trace") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .trace files in " + dir.string());
  return files;
}

}  // namespace

EnvSpec EnvSpecFromConfig(const json& config) {
  return EnvSpecFromConfigImpl(config);
}

json AttributionReportJson(const AttributionReport& report) {
  return ReportJsonImpl(report);
}

AttributionSettings AttributionSettingsFromConfig(const json& c,
                                                 std::uint64_t seed) {
  const json& a = c.at("attribution");
  AttributionSettings settings;
  settings.kinds.clear();
  for (const json& k : a.at("kinds")) {
    if (!k.is_string()) throw ConfigError("attribution.kinds holds strings");
    settings.kinds.push_back(ParseKind(k.get<std::string>()));
  }
  for (const json& i : a.at("agents")) {
    if (!i.is_number_integer()) throw ConfigError("attribution.agents holds integers");
    settings.agents.push_back(i.get<int>());
  }
  settings.filter = ParseFilter(a.at("coalition_filter").get<std::string>());
  const std::string scale = a.at("scale").get<std::string>();
  if (scale != "natural" && scale != "unit") {
    throw ConfigError("attribution.scale must be natural or unit");
  }
  settings.scale = scale == "unit" ? Scale::kUnit : Scale::kNatural;
  settings.estimator = ParseEstimator(a.at("estimator").get<std::string>());
  settings.stride = a.at("stride").get<int>();
  settings.seed = seed;
  settings.keep_records = a.at("export_records").get<bool>();
  return settings;
}

json ResolveConfig(const std::string& command, const json& config) {
  static const std::vector<std::string> commands = {"train", "rollout",
                                                    "attribute", "verify"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  json resolved = Defaults();
  if (!config.is_null()) Merge(resolved, config, "");
  const std::string lookup = resolved.at("lookup").get<std::string>();
  if (lookup != "strict" && lookup != "lenient") {
    throw ConfigError("lookup must be strict or lenient");
  }
  return resolved;
}

json CmdTrain(const json& raw) {
  const json c = ResolveConfig("train", raw);
  const EnvSpec spec = EnvSpecFromConfig(c);
  const auto env = MakeEnv(spec);
  const TrainingConfig config = TrainingFrom(c, spec.id);
  const fs::path out = c.at("out").get<std::string>();
  OutputLock lock(out);

  const TrainingResult result = TrainActorCritic(*env, config);
  Checkpoint ckpt;
  ckpt.env = DescribeEnvSpec(spec);
  for (int i = 0; i < env->agent_count(); ++i) {
    ckpt.action_counts.push_back(env->action_count(i));
  }
  ckpt.config_hash = config.Hash();
  ckpt.policy = result.policy;
  ckpt.values = result.values;
  const std::string text = SerializeCheckpoint(ckpt);
  const fs::path ckpt_path = CheckpointPath(c);
  if (ckpt_path.has_parent_path()) fs::create_directories(ckpt_path.parent_path());
  WriteFile(ckpt_path, text);

  std::string curve = "episode,mean_return,mean_length\n";
  for (const CurvePoint& p : result.curve) {
    curve += std::to_string(p.episode) + "," + Num(p.mean_return) + "," +
             Num(p.mean_length) + "\n";
  }
  WriteFile(out / "training_curve.csv", curve);

  json summary = {{"command", "train"},
                  {"env", DescribeEnvSpec(spec)},
                  {"checkpoint", c.at("checkpoint").get<std::string>().empty()
                                     ? std::string(kCheckpointName)
                                     : ckpt_path.string()},
                  {"checkpoint_hash", Hex(Fnv1a(text))},
                  {"config_hash", Hex(config.Hash())},
                  {"episodes", config.episodes},
                  {"seed", config.seed},
                  {"final_average_return", result.final_average_return},
                  {"min_state_entropy", result.min_state_entropy},
                  {"mean_state_entropy", result.mean_state_entropy},
                  {"visited_observations", result.visited_observations},
                  {"curve", "training_curve.csv"}};
  WriteJson(out / "train.json", summary);
  return summary;
}

json CmdRollout(const json& raw) {
  const json c = ResolveConfig("rollout", raw);
  const std::uint64_t seed = RequireSeed(c, "rollout");
  const EnvSpec spec = EnvSpecFromConfig(c);
  const auto env = MakeEnv(spec);
  const int episodes = c.at("rollout").at("episodes").get<int>();
  if (episodes < 1) throw ConfigError("rollout.episodes must be positive");
  const fs::path out = c.at("out").get<std::string>();
  OutputLock lock(out);
  const Checkpoint ckpt = LoadModel(c, spec);

  const fs::path dir = out / "traces";
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".trace") fs::remove(entry.path());
  }
  RecordOptions options;
  options.sequential = c.at("rollout").at("sequential").get<bool>();
  json files = json::array();
  double total_length = 0.0;
  double total_return = 0.0;
  int truncated = 0;
  for (int m = 0; m < episodes; ++m) {
    options.episode = static_cast<std::uint64_t>(m);
    const EpisodeTrace trace = RecordEpisode(*env, ckpt.policy, seed, options);
    char name[32];
    std::snprintf(name, sizeof(name), "episode_%05d.trace", m);
    SaveTrace((dir / name).string(), trace);
    files.push_back(name);
    total_length += trace.length();
    truncated += trace.truncation_reason ? 1 : 0;
    for (const StepRecord& rec : trace.steps) {
      if (rec.rewards) total_return += (*rec.rewards)[0];
    }
  }
  json summary = {{"command", "rollout"},
                  {"env", DescribeEnvSpec(spec)},
                  {"episodes", episodes},
                  {"seed", seed},
                  {"trace_dir", "traces"},
                  {"files", files},
                  {"mean_length", total_length / episodes},
                  {"mean_return_agent0", total_return / episodes},
                  {"truncated", truncated}};
  WriteJson(out / "rollout.json", summary);
  return summary;
}

json CmdAttribute(const json& raw) {
  const json c = ResolveConfig("attribute", raw);
  const std::uint64_t seed = RequireSeed(c, "attribute");
  const EnvSpec spec = EnvSpecFromConfig(c);
  const auto env = MakeEnv(spec);
  const AttributionSettings settings = AttributionSettingsFromConfig(c, seed);
  const int episodes = c.at("attribution").at("episodes").get<int>();

  const fs::path out = c.at("out").get<std::string>();
  OutputLock lock(out);
  const Checkpoint ckpt = LoadModel(c, spec);
  const Tables tables{&ckpt.policy, &ckpt.values};

  std::vector<EpisodeTrace> traces;
  const std::string trace_path = c.at("traces").get<std::string>();
  if (!trace_path.empty()) {
    for (const fs::path& f : TraceFiles(trace_path)) {
      traces.push_back(LoadTrace(f.string()));
      try {
        ValidateTrace(*env, traces.back());
      } catch (const ValidationError& e) {
        throw ValidationError(f.string() + ": " + e.what());
      }
    }
  } else {
    if (episodes < 1) throw ConfigError("attribution.episodes must be positive");
    for (int m = 0; m < episodes; ++m) {
      RecordOptions options;
      options.episode = static_cast<std::uint64_t>(m);
      traces.push_back(RecordEpisode(*env, ckpt.policy, seed, options));
    }
  }
  const AttributionReport report = Attribute(*env, tables, traces, settings);


  std::string csv = "agent,kind,phi_raw,phi_normalized,kappa,M,T,estimator,seed\n";
  std::string history = "agent,kind,t,value\n";
  for (const ReportEntry& e : report.entries) {
    csv += std::to_string(e.agent) + "," + KindName(e.kind) + "," +
           Num(e.phi_raw) + "," + Num(e.phi_normalized) + "," +
           Num(report.kappa) + "," + std::to_string(report.episodes) + "," +
           std::to_string(report.horizon) + "," +
           EstimatorName(report.estimator) + "," + std::to_string(seed) + "\n";
    for (const auto& [t, v] : e.history) {
      history += std::to_string(e.agent) + "," + KindName(e.kind) + "," +
                 std::to_string(t) + "," + Num(v) + "\n";
    }
  }
  WriteFile(out / "attribution.csv", csv);
  WriteFile(out / "history.csv", history);
  if (settings.keep_records) {
    std::string lines;
    for (const MarginalRecord& r : report.records) {
      lines += json{{"episode", r.episode},
                    {"t", r.t},
                    {"substep", r.substep},
                    {"agent", r.agent},
                    {"sigma", r.sigma.order()},
                    {"coalition", r.coalition},
                    {"kind", KindName(r.kind)},
                    {"delta", r.delta}}
                   .dump() +
               "\n";
    }
    WriteFile(out / "marginals.jsonl", lines);
  }
  json summary = AttributionReportJson(report);
  summary["command"] = "attribute";
  summary["env"] = DescribeEnvSpec(spec);
  summary["csv"] = "attribution.csv";
  WriteJson(out / "attribution.json", summary);
  return summary;
}

json CmdVerify(const json& raw) {
  const json c = ResolveConfig("verify", raw);
  const json& v = c.at("verify");
  VerifyOptions options;
  options.seed = SeedFrom(c).value_or(0);
  options.training_episodes = v.at("training_episodes").get<int>();
  options.estimator_seeds = v.at("estimator_seeds").get<int>();
  options.min_substeps = v.at("min_substeps").get<int>();
  options.empowerment_states = v.at("empowerment_states").get<int>();
  options.corrupt_values = v.at("corrupt_values").get<bool>();
  if (options.estimator_seeds < 2 || options.training_episodes < 1) {
    throw ConfigError("verify needs >= 2 estimator seeds and >= 1 episode");
  }
  const fs::path out = c.at("out").get<std::string>();
  OutputLock lock(out);
  const std::vector<SuiteReport> reports =
      RunVerify(v.at("suite").get<std::string>(), options);
  json suites = json::array();
  bool all_passed = true;
  for (const SuiteReport& r : reports) {
    json checks = json::array();
    for (const CheckResult& check : r.checks) {
      json metrics = json::object();
      for (const auto& [k, value] : check.metrics) metrics[k] = value;
      checks.push_back({{"name", check.name},
                        {"passed", check.passed},
                        {"detail", check.detail},
                        {"metrics", metrics}});
    }
    all_passed = all_passed && r.passed();
    suites.push_back(
        {{"suite", r.suite}, {"passed", r.passed()}, {"checks", checks}});
  }
  json summary = {{"command", "verify"},
                  {"seed", options.seed},
                  {"passed", all_passed},
                  {"suites", suites}};
  WriteJson(out / "verify.json", summary);
  return summary;
}

}  // namespace icv
