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

#include "icv/trace.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "icv/errors.h"
#include "icv/rng.h"

namespace icv {
namespace {

constexpr char kMagic[] = "ICVTRACE";

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

long long ToInt(const std::string& s, int line) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParseError(line, "bad integer '" + s + "'");
  }
  return v;
}

std::vector<int> IntList(const std::string& s, int line) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const std::string& part : Split(s, ',')) {
    out.push_back(static_cast<int>(ToInt(part, line)));
  }
  return out;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const GlobalState& Sample(const std::vector<Transition>& outcomes, Rng& rng) {
  if (outcomes.size() == 1) return outcomes.front().state;
  std::vector<double> probs;
  for (const Transition& t : outcomes) probs.push_back(t.probability);
  return outcomes[rng.Categorical(probs)].state;
}

}  // namespace

EpisodeTrace RecordEpisode(const EnvModel& env, const TabularPolicy& policy,
                           std::uint64_t seed, const RecordOptions& options,
                           std::vector<Chain>* chains) {
  const int n = env.agent_count();
  const int horizon = options.horizon > 0 ? options.horizon : env.horizon();
  EpisodeTrace trace;
  trace.env_id = env.id();
  trace.agent_count = n;
  trace.shared_count = env.shared_count();
  trace.seed = seed;
  trace.horizon = horizon;

  Rng rng = Rng::ForStream(seed, options.episode, 0, StreamPurpose::kRollout);
  GlobalState s = Sample(env.InitialDistribution(), rng);
  for (int t = 0; t < horizon && !env.IsTerminal(s); ++t) {
    StepRecord rec;
    rec.t = t;
    rec.state = s;
    GlobalState next;
    try {
      ActionProfile a;
      for (int i = 0; i < n; ++i) {
        const Pmf p = policy.At(env, i, s);
        a.actions.push_back(rng.Categorical(p.probs()));
      }
      if (options.sequential) {
        Rng order_rng = Rng::ForStream(seed, options.episode, t,
                                       StreamPurpose::kOrder);
        Rng kernel_rng = Rng::ForStream(seed, options.episode, t,
                                        StreamPurpose::kSampling);
        const Permutation sigma = SampleOrder(options.order, n, order_rng);
        Chain chain = BuildChain(env, s, a, sigma, &kernel_rng);
        std::vector<int> owners = chain.back().shared_owner;
        for (int c = 0; c < env.shared_count(); ++c) {
          if (env.SharedFlipsAtCompletion(c)) owners[c] = -1;
        }
        next = chain.back().base;
        rec.sigma = sigma;
        rec.shared_owner = std::move(owners);
        if (chains != nullptr) chains->push_back(std::move(chain));
      } else {
        next = Sample(env.JointKernel(s, a), rng);
      }
      rec.rewards = env.Rewards(s, a, next);
      rec.actions = std::move(a);
    } catch (const Error& e) {
      trace.truncation_reason = std::string("step ") + std::to_string(t) +
                                ": " + e.what();
      break;
    }
    trace.steps.push_back(std::move(rec));
    s = std::move(next);
  }
  StepRecord last;
  last.t = static_cast<int>(trace.steps.size());
  last.state = s;
  trace.steps.push_back(std::move(last));
  return trace;
}

std::string SerializeTrace(const EpisodeTrace& trace) {
  std::string out = std::string(kMagic) + "\t" +
                    std::to_string(EpisodeTrace::kVersion) + "\t" +
                    trace.env_id + "\t" + std::to_string(trace.agent_count) +
                    "\t" + std::to_string(trace.shared_count) + "\t" +
                    std::to_string(trace.seed) + "\t" +
                    std::to_string(trace.horizon) + "\n";
  for (const StepRecord& rec : trace.steps) {
    std::vector<int> state = rec.state.agents;
    state.insert(state.end(), rec.state.shared.begin(), rec.state.shared.end());
    out += std::to_string(rec.t) + "\t" + JoinInts(state) + "\t";
    out += rec.actions ? JoinInts(rec.actions->actions) : "-";
    out += "\t";
    if (rec.rewards) {
      for (std::size_t i = 0; i < rec.rewards->size(); ++i) {
        if (i) out += ",";
        out += FormatDouble((*rec.rewards)[i]);
      }
    } else {
      out += "-";
    }
    out += "\t";
    out += rec.sigma ? JoinInts(rec.sigma->order()) : "-";
    out += "\t";
    out += (rec.shared_owner && !rec.shared_owner->empty())
               ? JoinInts(*rec.shared_owner)
               : "-";
    out += "\n";
  }
  if (trace.truncation_reason) {
    std::string reason = *trace.truncation_reason;
    for (char& c : reason) {
      if (c == '\n' || c == '\t') c = ' ';
    }
    out += "#truncated\t" + reason + "\n";
  }
  return out;
}

EpisodeTrace ParseTrace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty trace");
  auto header = Split(line, '\t');
  if (header.empty() || header[0] != kMagic) {
    throw ParseError(1, "not a trace file");
  }
  if (header.size() >= 2 &&
      header[1] != std::to_string(EpisodeTrace::kVersion)) {
    throw VersionError("trace format version " + header[1] +
                       " is not supported (expected " +
                       std::to_string(EpisodeTrace::kVersion) + ")");
  }
  if (header.size() != 7) throw ParseError(1, "malformed header");
  EpisodeTrace trace;
  trace.env_id = header[2];
  trace.agent_count = static_cast<int>(ToInt(header[3], 1));
  trace.shared_count = static_cast<int>(ToInt(header[4], 1));
  {
    char* end = nullptr;
    trace.seed = std::strtoull(header[5].c_str(), &end, 10);
    if (header[5].empty() || header[5][0] == '-' ||
        end != header[5].c_str() + header[5].size()) {
      throw ParseError(1, "bad seed");
    }
  }
  trace.horizon = static_cast<int>(ToInt(header[6], 1));
  if (trace.agent_count < 1 || trace.shared_count < 0 || trace.horizon < 1) {
    throw ParseError(1, "header counts out of range");
  }
  const int n = trace.agent_count;
  bool final_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#truncated\t", 0) == 0) {
      if (trace.truncation_reason) throw ParseError(line_no, "repeated marker");
      trace.truncation_reason = line.substr(11);
      continue;
    }
    if (final_seen) throw ParseError(line_no, "record after the final state");
    if (trace.truncation_reason) {
      throw ParseError(line_no, "record after the truncation marker");
    }
    const auto f = Split(line, '\t');
    if (f.size() != 6) {
      throw ParseError(line_no, "expected 6 fields, found " +
                                    std::to_string(f.size()));
    }
    StepRecord rec;
    rec.t = static_cast<int>(ToInt(f[0], line_no));
    if (rec.t != static_cast<int>(trace.steps.size())) {
      throw ParseError(line_no, "step index " + f[0] + " is not contiguous");
    }
    const std::vector<int> state = IntList(f[1], line_no);
    if (static_cast<int>(state.size()) != n + trace.shared_count) {
      throw ParseError(line_no, "state has the wrong number of components");
    }
    rec.state.agents.assign(state.begin(), state.begin() + n);
    rec.state.shared.assign(state.begin() + n, state.end());
    if (f[2] == "-") {
      final_seen = true;
      if (f[3] != "-" || f[4] != "-" || f[5] != "-") {
        throw ParseError(line_no, "final record carries step fields");
      }
      trace.steps.push_back(std::move(rec));
      continue;
    }
    ActionProfile a{IntList(f[2], line_no)};
    if (static_cast<int>(a.actions.size()) != n) {
      throw ParseError(line_no, "action profile has the wrong length");
    }
    rec.actions = std::move(a);
    if (f[3] != "-") {
      std::vector<double> r;
      for (const std::string& part : Split(f[3], ',')) {
        char* end = nullptr;
        const double v = std::strtod(part.c_str(), &end);
        if (part.empty() || end != part.c_str() + part.size()) {
          throw ParseError(line_no, "bad reward '" + part + "'");
        }
        r.push_back(v);
      }
      if (static_cast<int>(r.size()) != n) {
        throw ParseError(line_no, "reward vector has the wrong length");
      }
      rec.rewards = std::move(r);
    }
    if (f[4] != "-") {
      try {
        rec.sigma = Permutation(IntList(f[4], line_no));
      } catch (const ValidationError& e) {
        throw ParseError(line_no, e.what());
      }
      if (rec.sigma->size() != n) {
        throw ParseError(line_no, "order has the wrong length");
      }
    }
    if (f[5] != "-") {
      rec.shared_owner = IntList(f[5], line_no);
      if (static_cast<int>(rec.shared_owner->size()) != trace.shared_count) {
        throw ParseError(line_no, "owner list has the wrong length");
      }
      for (int o : *rec.shared_owner) {
        if (o < -1 || o >= n) throw ParseError(line_no, "owner out of range");
      }
    } else if (rec.sigma && trace.shared_count == 0) {
      rec.shared_owner = std::vector<int>{};
    }
    trace.steps.push_back(std::move(rec));
  }
  if (!final_seen) {
    throw ParseError(line_no, "trace ends without a final state record");
  }
  if (trace.length() < 1 && !trace.truncation_reason) {
    throw ParseError(line_no, "trace has no steps");
  }
  return trace;
}

void SaveTrace(const std::string& path, const EpisodeTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace " + path);
  out << SerializeTrace(trace);
  if (!out) throw IoError("failed writing trace " + path);
}

EpisodeTrace LoadTrace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseTrace(buf.str());
}

void ValidateTrace(const EnvModel& env, const EpisodeTrace& trace) {
  if (trace.env_id != env.id()) {
    throw ValidationError("trace was recorded on '" + trace.env_id +
                          "', not '" + env.id() + "'");
  }
  if (trace.agent_count != env.agent_count() ||
      trace.shared_count != env.shared_count()) {
    throw ValidationError("trace shape does not match the environment");
  }
  for (int t = 0; t < static_cast<int>(trace.steps.size()); ++t) {
    const StepRecord& rec = trace.steps[t];
    if (rec.t != t) throw ValidationError("step indices are not contiguous");
    env.ValidateState(rec.state);
    if (t == trace.length()) break;
    if (!rec.actions) {
      throw ValidationError("step " + std::to_string(t) + " has no actions");
    }
    env.ValidateActions(*rec.actions);
    const GlobalState& next = trace.steps[t + 1].state;
    bool supported = false;
    for (const Transition& tr : env.JointKernel(rec.state, *rec.actions)) {
      supported = supported || (tr.probability > 0.0 && tr.state == next);
    }
    if (!supported) {
      throw ValidationError("step " + std::to_string(t) + ": " +
                            ToString(next) +
                            " is outside the joint kernel support from " +
                            ToString(rec.state));
    }
  }
}

std::vector<Chain> ReconstructForAttribution(const EpisodeTrace& trace,
                                             const OrderSource& source,
                                             std::uint64_t seed,
                                             std::uint64_t stream) {
  std::vector<Chain> chains;
  chains.reserve(trace.length());
  for (int t = 0; t < trace.length(); ++t) {
    const StepRecord& rec = trace.steps[t];
    Permutation sigma;
    if (source.kind == OrderSource::Kind::kRecorded) {
      if (!rec.sigma) {
        throw ValidationError("step " + std::to_string(t) +
                              " has no recorded order; inject one instead");
      }
      sigma = *rec.sigma;
    } else {
      Rng rng = Rng::ForStream(seed, stream, t, StreamPurpose::kOrder);
      sigma = SampleOrder(source.injected, trace.agent_count, rng);
    }
    const std::vector<int> owners =
        rec.shared_owner ? *rec.shared_owner : std::vector<int>{};
    chains.push_back(ReconstructChain(
        rec.state, trace.steps[t + 1].state, sigma, owners,
        rec.actions ? &*rec.actions : nullptr));
  }
  return chains;
}

}  // namespace icv
