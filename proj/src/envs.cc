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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "icv/errors.h"

#ifndef ICV_DEFAULT_DATA_DIR
#define ICV_DEFAULT_DATA_DIR "data"
#endif

namespace icv {
namespace {

const char* const kMoveNames[] = {"up", "down", "left", "right"};

// Neighbor of (row, col) in direction `action` or -1 if off the grid.
int Neighbor(int cell, int action, int rows, int cols) {
  int r = cell / cols;
  int c = cell % cols;
  switch (action) {
    case 0: --r; break;
    case 1: ++r; break;
    case 2: --c; break;
    case 3: ++c; break;
    default: return cell;
  }
  if (r < 0 || r >= rows || c < 0 || c >= cols) return -1;
  return r * cols + c;
}

int Manhattan(int a, int b, int cols) {
  return std::abs(a / cols - b / cols) + std::abs(a % cols - b % cols);
}

std::vector<Transition> Merge(std::map<GlobalState, double> outcomes) {
  std::vector<Transition> out;
  out.reserve(outcomes.size());
  for (auto& [state, p] : outcomes) out.push_back({state, p});
  return out;
}

// Enumerates every assignment of values in [0, radix_k) to the slots.
template <typename Fn>
void ForEachTuple(const std::vector<std::vector<int>>& choices, Fn&& fn) {
  std::vector<int> current(choices.size());
  std::vector<std::size_t> index(choices.size(), 0);
  for (const auto& c : choices) {
    if (c.empty()) return;
  }
  while (true) {
    for (std::size_t k = 0; k < choices.size(); ++k) {
      current[k] = choices[k][index[k]];
    }
    fn(current);
    std::size_t k = 0;
    while (k < choices.size() && ++index[k] == choices[k].size()) {
      index[k] = 0;
      ++k;
    }
    if (k == choices.size()) return;
  }
}

StateKey PushDigit(StateKey key, int digit, int radix) {
  StateKey out;
  if (__builtin_mul_overflow(key, static_cast<StateKey>(radix), &out)) {
    throw ValidationError("state key overflows 64 bits");
  }
  return out + static_cast<StateKey>(digit);
}

ValidationError LayoutError(int line, const std::string& message) {
  return ValidationError("layout line " + std::to_string(line) + ": " +
                         message);
}

}  // namespace

Observation Individualize(const GlobalState& s, int agent) {
  const int n = static_cast<int>(s.agents.size());
  if (agent < 0 || agent >= n) throw ValidationError("agent out of range");
  Observation obs;
  obs.agents.reserve(n);
  obs.agents.push_back(s.agents[agent]);
  for (int j = 0; j < n; ++j) {
    if (j != agent) obs.agents.push_back(s.agents[j]);
  }
  obs.shared = s.shared;
  return obs;
}

GlobalState Deindividualize(const Observation& obs, int agent) {
  const int n = static_cast<int>(obs.agents.size());
  if (agent < 0 || agent >= n) throw ValidationError("agent out of range");
  GlobalState s;
  s.agents.resize(n);
  s.agents[agent] = obs.agents[0];
  int slot = 1;
  for (int j = 0; j < n; ++j) {
    if (j != agent) s.agents[j] = obs.agents[slot++];
  }
  s.shared = obs.shared;
  return s;
}

namespace {

int KeyRadix(const EnvModel& env) {
  int radix = 1;
  for (int i = 0; i < env.agent_count(); ++i) {
    radix = std::max(radix, env.key_local_state_count(i));
  }
  return radix;
}

StateKey PackKey(const EnvModel& env, const std::vector<int>& agents,
                 const std::vector<int>& shared) {
  const int radix = KeyRadix(env);
  StateKey key = 0;
  for (int v : agents) {
    if (v < 0 || v >= radix) throw ValidationError("local state out of range");
    key = PushDigit(key, v, radix);
  }
  for (std::size_t c = 0; c < shared.size(); ++c) {
    const int r = env.key_shared_state_count(static_cast<int>(c));
    if (shared[c] < 0 || shared[c] >= r) {
      throw ValidationError("shared component out of range");
    }
    key = PushDigit(key, shared[c], r);
  }
  return key;
}

}  // namespace

StateKey ObservationKey(const EnvModel& env, const GlobalState& s, int agent) {
  const Observation obs = Individualize(env.KeyProjection(s), agent);
  return PackKey(env, obs.agents, obs.shared);
}

StateKey ValueKey(const EnvModel& env, const GlobalState& s) {
  const GlobalState p = env.KeyProjection(s);
  return PackKey(env, p.agents, p.shared);
}

std::string DataDirectory() {
  if (const char* dir = std::getenv("ICV_DATA_DIR"); dir && *dir) return dir;
  return ICV_DEFAULT_DATA_DIR;
}

// --- KeyLockLayout -------------------------------------------------------------

KeyLockLayout KeyLockLayout::Parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw LayoutError(1, "empty layout");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFormatTag) {
    throw LayoutError(1, "expected header '" + std::string(kFormatTag) +
                             "', got '" + line + "'");
  }
  KeyLockLayout layout;
  std::map<int, int> starts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (layout.cols == 0) layout.cols = static_cast<int>(line.size());
    if (static_cast<int>(line.size()) != layout.cols) {
      throw LayoutError(line_no, "ragged layout row");
    }
    for (int c = 0; c < layout.cols; ++c) {
      const char ch = line[c];
      const int cell = layout.rows * layout.cols + c;
      switch (ch) {
        case '.': case '#': case 'L': break;
        case 'G':
          if (layout.lock_cell != -1) throw LayoutError(line_no, "two locks");
          layout.lock_cell = cell;
          break;
        case 'K':
          if (layout.key_cell != -1) throw LayoutError(line_no, "two keys");
          layout.key_cell = cell;
          break;
        case 'T': layout.target_cells.push_back(cell); break;
        default:
          if (ch >= '1' && ch <= '6') {
            if (!starts.emplace(ch - '1', cell).second) {
              throw LayoutError(line_no, "duplicate agent start");
            }
            layout.cells.push_back('.');
            continue;
          }
          throw LayoutError(line_no, std::string("unknown cell '") + ch + "'");
      }
      layout.cells.push_back(ch);
    }
    ++layout.rows;
  }
  if (layout.rows == 0) throw LayoutError(line_no, "layout has no rows");
  if (layout.key_cell == -1 || layout.lock_cell == -1) {
    throw LayoutError(line_no, "layout needs one key and one green lock");
  }
  if (layout.target_cells.empty()) throw LayoutError(line_no, "no target");
  for (int i = 0; i < static_cast<int>(starts.size()); ++i) {
    auto it = starts.find(i);
    if (it == starts.end()) throw LayoutError(line_no, "agent starts not 1..n");
    layout.starts.push_back(it->second);
  }
  if (layout.starts.empty()) throw LayoutError(line_no, "no agents");
  return layout;
}

KeyLockLayout KeyLockLayout::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open layout " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

KeyLockLayout KeyLockLayout::LoadNamed(const std::string& name) {
  if (name.find('/') != std::string::npos) return Load(name);
  return Load(DataDirectory() + "/layouts/" + name + ".txt");
}

// --- KeyLockEnv -----------------------------------------------------------------

KeyLockEnv::KeyLockEnv(KeyLockLayout layout, KeyLockOptions options)
    : layout_(std::move(layout)), options_(options) {
  if (options_.horizon <= 0) throw ValidationError("horizon must be positive");
  if (agent_count() > 6) throw ValidationError("at most 6 agents");
}

std::string KeyLockEnv::action_name(int, int action) const {
  if (action == kStay) return "stay";
  return kMoveNames[action];
}

bool KeyLockEnv::Passable(int cell, bool lock_open) const {
  const char ch = layout_.at(cell);
  if (ch == '#' || ch == 'L') return false;
  if (ch == 'G') return lock_open;
  return true;
}

int KeyLockEnv::Target(int cell, int action, bool lock_open) const {
  if (action == kStay) return cell;
  const int next = Neighbor(cell, action, layout_.rows, layout_.cols);
  if (next < 0 || !Passable(next, lock_open)) return cell;
  return next;
}

std::vector<Transition> KeyLockEnv::InitialDistribution() const {
  return {{GlobalState{layout_.starts, {kLockClosed}}, 1.0}};
}

std::vector<Transition> KeyLockEnv::SubstepKernel(const GlobalState& s,
                                                  int agent, int action) const {
  GlobalState next = s;
  const bool open = s.shared[0] == kLockOpen;
  const int target = Target(s.agents[agent], action, open);
  next.agents[agent] = target;
  if (target == layout_.key_cell) next.shared[0] = kLockOpen;
  return {{std::move(next), 1.0}};
}

std::vector<Transition> KeyLockEnv::JointKernel(const GlobalState& s,
                                                const ActionProfile& a) const {
  const int n = agent_count();
  const bool open = s.shared[0] == kLockOpen;
  std::vector<int> openers;
  std::vector<int> enterers;
  GlobalState base = s;
  for (int i = 0; i < n; ++i) {
    const int action = a.actions[i];
    const int closed_target = Target(s.agents[i], action, open);
    base.agents[i] = closed_target;
    if (closed_target == layout_.key_cell) openers.push_back(i);
    if (!open && action != kStay &&
        Neighbor(s.agents[i], action, layout_.rows, layout_.cols) ==
            layout_.lock_cell) {
      enterers.push_back(i);
    }
  }
  if (openers.empty()) return {{std::move(base), 1.0}};
  base.shared[0] = kLockOpen;
  if (enterers.empty()) return {{std::move(base), 1.0}};

  // Each enterer passes iff an opener precedes it. The relative order of
  // openers and enterers is uniform; other agents are irrelevant.
  std::vector<int> group;
  group.insert(group.end(), openers.begin(), openers.end());
  group.insert(group.end(), enterers.begin(), enterers.end());
  std::sort(group.begin(), group.end());
  const auto is_opener = [&](int i) {
    return std::find(openers.begin(), openers.end(), i) != openers.end();
  };
  std::map<GlobalState, double> outcomes;
  double total = 0.0;
  do {
    GlobalState next = base;
    bool passed_opener = false;
    for (int i : group) {
      if (is_opener(i)) {
        passed_opener = true;
      } else if (passed_opener) {
        next.agents[i] = layout_.lock_cell;
      }
    }
    outcomes[next] += 1.0;
    total += 1.0;
  } while (std::next_permutation(group.begin(), group.end()));
  for (auto& [state, p] : outcomes) p /= total;
  return Merge(std::move(outcomes));
}

std::vector<double> KeyLockEnv::Rewards(const GlobalState& s,
                                        const ActionProfile&,
                                        const GlobalState& next) const {
  const double r = (!IsTerminal(s) && IsTerminal(next)) ? 1.0 : 0.0;
  return std::vector<double>(agent_count(), r);
}

bool KeyLockEnv::IsTerminal(const GlobalState& s) const {
  for (int cell : s.agents) {
    if (std::find(layout_.target_cells.begin(), layout_.target_cells.end(),
                  cell) == layout_.target_cells.end()) {
      return false;
    }
  }
  return true;
}

std::vector<GlobalState> KeyLockEnv::EnumerateStates() const {
  std::vector<GlobalState> out;
  for (int lock : {kLockClosed, kLockOpen}) {
    std::vector<int> cells;
    for (int c = 0; c < layout_.rows * layout_.cols; ++c) {
      // Standing on the key implies the lock is open.
      if (lock == kLockClosed && c == layout_.key_cell) continue;
      if (Passable(c, lock == kLockOpen)) cells.push_back(c);
    }
    ForEachTuple(std::vector<std::vector<int>>(agent_count(), cells),
                 [&](const std::vector<int>& t) {
                   out.push_back(GlobalState{t, {lock}});
                 });
  }
  return out;
}

bool KeyLockEnv::IsWellFormed(const GlobalState& s) const {
  const bool open = s.shared[0] == kLockOpen;
  for (int cell : s.agents) {
    if (!Passable(cell, open)) return false;
    if (!open && cell == layout_.key_cell) return false;
  }
  return true;
}

// --- ForagingEnv ----------------------------------------------------------------

ForagingEnv::ForagingEnv(ForagingOptions options) : options_(std::move(options)) {
  const int g = options_.grid_size;
  if (g < 3 || g > 32) throw ValidationError("grid_size must be in [3, 32]");
  if (options_.agents < 2 || options_.agents > 6) {
    throw ValidationError("foraging supports 2..6 agents");
  }
  if (options_.apples < 1 || options_.apples > 8) {
    throw ValidationError("foraging supports 1..8 apples");
  }
  if (options_.horizon <= 0) throw ValidationError("horizon must be positive");
  const auto cell = [g](int r, int c) { return r * g + c; };
  if (options_.apple_cells.empty()) {
    const std::vector<std::pair<int, int>> spots = {
        {2, 2}, {4, 4}, {1, 4}, {4, 1}, {0, 0}, {0, 4}, {4, 0}, {2, 5}};
    for (int m = 0; m < options_.apples; ++m) {
      const auto [r, c] = spots[m];
      if (r >= g || c >= g) throw ValidationError("grid too small for apples");
      options_.apple_cells.push_back(cell(r, c));
    }
  }
  if (options_.agent_cells.empty()) {
    const std::vector<std::pair<int, int>> spots = {
        {0, 2}, {2, 0}, {4, 2}, {2, 4}, {g - 1, g - 1}, {0, g - 1}};
    for (int i = 0; i < options_.agents; ++i) {
      const auto [r, c] = spots[i];
      if (r >= g || c >= g) throw ValidationError("grid too small for agents");
      options_.agent_cells.push_back(cell(r, c));
    }
  }
  if (static_cast<int>(options_.apple_cells.size()) != options_.apples ||
      static_cast<int>(options_.agent_cells.size()) != options_.agents) {
    throw ValidationError("placement size does not match counts");
  }
  std::vector<int> used;
  for (int c : options_.apple_cells) used.push_back(c);
  for (int c : options_.agent_cells) used.push_back(c);
  for (int c : used) {
    if (c < 0 || c >= cells()) throw ValidationError("placement off the grid");
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
    throw ValidationError("placements must be distinct cells");
  }
}

std::string ForagingEnv::action_name(int, int action) const {
  if (action == kLoad) return "load";
  return kMoveNames[action];
}

RewardBounds ForagingEnv::reward_bounds() const { return {0.0, 1.0}; }

std::vector<Transition> ForagingEnv::InitialDistribution() const {
  GlobalState s;
  for (int c : options_.agent_cells) s.agents.push_back(Pack(c, false, 0));
  s.shared.assign(options_.apples, 1);
  return {{std::move(s), 1.0}};
}

int ForagingEnv::MoveTarget(const GlobalState& s, int cell, int action) const {
  const int g = options_.grid_size;
  const int next = Neighbor(cell, action, g, g);
  if (next < 0) return cell;
  for (int m = 0; m < options_.apples; ++m) {
    if (s.shared[m] == 1 && options_.apple_cells[m] == next) return cell;
  }
  return next;
}

bool ForagingEnv::AllAdjacentDistinct(const std::vector<int>& agent_cells,
                                      int apple) const {
  const int target = options_.apple_cells[apple];
  std::vector<int> sorted = agent_cells;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return false;
  }
  for (int c : agent_cells) {
    if (Manhattan(c, target, options_.grid_size) != 1) return false;
  }
  return true;
}

int ForagingEnv::LoadableApple(const GlobalState& s,
                               const std::vector<int>& agent_cells) const {
  for (int m = 0; m < options_.apples; ++m) {
    if (s.shared[m] == 1 && AllAdjacentDistinct(agent_cells, m)) return m;
  }
  return -1;
}

std::vector<Transition> ForagingEnv::SubstepKernel(const GlobalState& s,
                                                   int agent,
                                                   int action) const {
  GlobalState next = s;
  const int local = s.agents[agent];
  const int cell = Cell(local);
  const int parity = 1 - Parity(local);
  if (action == kLoad) {
    next.agents[agent] = Pack(cell, true, parity);
  } else {
    next.agents[agent] = Pack(MoveTarget(s, cell, action), false, parity);
  }
  // The last actor of a step is the one that brings all parities level.
  bool level = true;
  bool all_loaded = true;
  std::vector<int> cells_now;
  for (int v : next.agents) {
    level = level && Parity(v) == parity;
    all_loaded = all_loaded && Loaded(v);
    cells_now.push_back(Cell(v));
  }
  if (level && all_loaded) {
    const int m = LoadableApple(next, cells_now);
    if (m >= 0) next.shared[m] = 0;
  }
  return {{std::move(next), 1.0}};
}

std::vector<Transition> ForagingEnv::JointKernel(const GlobalState& s,
                                                 const ActionProfile& a) const {
  GlobalState next = s;
  bool all_load = true;
  std::vector<int> cells_before;
  for (int i = 0; i < options_.agents; ++i) {
    const int local = s.agents[i];
    const int cell = Cell(local);
    const int parity = 1 - Parity(local);
    cells_before.push_back(cell);
    if (a.actions[i] == kLoad) {
      next.agents[i] = Pack(cell, true, parity);
    } else {
      all_load = false;
      next.agents[i] = Pack(MoveTarget(s, cell, a.actions[i]), false, parity);
    }
  }
  if (all_load) {
    const int m = LoadableApple(s, cells_before);
    if (m >= 0) next.shared[m] = 0;
  }
  return {{std::move(next), 1.0}};
}

std::vector<double> ForagingEnv::Rewards(const GlobalState& s,
                                         const ActionProfile&,
                                         const GlobalState& next) const {
  double removed = 0.0;
  for (int m = 0; m < options_.apples; ++m) {
    if (s.shared[m] == 1 && next.shared[m] == 0) removed += 1.0;
  }
  return std::vector<double>(options_.agents, removed);
}

bool ForagingEnv::IsTerminal(const GlobalState& s) const {
  return std::all_of(s.shared.begin(), s.shared.end(),
                     [](int v) { return v == 0; });
}

std::vector<GlobalState> ForagingEnv::EnumerateStates() const {
  std::vector<GlobalState> out;
  std::vector<std::vector<int>> apple_choices(options_.apples, {0, 1});
  ForEachTuple(apple_choices, [&](const std::vector<int>& apples) {
    GlobalState probe;
    probe.shared = apples;
    std::vector<int> free_cells;
    for (int c = 0; c < cells(); ++c) {
      bool blocked = false;
      for (int m = 0; m < options_.apples; ++m) {
        blocked = blocked || (apples[m] == 1 && options_.apple_cells[m] == c);
      }
      if (!blocked) free_cells.push_back(c);
    }
    for (int parity : {0, 1}) {
      std::vector<int> locals;
      for (int c : free_cells) {
        locals.push_back(Pack(c, false, parity));
        locals.push_back(Pack(c, true, parity));
      }
      ForEachTuple(std::vector<std::vector<int>>(options_.agents, locals),
                   [&](const std::vector<int>& t) {
                     out.push_back(GlobalState{t, apples});
                   });
    }
  });
  return out;
}

bool ForagingEnv::IsWellFormed(const GlobalState& s) const {
  const int parity = Parity(s.agents[0]);
  for (int v : s.agents) {
    if (Parity(v) != parity) return false;
    for (int m = 0; m < options_.apples; ++m) {
      if (s.shared[m] == 1 && options_.apple_cells[m] == Cell(v)) return false;
    }
  }
  return true;
}

GlobalState ForagingEnv::KeyProjection(const GlobalState& s) const {
  GlobalState p = s;
  for (int& v : p.agents) v = Cell(v);
  return p;
}

std::vector<GlobalState> ForagingEnv::EnumerateKeyStates() const {
  std::vector<GlobalState> out;
  std::vector<int> all(cells());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<int>> apple_choices(options_.apples, {0, 1});
  ForEachTuple(apple_choices, [&](const std::vector<int>& apples) {
    ForEachTuple(std::vector<std::vector<int>>(options_.agents, all),
                 [&](const std::vector<int>& t) {
                   out.push_back(GlobalState{t, apples});
                 });
  });
  return out;
}

// --- TagEnv ---------------------------------------------------------------------

TagEnv::TagEnv(TagOptions options) : options_(options) {
  const int g = options_.grid_size;
  if (g < 2 || g > 32) throw ValidationError("grid_size must be in [2, 32]");
  if (options_.predators < 2 || options_.prey < 1) {
    throw ValidationError("tag needs at least two predators and one prey");
  }
  if (options_.predators > g || options_.prey > g ||
      options_.predators + options_.prey > 6) {
    throw ValidationError("too many agents for tag");
  }
  if (options_.horizon <= 0) throw ValidationError("horizon must be positive");
}

std::string TagEnv::action_name(int, int action) const {
  if (action == kStay) return "stay";
  return kMoveNames[action];
}

RewardBounds TagEnv::reward_bounds() const {
  const double shaping = options_.proximity_shaping ? options_.shaping_penalty
                                                    : 0.0;
  return {-1.0 - shaping,
          static_cast<double>(options_.prey) / options_.predators};
}

std::vector<Transition> TagEnv::InitialDistribution() const {
  const int g = options_.grid_size;
  GlobalState s;
  // Predators fill the top row from the corners inward; prey fill the
  // bottom row from the middle outward.
  for (int k = 0; k < options_.predators; ++k) {
    const int col = (k % 2 == 0) ? k / 2 : g - 1 - k / 2;
    s.agents.push_back(col);
  }
  for (int k = 0; k < options_.prey; ++k) {
    const int offset = (k + 1) / 2;
    const int col = g / 2 + ((k % 2 == 1) ? -offset : offset);
    s.agents.push_back((g - 1) * g + col);
  }
  return {{std::move(s), 1.0}};
}

int TagEnv::MoveTarget(int cell, int action) const {
  const int next =
      Neighbor(cell, action, options_.grid_size, options_.grid_size);
  return next < 0 ? cell : next;
}

std::vector<Transition> TagEnv::SubstepKernel(const GlobalState& s, int agent,
                                              int action) const {
  GlobalState next = s;
  next.agents[agent] = MoveTarget(s.agents[agent], action);
  return {{std::move(next), 1.0}};
}

std::vector<Transition> TagEnv::JointKernel(const GlobalState& s,
                                            const ActionProfile& a) const {
  GlobalState next = s;
  for (int i = 0; i < agent_count(); ++i) {
    next.agents[i] = MoveTarget(s.agents[i], a.actions[i]);
  }
  return {{std::move(next), 1.0}};
}

std::vector<double> TagEnv::TaggingRewards(const GlobalState& next) const {
  std::vector<double> r(agent_count(), 0.0);
  for (int j = options_.predators; j < agent_count(); ++j) {
    bool tagged = false;
    for (int p = 0; p < options_.predators; ++p) {
      tagged = tagged || next.agents[p] == next.agents[j];
    }
    if (!tagged) continue;
    r[j] -= 1.0;
    for (int p = 0; p < options_.predators; ++p) {
      r[p] += 1.0 / options_.predators;
    }
  }
  return r;
}

std::vector<double> TagEnv::Rewards(const GlobalState&, const ActionProfile&,
                                    const GlobalState& next) const {
  std::vector<double> r = TaggingRewards(next);
  if (!options_.proximity_shaping) return r;
  for (int j = options_.predators; j < agent_count(); ++j) {
    int nearest = 1 << 20;
    for (int p = 0; p < options_.predators; ++p) {
      nearest = std::min(nearest, Manhattan(next.agents[p], next.agents[j],
                                            options_.grid_size));
    }
    if (nearest <= options_.shaping_radius) r[j] -= options_.shaping_penalty;
  }
  return r;
}

std::vector<GlobalState> TagEnv::EnumerateStates() const {
  std::vector<int> all(local_state_count(0));
  std::iota(all.begin(), all.end(), 0);
  std::vector<GlobalState> out;
  ForEachTuple(std::vector<std::vector<int>>(agent_count(), all),
               [&](const std::vector<int>& t) {
                 out.push_back(GlobalState{t, {}});
               });
  return out;
}

bool TagEnv::IsWellFormed(const GlobalState&) const { return true; }

// --- ContentionEnv ----------------------------------------------------------------

std::string ContentionEnv::action_name(int, int action) const {
  return action == kAdvance ? "advance" : "stay";
}

std::vector<Transition> ContentionEnv::InitialDistribution() const {
  return {{GlobalState{{0, 2}, {}}, 1.0}};
}

std::vector<Transition> ContentionEnv::SubstepKernel(const GlobalState& s,
                                                     int agent,
                                                     int action) const {
  GlobalState next = s;
  if (action == kAdvance && s.agents[1 - agent] != 1) next.agents[agent] = 1;
  return {{std::move(next), 1.0}};
}

std::vector<Transition> ContentionEnv::JointKernel(
    const GlobalState& s, const ActionProfile& a) const {
  GlobalState next = s;
  if (a.actions[0] == kAdvance && s.agents[1] != 1) {
    next.agents[0] = 1;
  } else if (a.actions[1] == kAdvance && s.agents[0] != 1) {
    next.agents[1] = 1;
  }
  return {{std::move(next), 1.0}};
}

std::vector<GlobalState> ContentionEnv::EnumerateStates() const {
  std::vector<GlobalState> out;
  for (int x0 = 0; x0 < 3; ++x0) {
    for (int x1 = 0; x1 < 3; ++x1) {
      if (x0 != x1) out.push_back(GlobalState{{x0, x1}, {}});
    }
  }
  return out;
}

bool ContentionEnv::IsWellFormed(const GlobalState& s) const {
  return s.agents[0] != s.agents[1];
}

// --- Factory ----------------------------------------------------------------------

std::unique_ptr<EnvModel> MakeEnv(const EnvSpec& spec) {
  if (spec.id == "keylock") {
    KeyLockOptions o;
    o.allow_stay = spec.allow_stay;
    if (spec.horizon > 0) o.horizon = spec.horizon;
    o.discount = spec.discount;
    return std::make_unique<KeyLockEnv>(KeyLockLayout::LoadNamed(spec.layout),
                                        o);
  }
  if (spec.id == "foraging") {
    ForagingOptions o;
    if (spec.grid_size > 0) o.grid_size = spec.grid_size;
    if (spec.agents > 0) o.agents = spec.agents;
    if (spec.apples > 0) o.apples = spec.apples;
    if (spec.horizon > 0) o.horizon = spec.horizon;
    o.discount = spec.discount;
    return std::make_unique<ForagingEnv>(o);
  }
  if (spec.id == "tag") {
    TagOptions o;
    if (spec.grid_size > 0) o.grid_size = spec.grid_size;
    if (spec.predators > 0) o.predators = spec.predators;
    if (spec.prey > 0) o.prey = spec.prey;
    if (spec.horizon > 0) o.horizon = spec.horizon;
    o.discount = spec.discount;
    o.proximity_shaping = spec.proximity_shaping;
    return std::make_unique<TagEnv>(o);
  }
  if (spec.id == "contention") return std::make_unique<ContentionEnv>();
  throw ConfigError("unknown environment '" + spec.id + "'");
}

std::string DescribeEnvSpec(const EnvSpec& spec) {
  std::ostringstream out;
  out << spec.id;
  if (spec.id == "keylock") {
    out << ":layout=" << spec.layout << ":stay=" << spec.allow_stay;
  } else if (spec.id == "foraging") {
    out << ":grid=" << spec.grid_size << ":agents=" << spec.agents
        << ":apples=" << spec.apples;
  } else if (spec.id == "tag") {
    out << ":grid=" << spec.grid_size << ":predators=" << spec.predators
        << ":prey=" << spec.prey << ":shaping=" << spec.proximity_shaping;
  }
  out << ":horizon=" << spec.horizon << ":discount=" << spec.discount;
  return out.str();
}

}  // namespace icv
