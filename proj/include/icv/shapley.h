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

#ifndef ICV_SHAPLEY_H_
#define ICV_SHAPLEY_H_

// Classical Shapley values for transferable-utility coalitional games.

#include <cstdint>
#include <string>
#include <vector>

namespace icv {

// Characteristic values v(K) for every K ⊆ {0..n-1}, indexed by bitmask.
class CoalitionalGame {
 public:
  static constexpr int kMaxPlayers = 20;

  // `values` must have 2^player_count finite entries with values[0] == 0.
  CoalitionalGame(int player_count, std::vector<double> values);

  int player_count() const { return player_count_; }
  double value(std::uint32_t coalition) const { return values_[coalition]; }
  std::uint32_t grand_coalition() const {
    return (std::uint32_t{1} << player_count_) - 1;
  }
  const std::vector<double>& values() const { return values_; }

  CoalitionalGame operator+(const CoalitionalGame& other) const;

 private:
  int player_count_;
  std::vector<double> values_;
};

inline constexpr int kMaxExactShapleyPlayers = 12;
inline constexpr int kMaxAxiomCheckPlayers = 8;

// Subset-weight formula: sum over K ⊆ N\{i} of
// |K|! (n-|K|-1)! / n! * (v(K ∪ {i}) - v(K)).
double ShapleyValue(const CoalitionalGame& game, int player);
std::vector<double> ShapleyValues(const CoalitionalGame& game);

// Average marginal contribution over all n! arrival orders.
inline constexpr int kMaxPermutationShapleyPlayers = 9;
std::vector<double> ShapleyValuesByPermutation(const CoalitionalGame& game);

struct AxiomReport {
  bool efficiency = true;
  bool symmetry = true;
  bool additivity = true;
  bool dummy = true;
  int interchangeable_pairs = 0;
  int dummy_players = 0;
  std::vector<std::string> diagnostics;

  bool passed() const { return efficiency && symmetry && additivity && dummy; }
};

// Efficiency, symmetry (for every detected interchangeable pair), additivity
// against `other`, and the dummy axiom (for every detected dummy player).
AxiomReport VerifyAxioms(const CoalitionalGame& game,
                         const CoalitionalGame& other, double tolerance = 1e-9);

bool AreInterchangeable(const CoalitionalGame& game, int i, int j,
                        double tolerance);
bool IsDummy(const CoalitionalGame& game, int player, double tolerance);

}  // namespace icv

#endif  // ICV_SHAPLEY_H_
