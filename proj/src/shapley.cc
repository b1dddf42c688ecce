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

#include "icv/shapley.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "icv/errors.h"

namespace icv {
namespace {

// weights[k] = k! (n-k-1)! / n!, computed as a ratio to stay finite.
std::vector<double> SubsetWeights(int n) {
  std::vector<double> weights(n);
  for (int k = 0; k < n; ++k) {
    // 1 / (n * C(n-1, k))
    double binom = 1.0;
    for (int j = 1; j <= k; ++j) binom = binom * (n - 1 - k + j) / j;
    weights[k] = 1.0 / (n * binom);
  }
  return weights;
}

}  // namespace

CoalitionalGame::CoalitionalGame(int player_count, std::vector<double> values)
    : player_count_(player_count), values_(std::move(values)) {
  if (player_count < 1 || player_count > kMaxPlayers) {
    throw ValidationError("player count out of range");
  }
  if (values_.size() != (std::size_t{1} << player_count)) {
    throw ValidationError("need 2^n characteristic values");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("characteristic value not finite");
  }
  if (values_[0] != 0.0) throw ValidationError("v(empty) must be 0");
}

CoalitionalGame CoalitionalGame::operator+(const CoalitionalGame& other) const {
  if (other.player_count_ != player_count_) {
    throw ValidationError("games differ in player count");
  }
  std::vector<double> sum(values_.size());
  for (std::size_t k = 0; k < sum.size(); ++k) {
    sum[k] = values_[k] + other.values_[k];
  }
  return CoalitionalGame(player_count_, std::move(sum));
}

double ShapleyValue(const CoalitionalGame& game, int player) {
  const int n = game.player_count();
  if (n > kMaxExactShapleyPlayers) {
    throw UnsupportedError("exact Shapley enumeration limited to " +
                           std::to_string(kMaxExactShapleyPlayers) +
                           " players");
  }
  if (player < 0 || player >= n) throw ValidationError("player out of range");
  const std::vector<double> weights = SubsetWeights(n);
  const std::uint32_t bit = std::uint32_t{1} << player;
  double phi = 0.0;
  for (std::uint32_t k = 0; k <= game.grand_coalition(); ++k) {
    if (k & bit) continue;
    phi += weights[std::popcount(k)] * (game.value(k | bit) - game.value(k));
  }
  return phi;
}

std::vector<double> ShapleyValues(const CoalitionalGame& game) {
  std::vector<double> phi(game.player_count());
  for (int i = 0; i < game.player_count(); ++i) phi[i] = ShapleyValue(game, i);
  return phi;
}

std::vector<double> ShapleyValuesByPermutation(const CoalitionalGame& game) {
  const int n = game.player_count();
  if (n > kMaxPermutationShapleyPlayers) {
    throw UnsupportedError("permutation enumeration is limited to " +
                           std::to_string(kMaxPermutationShapleyPlayers) +
                           " players");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    std::uint32_t coalition = 0;
    for (int player : order) {
      const std::uint32_t grown = coalition | (std::uint32_t{1} << player);
      phi[player] += game.value(grown) - game.value(coalition);
      coalition = grown;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

bool AreInterchangeable(const CoalitionalGame& game, int i, int j,
                        double tolerance) {
  const std::uint32_t bi = std::uint32_t{1} << i;
  const std::uint32_t bj = std::uint32_t{1} << j;
  for (std::uint32_t k = 0; k <= game.grand_coalition(); ++k) {
    if (k & (bi | bj)) continue;
    if (std::abs(game.value(k | bi) - game.value(k | bj)) > tolerance) {
      return false;
    }
  }
  return true;
}

bool IsDummy(const CoalitionalGame& game, int player, double tolerance) {
  const std::uint32_t bit = std::uint32_t{1} << player;
  for (std::uint32_t k = 0; k <= game.grand_coalition(); ++k) {
    if (k & bit) continue;
    if (std::abs(game.value(k | bit) - game.value(k)) > tolerance) return false;
  }
  return true;
}

AxiomReport VerifyAxioms(const CoalitionalGame& game,
                         const CoalitionalGame& other, double tolerance) {
  const int n = game.player_count();
  if (n > kMaxAxiomCheckPlayers) {
    throw UnsupportedError("axiom verification limited to " +
                           std::to_string(kMaxAxiomCheckPlayers) + " players");
  }
  AxiomReport report;
  const std::vector<double> phi = ShapleyValues(game);

  const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
  const double grand = game.value(game.grand_coalition());
  if (std::abs(total - grand) > tolerance) {
    report.efficiency = false;
    report.diagnostics.push_back("efficiency: sum phi = " +
                                 std::to_string(total) +
                                 ", v(N) = " + std::to_string(grand));
  }

  // Interchangeability is detected exactly so that tolerance-level value
  // noise does not create spurious symmetric pairs.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!AreInterchangeable(game, i, j, 0.0)) continue;
      ++report.interchangeable_pairs;
      if (std::abs(phi[i] - phi[j]) > tolerance) {
        report.symmetry = false;
        report.diagnostics.push_back("symmetry: players " + std::to_string(i) +
                                     " and " + std::to_string(j));
      }
    }
  }

  const std::vector<double> phi_other = ShapleyValues(other);
  const std::vector<double> phi_sum = ShapleyValues(game + other);
  for (int i = 0; i < n; ++i) {
    if (std::abs(phi_sum[i] - phi[i] - phi_other[i]) > tolerance) {
      report.additivity = false;
      report.diagnostics.push_back("additivity: player " + std::to_string(i));
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!IsDummy(game, i, 0.0)) continue;
    ++report.dummy_players;
    if (std::abs(phi[i]) > tolerance) {
      report.dummy = false;
      report.diagnostics.push_back("dummy: player " + std::to_string(i));
    }
  }
  return report;
}

}  // namespace icv
