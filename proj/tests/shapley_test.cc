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
#include <numeric>
#include <vector>

#include "generators.h"
#include "gtest/gtest.h"
#include "icv/errors.h"

namespace icv {
namespace {

// Average marginal contribution over all arrival orders, by brute force.
std::vector<double> PermutationOracle(const CoalitionalGame& game) {
  const int n = game.player_count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  long count = 0;
  do {
    std::uint32_t k = 0;
    for (int p : order) {
      phi[p] += game.value(k | (1u << p)) - game.value(k);
      k |= 1u << p;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& x : phi) x /= static_cast<double>(count);
  return phi;
}

TEST(ShapleyTest, MajorityGameSplitsEvenly) {
  std::vector<double> v(8);
  for (std::uint32_t k = 0; k < 8; ++k) v[k] = __builtin_popcount(k) >= 2 ? 1 : 0;
  const CoalitionalGame game(3, v);
  for (double phi : ShapleyValues(game)) EXPECT_NEAR(phi, 1.0 / 3.0, 1e-15);
}

TEST(ShapleyTest, DummyGetsZero) {
  // Player 2 never changes the value.
  const std::vector<double> v = {0, 1, 2, 4, 0, 1, 2, 4};
  const CoalitionalGame game(3, v);
  EXPECT_EQ(ShapleyValue(game, 2), 0.0);
  EXPECT_TRUE(IsDummy(game, 2, 1e-12));
  EXPECT_FALSE(IsDummy(game, 0, 1e-12));
}

TEST(ShapleyTest, SymmetricPairGetsEqualValues) {
  const std::vector<double> v = {0, 3, 3, 5, 1, 4, 4, 9};
  const CoalitionalGame game(3, v);
  ASSERT_TRUE(AreInterchangeable(game, 0, 1, 1e-12));
  EXPECT_NEAR(ShapleyValue(game, 0), ShapleyValue(game, 1), 1e-15);
}

TEST(ShapleyTest, RandomFourPlayerGameMatchesPermutationOracle) {
  testing::Gen g(3);
  const CoalitionalGame game = testing::RandomGame(g, 4);
  const std::vector<double> oracle = PermutationOracle(game);
  const std::vector<double> subset = ShapleyValues(game);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(subset[i], oracle[i], 1e-12);
}

TEST(ShapleyTest, RejectsInvalidGames) {
  EXPECT_THROW(CoalitionalGame(2, {1, 0, 0, 0}), ValidationError);
  EXPECT_THROW(CoalitionalGame(2, {0, 0, 0}), ValidationError);
  EXPECT_THROW(CoalitionalGame(1, {0, std::nan("")}), ValidationError);
  std::vector<double> big(std::size_t{1} << 13, 0.0);
  EXPECT_THROW(ShapleyValues(CoalitionalGame(13, big)), UnsupportedError);
}

TEST(ShapleyProperty, AxiomsOnRandomGames) {
  testing::Gen g(5);
  for (int n = 3; n <= 5; ++n) {
    for (int trial = 0; trial < 1000; ++trial) {
      const CoalitionalGame a = testing::RandomGame(g, n);
      const CoalitionalGame b = testing::RandomGame(g, n);
      const AxiomReport r = VerifyAxioms(a, b, 1e-9);
      ASSERT_TRUE(r.passed()) << "n=" << n << " trial " << trial;

      // Independent checks of the same axioms.
      const std::vector<double> phi = ShapleyValues(a);
      const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
      EXPECT_NEAR(total, a.value(a.grand_coalition()), 1e-9);
      const std::vector<double> phi_b = ShapleyValues(b);
      const std::vector<double> phi_sum = ShapleyValues(a + b);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(phi_sum[i], phi[i] + phi_b[i], 1e-9);
      }
    }
  }
}

TEST(ShapleyProperty, PlantedSymmetryAndDummy) {
  testing::Gen g(6);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = testing::Between(g, 3, 6);
    std::vector<double> v = testing::RandomGame(g, n).values();
    // Make 0 and 1 interchangeable, then make n-1 a dummy.
    for (std::uint32_t k = 0; k < v.size(); ++k) {
      if ((k & 1u) && !(k & 2u)) v[(k & ~1u) | 2u] = v[k];
    }
    const std::uint32_t d = 1u << (n - 1);
    for (std::uint32_t k = 0; k < v.size(); ++k) {
      if (k & d) v[k] = v[k & ~d];
    }
    const CoalitionalGame game(n, v);
    const std::vector<double> phi = ShapleyValues(game);
    EXPECT_NEAR(phi[0], phi[1], 1e-9);
    EXPECT_NEAR(phi[n - 1], 0.0, 1e-9);
    const AxiomReport r = VerifyAxioms(game, game, 1e-9);
    EXPECT_TRUE(r.passed());
    EXPECT_GE(r.interchangeable_pairs, 1);
    EXPECT_GE(r.dummy_players, 1);
  }
}

TEST(ShapleyProperty, SubsetFormulaMatchesPermutations) {
  testing::Gen g(7);
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const CoalitionalGame game = testing::RandomGame(g, n);
      const std::vector<double> subset = ShapleyValues(game);
      const std::vector<double> oracle = PermutationOracle(game);
      const std::vector<double> lib = ShapleyValuesByPermutation(game);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(subset[i], oracle[i], 1e-12);
        EXPECT_NEAR(lib[i], oracle[i], 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace icv
