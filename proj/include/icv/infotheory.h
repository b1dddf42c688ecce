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

#ifndef ICV_INFOTHEORY_H_
#define ICV_INFOTHEORY_H_

// Exact finite-alphabet information measures. All quantities are in bits.

#include <span>
#include <vector>

namespace icv {

// A validated probability mass function over outcome indices [0, n).
class Pmf {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Throws ValidationError unless every entry is in [0, 1] and the entries
  // sum to 1 within kSumTolerance. No renormalization happens here.
  explicit Pmf(std::vector<double> probs);

  static Pmf Uniform(int outcome_count);
  static Pmf PointMass(int outcome_count, int outcome);
  // The only path that rescales: divides non-negative weights by their sum.
  static Pmf Normalize(std::vector<double> weights);

  int outcome_count() const { return static_cast<int>(probs_.size()); }
  double operator[](int outcome) const { return probs_[outcome]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const Pmf& other) const = default;

 private:
  struct Trusted {};
  Pmf(std::vector<double> probs, Trusted) : probs_(std::move(probs)) {}
  friend Pmf MixPmfs(const Pmf&, const Pmf&, double);

  std::vector<double> probs_;
};

// (1 - weight) * a + weight * b.
Pmf MixPmfs(const Pmf& a, const Pmf& b, double weight);

double Entropy(const Pmf& p);

// Throws SupportError if p(x) > 0 where q(x) = 0, ValidationError on a
// dimension mismatch.
double KlDivergence(const Pmf& p, const Pmf& q);

// Jensen-Shannon divergence with base-2 logs, in [0, 1].
double Jsd(const Pmf& p, const Pmf& q);

// 1 - Jsd(p, q).
double Similarity(const Pmf& p, const Pmf& q);

// log2(outcome_count) - Entropy(p): decision certainty.
double Peakedness(const Pmf& p);

// Entropy(prior) - Entropy(posterior), for one observed conditioning value.
// Negative when the posterior is less certain than the prior.
double PointwiseConditionalMi(const Pmf& prior, const Pmf& posterior);

// A discrete memoryless channel: one output distribution per input symbol.
class Channel {
 public:
  explicit Channel(std::vector<Pmf> rows);

  int input_count() const { return static_cast<int>(rows_.size()); }
  int output_count() const { return rows_.front().outcome_count(); }
  const Pmf& row(int input) const { return rows_[input]; }

 private:
  std::vector<Pmf> rows_;
};

// I(X; Y) for input distribution `input` over the channel inputs.
double MutualInformation(const Pmf& input, const Channel& channel);

struct CapacityResult {
  double capacity = 0.0;     // best lower bound reached (bits)
  double upper_bound = 0.0;  // max_x D(W(.|x) || p_Y) at the final iterate
  int iterations = 0;
  bool converged = false;
  std::vector<double> input_distribution;
  // I(q_t; channel) after each iteration; non-decreasing.
  std::vector<double> history;
};

inline constexpr double kDefaultCapacityTolerance = 1e-9;
inline constexpr int kDefaultCapacityMaxIters = 10000;

// Blahut-Arimoto from the uniform input. Stops once the gap between the
// upper and lower capacity bounds is below `tolerance`; otherwise returns
// the best estimate after `max_iters` with converged = false.
CapacityResult ChannelCapacity(const Channel& channel,
                               double tolerance = kDefaultCapacityTolerance,
                               int max_iters = kDefaultCapacityMaxIters);

}  // namespace icv

#endif  // ICV_INFOTHEORY_H_
