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

#include "icv/infotheory.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "icv/errors.h"

namespace icv {
namespace {

void RequireSameSize(const Pmf& p, const Pmf& q) {
  if (p.outcome_count() != q.outcome_count()) {
    throw ValidationError("pmf dimension mismatch: " +
                          std::to_string(p.outcome_count()) + " vs " +
                          std::to_string(q.outcome_count()));
  }
}

// p * log2(p / q) with 0 log 0 := 0; caller guarantees q > 0 when p > 0.
double KlTerm(double p, double q) {
  return p > 0.0 ? p * std::log2(p / q) : 0.0;
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("pmf needs at least one outcome");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("pmf entry outside [0, 1]: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError("pmf does not sum to 1 (sum = " +
                          std::to_string(sum) + ")");
  }
}

Pmf Pmf::Uniform(int outcome_count) {
  if (outcome_count < 1) throw ValidationError("pmf needs at least one outcome");
  return Pmf(std::vector<double>(outcome_count, 1.0 / outcome_count),
             Trusted{});
}

Pmf Pmf::PointMass(int outcome_count, int outcome) {
  if (outcome < 0 || outcome >= outcome_count) {
    throw ValidationError("point mass outcome out of range");
  }
  std::vector<double> probs(outcome_count, 0.0);
  probs[outcome] = 1.0;
  return Pmf(std::move(probs), Trusted{});
}

Pmf Pmf::Normalize(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("normalize needs finite non-negative weights");
    }
    sum += w;
  }
  if (weights.empty() || sum <= 0.0) {
    throw ValidationError("normalize needs a positive total weight");
  }
  for (double& w : weights) w /= sum;
  return Pmf(std::move(weights), Trusted{});
}

Pmf MixPmfs(const Pmf& a, const Pmf& b, double weight) {
  RequireSameSize(a, b);
  std::vector<double> mix(a.outcome_count());
  for (int x = 0; x < a.outcome_count(); ++x) {
    mix[x] = (1.0 - weight) * a[x] + weight * b[x];
  }
  return Pmf(std::move(mix), Pmf::Trusted{});
}

double Entropy(const Pmf& p) {
  double h = 0.0;
  for (double px : p.probs()) {
    if (px > 0.0) h -= px * std::log2(px);
  }
  return std::max(0.0, h);
}

double KlDivergence(const Pmf& p, const Pmf& q) {
  RequireSameSize(p, q);
  double d = 0.0;
  for (int x = 0; x < p.outcome_count(); ++x) {
    if (p[x] > 0.0 && q[x] == 0.0) {
      throw SupportError("kl divergence: q(" + std::to_string(x) +
                         ") = 0 where p > 0");
    }
    d += KlTerm(p[x], q[x]);
  }
  return std::max(0.0, d);
}

double Jsd(const Pmf& p, const Pmf& q) {
  RequireSameSize(p, q);
  double d = 0.0;
  for (int x = 0; x < p.outcome_count(); ++x) {
    const double u = 0.5 * (p[x] + q[x]);
    d += 0.5 * KlTerm(p[x], u) + 0.5 * KlTerm(q[x], u);
  }
  return std::clamp(d, 0.0, 1.0);
}

double Similarity(const Pmf& p, const Pmf& q) { return 1.0 - Jsd(p, q); }

double Peakedness(const Pmf& p) {
  return std::log2(static_cast<double>(p.outcome_count())) - Entropy(p);
}

double PointwiseConditionalMi(const Pmf& prior, const Pmf& posterior) {
  RequireSameSize(prior, posterior);
  return Entropy(prior) - Entropy(posterior);
}

Channel::Channel(std::vector<Pmf> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ValidationError("channel needs at least one input");
  for (const Pmf& row : rows_) {
    if (row.outcome_count() != rows_.front().outcome_count()) {
      throw ValidationError("channel rows differ in output count");
    }
  }
}

double MutualInformation(const Pmf& input, const Channel& channel) {
  if (input.outcome_count() != channel.input_count()) {
    throw ValidationError("input distribution does not match channel inputs");
  }
  std::vector<double> py(channel.output_count(), 0.0);
  for (int x = 0; x < channel.input_count(); ++x) {
    for (int y = 0; y < channel.output_count(); ++y) {
      py[y] += input[x] * channel.row(x)[y];
    }
  }
  double mi = 0.0;
  for (int x = 0; x < channel.input_count(); ++x) {
    if (input[x] == 0.0) continue;
    for (int y = 0; y < channel.output_count(); ++y) {
      mi += input[x] * KlTerm(channel.row(x)[y], py[y]);
    }
  }
  return std::max(0.0, mi);
}

CapacityResult ChannelCapacity(const Channel& channel, double tolerance,
                               int max_iters) {
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iters < 1) throw ValidationError("max_iters must be positive");

  const int nx = channel.input_count();
  const int ny = channel.output_count();
  std::vector<double> q(nx, 1.0 / nx);
  std::vector<double> py(ny);
  std::vector<double> divergence(nx);

  CapacityResult result;
  for (int iter = 1; iter <= max_iters; ++iter) {
    std::fill(py.begin(), py.end(), 0.0);
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) py[y] += q[x] * channel.row(x)[y];
    }
    for (int x = 0; x < nx; ++x) {
      double d = 0.0;
      for (int y = 0; y < ny; ++y) d += KlTerm(channel.row(x)[y], py[y]);
      divergence[x] = d;
    }
    // I(q) = sum_x q_x D_x; lower bound log2 sum_x q_x 2^D_x; upper max_x D_x.
    double mi = 0.0;
    double z = 0.0;
    double upper = 0.0;
    for (int x = 0; x < nx; ++x) {
      mi += q[x] * divergence[x];
      z += q[x] * std::exp2(divergence[x]);
      upper = std::max(upper, divergence[x]);
    }
    const double lower = std::log2(z);
    result.history.push_back(std::max(0.0, mi));
    result.capacity = std::max({result.capacity, lower, mi});
    result.upper_bound = upper;
    result.iterations = iter;
    result.input_distribution = q;
    if (upper - lower < tolerance) {
      result.converged = true;
      break;
    }
    for (int x = 0; x < nx; ++x) q[x] = q[x] * std::exp2(divergence[x]) / z;
  }
  result.capacity = std::max(0.0, result.capacity);
  return result;
}

}  // namespace icv
