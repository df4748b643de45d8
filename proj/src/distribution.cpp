// Copyright 2026 The regret_miner Authors
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

#include "regret_miner/distribution.hpp"

#include <cmath>
#include <iterator>

#include "regret_miner/core.hpp"

namespace regret_miner {

DiscreteDistribution Convolve(const DiscreteDistribution& a,
                              const DiscreteDistribution& b,
                              std::size_t max_support) {
  DiscreteDistribution out;
  for (const auto& [va, pa] : a) {
    for (const auto& [vb, pb] : b) out[va + vb] += pa * pb;
  }
  while (out.size() > max_support && max_support >= 1) {
    DiscreteDistribution merged;
    for (auto it = out.begin(); it != out.end();) {
      auto next = std::next(it);
      if (next == out.end()) {
        merged[it->first] += it->second;
        break;
      }
      const double w = it->second + next->second;
      const double v =
          w > 0.0 ? (it->first * it->second + next->first * next->second) / w
                  : it->first;
      merged[v] += w;
      it = std::next(next);
    }
    out = std::move(merged);
  }
  return out;
}

DiscreteDistribution FromWeighted(std::span<const double> values,
                                  std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "values and weights differ in length");
  }
  DiscreteDistribution out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !(weights[i] >= 0.0)) {
      throw Error(ErrorCode::kNonFinite, "invalid distribution entry");
    }
    out[values[i]] += weights[i];
  }
  return out;
}

double LowerQuantile(const DiscreteDistribution& dist, double q) {
  double total = 0.0;
  for (const auto& [v, w] : dist) total += w;
  if (dist.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile of an empty distribution");
  }
  double acc = 0.0;
  for (const auto& [v, w] : dist) {
    acc += w / total;
    if (acc >= q - 1e-12) return v;
  }
  return std::prev(dist.end())->first;
}

}  // namespace regret_miner
