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

// Small weighted discrete distributions over reals.

#ifndef REGRET_MINER_DISTRIBUTION_HPP_
#define REGRET_MINER_DISTRIBUTION_HPP_

#include <cstddef>
#include <map>
#include <span>

namespace regret_miner {

// Support point -> weight. Equal support points merge.
using DiscreteDistribution = std::map<double, double>;

// Distribution of the sum of two independent variables. When the support
// grows past `max_support`, neighbouring points are merged pairwise at their
// weighted mean.
DiscreteDistribution Convolve(const DiscreteDistribution& a,
                              const DiscreteDistribution& b,
                              std::size_t max_support = 4096);

DiscreteDistribution FromWeighted(std::span<const double> values,
                                  std::span<const double> weights);

// Smallest support value whose cumulative normalized weight reaches q.
double LowerQuantile(const DiscreteDistribution& dist, double q);

}  // namespace regret_miner

#endif  // REGRET_MINER_DISTRIBUTION_HPP_
