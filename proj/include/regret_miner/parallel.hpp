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

#ifndef REGRET_MINER_PARALLEL_HPP_
#define REGRET_MINER_PARALLEL_HPP_

#include <cstddef>
#include <functional>
#include <vector>

namespace regret_miner {

// Hardware concurrency, capped by REGRET_MINER_THREADS when set to a positive
// integer.
int WorkerCount();

// Calls fn(i) for i in [0, n) on up to WorkerCount() threads. Results must be
// written to per-index slots; output is then independent of the thread count.
// The exception of the lowest failing index is rethrown.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

template <typename T, typename F>
std::vector<T> ParallelMap(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  ParallelFor(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace regret_miner

#endif  // REGRET_MINER_PARALLEL_HPP_
