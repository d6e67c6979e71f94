/*
 * Copyright 2026 The ldpembed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LDPEMBED_PARALLEL_HPP_
#define LDPEMBED_PARALLEL_HPP_

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace ldpembed {

// Worker count from LDPEMBED_THREADS, else hardware concurrency.
int DefaultThreadCount();

// Calls fn(begin, end) on contiguous chunks of [0, n). `fn` must not throw
// and chunks must touch disjoint state.
template <typename Fn>
void ParallelChunks(std::int64_t n, int threads, Fn&& fn) {
  if (threads <= 0) threads = DefaultThreadCount();
  threads = static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(n, 1)));
  if (threads <= 1) {
    fn(std::int64_t{0}, n);
    return;
  }
  const std::int64_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ldpembed

#endif  // LDPEMBED_PARALLEL_HPP_
