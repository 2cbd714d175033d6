// Copyright 2026 The NCSR Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ncnet/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace ncnet {

void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t, int64_t)>& fn) {
  if (count <= 0) return;
  threads = std::max(1, static_cast<int>(std::min<int64_t>(threads, count)));
  if (threads == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  const int64_t chunk = (count + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    const int64_t begin = t * chunk;
    const int64_t end = std::min<int64_t>(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back(fn, begin, end);
  }
  fn(0, std::min<int64_t>(chunk, count));
  for (auto& th : pool) th.join();
}

}  // namespace ncnet
