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

#ifndef NCNET_PARALLEL_HPP_
#define NCNET_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace ncnet {

// Runs fn(begin, end) over contiguous chunks of [0, count). Workers own
// disjoint index ranges, so per-element results are bit-identical to the
// single-threaded run for any thread count.
void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t, int64_t)>& fn);

}  // namespace ncnet

#endif  // NCNET_PARALLEL_HPP_
