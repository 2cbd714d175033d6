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

#ifndef NCNET_BENCH_HPP_
#define NCNET_BENCH_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ncnet/tensor.hpp"

namespace ncnet {

// One timed graph. setup(threads) prepares inputs and returns the
// closure that executes the graph once and returns a checksum of its
// output (used as a determinism guard across repetitions).
struct BenchCase {
  std::string name;   // row naming follows the operator/arrangement tables
  std::string group;  // "tensor-op" | "conv-net" | "upsample"
  std::string dtype;  // "f32" | "i8"
  std::function<std::function<uint64_t()>(int threads)> setup;
};

// The standard suite at the 1x360x640x3 working shape: the single-node
// operator matrix (Conv3 - f3-16 plus appended elementwise ops and
// dilation), the stacked-conv arrangements (Conv1/3/5, widths 3..32,
// two-layer combinations), and the upsampler comparison at s=3. Each row
// name appears exactly once per dtype; i8 covers the rows the integer
// engine implements.
std::vector<BenchCase> standard_suite(const std::string& dtype = "f32");

struct BenchCaseResult {
  std::string name, group, dtype;
  std::vector<double> samples_ms;
  double median_ms = 0.0, mean_ms = 0.0, p95_ms = 0.0;
  uint64_t checksum = 0;
  bool ok = true;
  std::string error;
};

struct BenchReport {
  std::vector<BenchCaseResult> cases;
  int reps = 0, warmups = 0, threads = 0;
  std::string cpu_model;
};

// Runs every case sequentially: `warmups` discarded runs (>= 3), then
// `reps` timed runs (>= 10) of the same prepared input on a monotonic
// clock. A failing graph marks its case failed; the suite continues.
BenchReport run_suite(const std::vector<BenchCase>& cases, int reps,
                      int warmups, int threads);

std::string emit_markdown(const BenchReport& report);
std::string emit_csv(const BenchReport& report);

uint64_t fnv1a(const void* data, size_t size);

}  // namespace ncnet

#endif  // NCNET_BENCH_HPP_
