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

#include "ncnet/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "ncnet/error.hpp"

namespace ncnet {

PsnrResult psnr(const ImageBuffer& a, const ImageBuffer& b) {
  check(a.width == b.width && a.height == b.height, ErrorCode::kShapeMismatch,
        "psnr: image dimensions differ");
  check(!a.pixels.empty() && a.pixels.size() == b.pixels.size(),
        ErrorCode::kInvalidArgument, "psnr: invalid image buffers");
  double sse = 0.0;
  const size_t count = a.pixels.size();
  for (size_t i = 0; i < count; ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sse += d * d;
  }
  PsnrResult r;
  r.mse = sse / static_cast<double>(count);
  if (r.mse == 0.0) {
    r.is_infinite = true;
  } else {
    r.psnr_db = 10.0 * std::log10(255.0 * 255.0 / r.mse);
  }
  return r;
}

double psnr_over_set(const std::vector<PsnrResult>& per_image, int* excluded) {
  check(!per_image.empty(), ErrorCode::kInvalidArgument,
        "psnr_over_set: empty list");
  double sum = 0.0;
  int skipped = 0, used = 0;
  for (const PsnrResult& r : per_image) {
    if (r.is_infinite) {
      ++skipped;
      continue;
    }
    sum += r.psnr_db;
    ++used;
  }
  if (skipped > 0)
    std::fprintf(stderr, "psnr_over_set: excluded %d identical pair(s)\n",
                 skipped);
  if (excluded) *excluded = skipped;
  check(used > 0, ErrorCode::kInvalidArgument,
        "psnr_over_set: every pair was identical");
  return sum / used;
}

}  // namespace ncnet
