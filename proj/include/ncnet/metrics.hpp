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

#ifndef NCNET_METRICS_HPP_
#define NCNET_METRICS_HPP_

#include <vector>

#include "ncnet/image.hpp"

namespace ncnet {

struct PsnrResult {
  double mse = 0.0;       // over all 3*H*W values, 0..255 domain
  double psnr_db = 0.0;   // 10*log10(255^2 / mse); meaningless when infinite
  bool is_infinite = false;
};

// PSNR in RGB space over the full frame: no border cropping, no luma
// conversion. Dimensions must match.
PsnrResult psnr(const ImageBuffer& a, const ImageBuffer& b);

// Arithmetic mean of per-image PSNR (not PSNR of the pooled MSE), the
// usual benchmark convention. Infinite members are excluded with a
// warning; their count is reported through excluded if non-null.
double psnr_over_set(const std::vector<PsnrResult>& per_image,
                     int* excluded = nullptr);

}  // namespace ncnet

#endif  // NCNET_METRICS_HPP_
