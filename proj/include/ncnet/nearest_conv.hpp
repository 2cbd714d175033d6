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

#ifndef NCNET_NEAREST_CONV_HPP_
#define NCNET_NEAREST_CONV_HPP_

#include "ncnet/nn_ops.hpp"
#include "ncnet/tensor.hpp"

namespace ncnet {

// Frozen 1x1 convolution whose kernel is s^2 stacked 3x3 identity groups:
// it replicates an RGB image s^2 times so that depth_to_space of the result
// reproduces nearest-neighbor upsampling bit-exactly. Group g feeds the
// (dy, dx) = (g / s, g % s) sub-pixel, matching the depth_to_space channel
// ordering. Never updated by the trainer.
struct NearestConvWeights {
  int scale = 1;
  ConvWeights conv;  // 1x1, 3 -> 3*scale^2, identity groups, zero bias
};

NearestConvWeights build_nearest_conv(int scale);

// Fused path: replicates the three input channels s^2 times by copy.
Tensor nearest_conv_forward(const Tensor& x, const NearestConvWeights& w);

// Literal 1x1 convolution path. Bit-identical to the fused path; kept so
// both can be timed against each other.
Tensor nearest_conv_apply_conv(const Tensor& x, const NearestConvWeights& w,
                               int threads = 1);

// Int8 variant of the fused path for the quantized pipeline: replicates
// quantized values, preserving the input's quantization params.
Tensor nearest_conv_forward_i8(const Tensor& xq, int scale);

}  // namespace ncnet

#endif  // NCNET_NEAREST_CONV_HPP_
