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

#ifndef NCNET_NN_OPS_HPP_
#define NCNET_NN_OPS_HPP_

#include <cstdint>
#include <vector>

#include "ncnet/tensor.hpp"

namespace ncnet {

enum class Padding { kSame, kValid };

// Float convolution weights in [kh][kw][c_in][c_out] layout (channel
// vectors contiguous, matching the NHWC activation layout).
// Same padding requires odd kernels; the symmetric pad is dilation*(k-1)/2.
struct ConvWeights {
  int kh = 0, kw = 0, c_in = 0, c_out = 0;
  std::vector<float> kernel;
  std::vector<float> bias;
  int stride = 1;
  Padding padding = Padding::kSame;
  int dilation = 1;

  static ConvWeights make(int kh, int kw, int c_in, int c_out, int stride = 1,
                          Padding padding = Padding::kSame, int dilation = 1);

  int64_t kernel_index(int ky, int kx, int ci, int co) const {
    return ((static_cast<int64_t>(ky) * kw + kx) * c_in + ci) * c_out + co;
  }
  void validate() const;
};

// Output spatial extents for a given input, after validation.
struct ConvOutExtents {
  int oh = 0, ow = 0, pad_h = 0, pad_w = 0;
};
ConvOutExtents conv_out_extents(int h, int w, const ConvWeights& cw);

// Cross-correlation (no kernel flip), zero padding, f32 accumulation in
// fixed (kh, kw, c_in) ascending order per output element. Deterministic:
// identical inputs produce bit-identical outputs for any thread count.
Tensor conv2d(const Tensor& x, const ConvWeights& w, int threads = 1);

struct ConvGrads {
  Tensor grad_x;
  std::vector<float> grad_kernel;
  std::vector<float> grad_bias;
};

// Exact gradients of conv2d with respect to input, kernel and bias.
ConvGrads conv2d_backward(const Tensor& x, const ConvWeights& w,
                          const Tensor& grad_out);

Tensor relu(const Tensor& x);
// Masks grad_out where x <= 0 (the gradient at exactly 0 is defined as 0).
Tensor relu_backward(const Tensor& x, const Tensor& grad_out);

Tensor leaky_relu(const Tensor& x, float alpha = 0.2f);

// Rearranges (n, h, w, c) into (n, h*s, w*s, c/s^2):
//   out[n, h*s+dy, w*s+dx, c] = in[n, h, w, (dy*s+dx)*(c_in/s^2) + c]
// i.e. channel blocks are row-major over the (dy, dx) sub-pixel grid,
// each block holding a full output-channel vector. Works for F32 and I8.
Tensor depth_to_space(const Tensor& x, int s);

// Exact inverse of depth_to_space; h and w must be divisible by s.
Tensor space_to_depth(const Tensor& x, int s);

// out[n, h, w, c] = in[n, floor(h/s), floor(w/s), c]; F32 or I8 values
// pass through untouched.
Tensor nearest_upsample(const Tensor& x, int s);

// Half-pixel-aligned bilinear: source coord = (dst + 0.5)/s - 0.5,
// edge-clamped. F32 only.
Tensor bilinear_upsample(const Tensor& x, int s);

Tensor multiply(const Tensor& a, const Tensor& b);
Tensor concat_channels(const Tensor& a, const Tensor& b);
std::vector<Tensor> split_channels(const Tensor& x, int parts);
Tensor global_avgpool(const Tensor& x);
Tensor global_maxpool(const Tensor& x);

}  // namespace ncnet

#endif  // NCNET_NN_OPS_HPP_
