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

#include "ncnet/nearest_conv.hpp"

#include <cstring>

namespace ncnet {

NearestConvWeights build_nearest_conv(int scale) {
  check(scale >= 1, ErrorCode::kInvalidArgument,
        "nearest conv: scale must be >= 1");
  NearestConvWeights w;
  w.scale = scale;
  const int groups = scale * scale;
  w.conv = ConvWeights::make(1, 1, 3, 3 * groups);
  for (int g = 0; g < groups; ++g)
    for (int c = 0; c < 3; ++c)
      w.conv.kernel[w.conv.kernel_index(0, 0, c, g * 3 + c)] = 1.0f;
  return w;
}

Tensor nearest_conv_forward(const Tensor& x, const NearestConvWeights& w) {
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "nearest conv: input must be float32");
  check(x.shape().c == 3, ErrorCode::kShapeMismatch,
        "nearest conv: input must be RGB (3 channels)");
  const Shape& sh = x.shape();
  const int groups = w.scale * w.scale;
  Tensor out = Tensor::zeros(Shape(sh.n, sh.h, sh.w, 3 * groups));
  const float* p = x.f32();
  float* o = out.f32();
  const int64_t pixels = static_cast<int64_t>(sh.n) * sh.h * sh.w;
  for (int64_t i = 0; i < pixels; ++i) {
    const float* src = p + i * 3;
    float* dst = o + i * 3 * groups;
    for (int g = 0; g < groups; ++g)
      std::memcpy(dst + g * 3, src, sizeof(float) * 3);
  }
  return out;
}

Tensor nearest_conv_apply_conv(const Tensor& x, const NearestConvWeights& w,
                               int threads) {
  check(x.shape().c == 3, ErrorCode::kShapeMismatch,
        "nearest conv: input must be RGB (3 channels)");
  return conv2d(x, w.conv, threads);
}

Tensor nearest_conv_forward_i8(const Tensor& xq, int scale) {
  check(xq.dtype() == DType::I8, ErrorCode::kInvalidArgument,
        "nearest conv: expected int8 input");
  check(xq.shape().c == 3, ErrorCode::kShapeMismatch,
        "nearest conv: input must be RGB (3 channels)");
  const Shape& sh = xq.shape();
  const int groups = scale * scale;
  Tensor out =
      Tensor::filled_i8(Shape(sh.n, sh.h, sh.w, 3 * groups), 0, xq.qparams());
  const int8_t* p = xq.i8();
  int8_t* o = out.i8();
  const int64_t pixels = static_cast<int64_t>(sh.n) * sh.h * sh.w;
  for (int64_t i = 0; i < pixels; ++i) {
    const int8_t* src = p + i * 3;
    int8_t* dst = o + i * 3 * groups;
    for (int g = 0; g < groups; ++g)
      std::memcpy(dst + g * 3, src, 3);
  }
  return out;
}

}  // namespace ncnet
