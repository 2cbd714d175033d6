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

#ifndef NCNET_MODEL_HPP_
#define NCNET_MODEL_HPP_

#include <cstdint>
#include <vector>

#include "ncnet/nearest_conv.hpp"
#include "ncnet/nn_ops.hpp"
#include "ncnet/tensor.hpp"

namespace ncnet {

// Plain convolution backbone in parallel with the frozen nearest-conv
// branch; the two are summed and rearranged by depth_to_space:
//
//   sr = D2S( backbone(y) + nearest_conv(y) )
//
// The backbone is num_layers 3x3 convolutions with ReLU after every layer
// except the last (the last layer emits a signed residual), no per-layer
// skip connections. The network operates on RGB values in the 0..255
// float domain; clipping/rounding happens only when an image is
// materialized, never inside the graph.
struct ModelSpec {
  int scale = 3;
  int num_layers = 7;
  int channels = 32;
  int in_channels = 3;

  int out_channels() const { return in_channels * scale * scale; }
  void validate() const;
};

struct ModelWeights {
  ModelSpec spec;
  std::vector<ConvWeights> layers;
  NearestConvWeights nearest;  // derived from spec.scale, frozen

  void validate() const;
};

// Xavier-uniform init: each kernel drawn from +-sqrt(6/(fan_in+fan_out))
// with fan = kh*kw*c, biases zero. Deterministic per seed.
ModelWeights init_weights(const ModelSpec& spec, uint64_t seed);
ModelWeights zero_weights(const ModelSpec& spec);

Tensor model_forward(const Tensor& y, const ModelWeights& m, int threads = 1);

struct ModelGrads {
  std::vector<std::vector<float>> kernel;
  std::vector<std::vector<float>> bias;

  static ModelGrads like(const ModelWeights& m);
};

// L1 loss against target plus gradients for every backbone parameter.
// The nearest-conv branch receives no gradient.
double model_forward_backward(const Tensor& y, const Tensor& target,
                              const ModelWeights& m, ModelGrads* grads,
                              int threads = 1);

}  // namespace ncnet

#endif  // NCNET_MODEL_HPP_
