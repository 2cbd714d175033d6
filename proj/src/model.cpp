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

#include "ncnet/model.hpp"

#include <cmath>
#include <string>

#include "ncnet/rng.hpp"
#include "ncnet/trainer.hpp"

namespace ncnet {

void ModelSpec::validate() const {
  check(scale >= 1, ErrorCode::kInvalidArgument, "model: scale must be >= 1");
  check(num_layers >= 2, ErrorCode::kInvalidArgument,
        "model: need at least 2 layers (first and last are distinct)");
  check(channels >= 1 && in_channels >= 1, ErrorCode::kInvalidArgument,
        "model: channel counts must be >= 1");
}

void ModelWeights::validate() const {
  spec.validate();
  check(static_cast<int>(layers.size()) == spec.num_layers,
        ErrorCode::kShapeMismatch, "model: layer count mismatch");
  for (int i = 0; i < spec.num_layers; ++i) {
    const ConvWeights& w = layers[i];
    w.validate();
    const int want_in = i == 0 ? spec.in_channels : spec.channels;
    const int want_out =
        i == spec.num_layers - 1 ? spec.out_channels() : spec.channels;
    check(w.c_in == want_in && w.c_out == want_out, ErrorCode::kShapeMismatch,
          "model: layer " + std::to_string(i) + " maps " +
              std::to_string(w.c_in) + "->" + std::to_string(w.c_out) +
              ", expected " + std::to_string(want_in) + "->" +
              std::to_string(want_out));
    for (float v : w.kernel)
      check(std::isfinite(v), ErrorCode::kNumeric,
            "model: non-finite kernel value in layer " + std::to_string(i));
    for (float v : w.bias)
      check(std::isfinite(v), ErrorCode::kNumeric,
            "model: non-finite bias value in layer " + std::to_string(i));
  }
  check(nearest.scale == spec.scale, ErrorCode::kShapeMismatch,
        "model: nearest-conv scale mismatch");
}

ModelWeights zero_weights(const ModelSpec& spec) {
  spec.validate();
  ModelWeights m;
  m.spec = spec;
  for (int i = 0; i < spec.num_layers; ++i) {
    const int ci = i == 0 ? spec.in_channels : spec.channels;
    const int co = i == spec.num_layers - 1 ? spec.out_channels() : spec.channels;
    m.layers.push_back(ConvWeights::make(3, 3, ci, co));
  }
  m.nearest = build_nearest_conv(spec.scale);
  return m;
}

ModelWeights init_weights(const ModelSpec& spec, uint64_t seed) {
  ModelWeights m = zero_weights(spec);
  Rng rng(seed);
  for (ConvWeights& w : m.layers) {
    const double fan_in = static_cast<double>(w.kh) * w.kw * w.c_in;
    const double fan_out = static_cast<double>(w.kh) * w.kw * w.c_out;
    const float bound = static_cast<float>(std::sqrt(6.0 / (fan_in + fan_out)));
    for (float& v : w.kernel) v = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return m;
}

ModelGrads ModelGrads::like(const ModelWeights& m) {
  ModelGrads g;
  g.kernel.resize(m.layers.size());
  g.bias.resize(m.layers.size());
  for (size_t i = 0; i < m.layers.size(); ++i) {
    g.kernel[i].assign(m.layers[i].kernel.size(), 0.0f);
    g.bias[i].assign(m.layers[i].bias.size(), 0.0f);
  }
  return g;
}

Tensor model_forward(const Tensor& y, const ModelWeights& m, int threads) {
  m.validate();
  check(y.shape().c == m.spec.in_channels, ErrorCode::kShapeMismatch,
        "model forward: input channel count mismatch");
  Tensor a = y;
  for (int i = 0; i < m.spec.num_layers; ++i) {
    Tensor z = conv2d(a, m.layers[i], threads);
    a = i < m.spec.num_layers - 1 ? relu(z) : std::move(z);
  }
  const Tensor anchor = nearest_conv_forward(y, m.nearest);
  return depth_to_space(add(a, anchor), m.spec.scale);
}

double model_forward_backward(const Tensor& y, const Tensor& target,
                              const ModelWeights& m, ModelGrads* grads,
                              int threads) {
  m.validate();
  check(grads != nullptr, ErrorCode::kInvalidArgument,
        "model backward: grads output is null");
  const int L = m.spec.num_layers;

  // Forward, keeping pre-activation outputs for the ReLU masks.
  std::vector<Tensor> inputs;   // inputs[i] feeds layer i
  std::vector<Tensor> pre;      // pre[i] = conv_i(inputs[i])
  inputs.reserve(L);
  pre.reserve(L);
  Tensor a = y;
  for (int i = 0; i < L; ++i) {
    inputs.push_back(a);
    Tensor z = conv2d(a, m.layers[i], threads);
    pre.push_back(z);
    a = i < L - 1 ? relu(z) : std::move(z);
  }
  const Tensor anchor = nearest_conv_forward(y, m.nearest);
  const Tensor out = depth_to_space(add(a, anchor), m.spec.scale);

  check(target.shape() == out.shape(), ErrorCode::kShapeMismatch,
        "model backward: target shape does not match network output");
  const double loss = l1_loss(out, target);

  // D2S is a permutation, so its adjoint is the inverse permutation; the
  // frozen branch takes no gradient.
  Tensor grad = space_to_depth(l1_loss_backward(out, target), m.spec.scale);

  *grads = ModelGrads::like(m);
  for (int i = L - 1; i >= 0; --i) {
    if (i < L - 1) grad = relu_backward(pre[i], grad);
    ConvGrads cg = conv2d_backward(inputs[i], m.layers[i], grad);
    grads->kernel[i] = std::move(cg.grad_kernel);
    grads->bias[i] = std::move(cg.grad_bias);
    grad = std::move(cg.grad_x);
  }
  return loss;
}

}  // namespace ncnet
