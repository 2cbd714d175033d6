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

#ifndef NCNET_QUANTIZE_HPP_
#define NCNET_QUANTIZE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "ncnet/image.hpp"
#include "ncnet/model.hpp"
#include "ncnet/tensor.hpp"

namespace ncnet {

// Running (min, max) of one graph edge.
struct MinMax {
  float min = 0.0f;
  float max = 0.0f;
  bool seen = false;

  void update(float v) {
    if (!seen) {
      min = max = v;
      seen = true;
      return;
    }
    if (v < min) min = v;
    if (v > max) max = v;
  }
  void merge(const MinMax& o);
};

// Min/max per activation edge, aggregated over a calibration image set.
// Edge layout for a model with L backbone layers:
//   0          network input
//   1 .. L-1   post-ReLU output of layer i-1
//   L          residual output (last layer, no ReLU)
//   L+1        nearest-conv branch output
//   L+2        residual + nearest sum (pre-D2S)
struct CalibrationStats {
  std::vector<MinMax> edges;
  int images_seen = 0;

  void merge(const CalibrationStats& o);
  void validate(int num_layers) const;
};

CalibrationStats calibrate(const ModelWeights& m,
                           const std::vector<ImageBuffer>& images,
                           int threads = 1);

// real_multiplier ~= multiplier * 2^(-31) * 2^(exponent), with the int32
// multiplier normalized into [2^30, 2^31).
struct FixedPointMultiplier {
  int32_t multiplier = 0;
  int exponent = 0;
};

FixedPointMultiplier quantize_multiplier(double real_multiplier);

// acc * multiplier with round-half-away-from-zero, integer-only.
int32_t requantize(int32_t acc, const FixedPointMultiplier& m);

// Asymmetric int8 params from a calibrated range. The range is widened to
// include zero so that real 0 is exactly representable; degenerate ranges
// fall back to a floored scale.
QuantParams choose_activation_qparams(float min, float max);

// Symmetric per-tensor weight scale: max|w| / 127, floored at 1e-8 for
// all-zero tensors (with a warning).
float choose_weight_scale(const std::vector<float>& w);

struct QuantizedLayer {
  int kh = 0, kw = 0, c_in = 0, c_out = 0;
  Tensor kernel;               // int8, qparams (w_scale, 0)
  std::vector<int32_t> bias;   // scale = in_scale * w_scale, zero_point 0
  float bias_scale = 0.0f;
  QuantParams in_qp, out_qp;
  FixedPointMultiplier requant;  // in_scale * w_scale / out_scale
  bool apply_relu = false;
};

// Fully integer NCNet: int8 kernels, int32 biases, per-edge activation
// params, fixed-point requantization. The residual add runs in the
// quantized domain with both branches rescaled to the sum edge.
struct QuantizedModel {
  int scale = 3;
  int num_layers = 0;
  int channels = 0;
  std::vector<QuantizedLayer> layers;
  QuantParams input_qp, residual_qp, nearest_qp, sum_qp;
  FixedPointMultiplier residual_to_sum, input_to_sum;

  void finalize_multipliers();  // derives requant multipliers from scales
  void validate() const;
};

QuantizedModel quantize_model(const ModelWeights& m,
                              const CalibrationStats& stats);

// int8 convolution: int32 accumulation, fixed-point requantization,
// optional ReLU as a clamp at the output zero point.
Tensor qconv2d(const Tensor& xq, const QuantizedLayer& layer, int threads = 1);

Tensor quantize_image(const ImageBuffer& img, QuantParams qp);
ImageBuffer quantized_forward(const ImageBuffer& img, const QuantizedModel& qm,
                              int threads = 1);

struct ParityReport {
  double psnr_float_db = 0.0;
  double psnr_int8_db = 0.0;
  double delta_db = 0.0;  // float - int8
};

// PSNR of the float and int8 paths against ground truth over a set of
// (LR, HR) pairs.
ParityReport parity_report(
    const ModelWeights& m, const QuantizedModel& qm,
    const std::vector<std::pair<ImageBuffer, ImageBuffer>>& lr_hr_pairs,
    int threads = 1);

}  // namespace ncnet

#endif  // NCNET_QUANTIZE_HPP_
