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

#include "ncnet/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ncnet/metrics.hpp"
#include "ncnet/parallel.hpp"

namespace ncnet {

namespace {
constexpr float kScaleFloor = 1e-8f;
}

void MinMax::merge(const MinMax& o) {
  if (!o.seen) return;
  update(o.min);
  update(o.max);
}

void CalibrationStats::merge(const CalibrationStats& o) {
  check(edges.size() == o.edges.size() || edges.empty(),
        ErrorCode::kShapeMismatch, "calibration: edge count mismatch");
  if (edges.empty()) edges.resize(o.edges.size());
  for (size_t i = 0; i < edges.size(); ++i) edges[i].merge(o.edges[i]);
  images_seen += o.images_seen;
}

void CalibrationStats::validate(int num_layers) const {
  check(images_seen >= 1, ErrorCode::kInvalidArgument,
        "calibration: no images seen");
  check(static_cast<int>(edges.size()) == num_layers + 3,
        ErrorCode::kShapeMismatch, "calibration: wrong edge count");
  for (size_t i = 0; i < edges.size(); ++i) {
    check(edges[i].seen, ErrorCode::kInvalidArgument,
          "calibration: edge " + std::to_string(i) + " has no statistics");
    check(edges[i].min <= edges[i].max, ErrorCode::kNumeric,
          "calibration: inverted range on edge " + std::to_string(i));
  }
}

CalibrationStats calibrate(const ModelWeights& m,
                           const std::vector<ImageBuffer>& images,
                           int threads) {
  m.validate();
  check(!images.empty(), ErrorCode::kInvalidArgument,
        "calibration: need at least one image");
  const int L = m.spec.num_layers;
  CalibrationStats stats;
  stats.edges.resize(L + 3);

  auto record = [&stats](int edge, const Tensor& t) {
    const auto [lo, hi] = minmax(t);
    stats.edges[edge].update(lo);
    stats.edges[edge].update(hi);
  };

  for (const ImageBuffer& img : images) {
    const Tensor y = img_to_tensor(img);
    record(0, y);
    Tensor a = y;
    for (int i = 0; i < L; ++i) {
      Tensor z = conv2d(a, m.layers[i], threads);
      a = i < L - 1 ? relu(z) : std::move(z);
      record(i + 1, a);
    }
    const Tensor anchor = nearest_conv_forward(y, m.nearest);
    record(L + 1, anchor);
    record(L + 2, add(a, anchor));
    ++stats.images_seen;
  }
  return stats;
}

FixedPointMultiplier quantize_multiplier(double real_multiplier) {
  check(real_multiplier >= 0.0, ErrorCode::kInvalidArgument,
        "quantize_multiplier: negative multiplier");
  FixedPointMultiplier out;
  if (real_multiplier == 0.0) return out;
  int exp = 0;
  const double mant = std::frexp(real_multiplier, &exp);  // mant in [0.5, 1)
  int64_t q = std::llround(mant * (int64_t{1} << 31));
  if (q == int64_t{1} << 31) {
    q >>= 1;
    ++exp;
  }
  out.multiplier = static_cast<int32_t>(q);
  out.exponent = exp;
  return out;
}

int32_t requantize(int32_t acc, const FixedPointMultiplier& m) {
  if (m.multiplier == 0) return 0;
  const int64_t p = static_cast<int64_t>(acc) * m.multiplier;
  const int shift = 31 - m.exponent;
  int64_t q;
  if (shift <= 0) {
    if (-shift > 62) {
      q = p > 0 ? std::numeric_limits<int64_t>::max()
                : p < 0 ? std::numeric_limits<int64_t>::min() : 0;
    } else {
      const unsigned __int128 mag =
          static_cast<unsigned __int128>(p < 0 ? -p : p) << (-shift);
      const unsigned __int128 cap = std::numeric_limits<int64_t>::max();
      q = static_cast<int64_t>(mag > cap ? cap : mag);
      if (p < 0) q = -q;
    }
  } else if (shift > 62) {
    q = 0;  // |p| < 2^62, rounds to zero
  } else {
    const int64_t half = int64_t{1} << (shift - 1);
    q = p >= 0 ? (p + half) >> shift : -((-p + half) >> shift);
  }
  q = std::clamp<int64_t>(q, std::numeric_limits<int32_t>::min(),
                          std::numeric_limits<int32_t>::max());
  return static_cast<int32_t>(q);
}

QuantParams choose_activation_qparams(float min, float max) {
  check(min <= max, ErrorCode::kInvalidArgument,
        "choose_activation_qparams: inverted range");
  // Widen to include 0 so the real value 0 maps to an exact int8.
  const double lo = std::min(0.0, static_cast<double>(min));
  const double hi = std::max(0.0, static_cast<double>(max));
  QuantParams qp;
  qp.scale = static_cast<float>((hi - lo) / 255.0);
  if (qp.scale < kScaleFloor) {
    std::fprintf(stderr,
                 "quantize: degenerate activation range [%g, %g], flooring "
                 "scale\n", lo, hi);
    qp.scale = kScaleFloor;
  }
  const int64_t zp = std::llround(-128.0 - lo / qp.scale);
  qp.zero_point = static_cast<int32_t>(std::clamp<int64_t>(zp, -128, 127));
  return qp;
}

float choose_weight_scale(const std::vector<float>& w) {
  float maxabs = 0.0f;
  for (float v : w) maxabs = std::max(maxabs, std::fabs(v));
  float scale = maxabs / 127.0f;
  if (scale < kScaleFloor) {
    std::fprintf(stderr, "quantize: all-zero weight tensor, flooring scale\n");
    scale = kScaleFloor;
  }
  return scale;
}

void QuantizedModel::finalize_multipliers() {
  for (QuantizedLayer& l : layers) {
    const double m = static_cast<double>(l.in_qp.scale) *
                     l.kernel.qparams().scale / l.out_qp.scale;
    l.requant = quantize_multiplier(m);
    l.bias_scale = static_cast<float>(static_cast<double>(l.in_qp.scale) *
                                      l.kernel.qparams().scale);
  }
  residual_to_sum = quantize_multiplier(static_cast<double>(residual_qp.scale) /
                                        sum_qp.scale);
  input_to_sum = quantize_multiplier(static_cast<double>(input_qp.scale) /
                                     sum_qp.scale);
}

void QuantizedModel::validate() const {
  check(scale >= 1 && num_layers >= 2, ErrorCode::kInvalidArgument,
        "quantized model: bad geometry");
  check(static_cast<int>(layers.size()) == num_layers,
        ErrorCode::kShapeMismatch, "quantized model: layer count mismatch");
  for (const QuantizedLayer& l : layers) {
    check(l.kernel.dtype() == DType::I8, ErrorCode::kInvalidArgument,
          "quantized model: kernel must be int8");
    check(l.bias.size() == static_cast<size_t>(l.c_out),
          ErrorCode::kShapeMismatch, "quantized model: bias length mismatch");
    const int32_t mult = l.requant.multiplier;
    check(mult == 0 || (mult >= (int32_t{1} << 30)), ErrorCode::kNumeric,
          "quantized model: requant multiplier not normalized");
  }
}

QuantizedModel quantize_model(const ModelWeights& m,
                              const CalibrationStats& stats) {
  m.validate();
  const int L = m.spec.num_layers;
  stats.validate(L);

  auto edge_qp = [&stats](int i) {
    return choose_activation_qparams(stats.edges[i].min, stats.edges[i].max);
  };

  QuantizedModel qm;
  qm.scale = m.spec.scale;
  qm.num_layers = L;
  qm.channels = m.spec.channels;
  qm.input_qp = edge_qp(0);
  qm.residual_qp = edge_qp(L);
  qm.nearest_qp = edge_qp(L + 1);
  qm.sum_qp = edge_qp(L + 2);

  for (int i = 0; i < L; ++i) {
    const ConvWeights& w = m.layers[i];
    QuantizedLayer l;
    l.kh = w.kh;
    l.kw = w.kw;
    l.c_in = w.c_in;
    l.c_out = w.c_out;
    l.apply_relu = i < L - 1;
    l.in_qp = edge_qp(i);
    l.out_qp = edge_qp(i + 1);

    const float w_scale = choose_weight_scale(w.kernel);
    Tensor kq = Tensor::filled_i8(Shape(w.kh, w.kw, w.c_in, w.c_out), 0,
                                  QuantParams{w_scale, 0});
    int8_t* kp = kq.i8();
    for (size_t j = 0; j < w.kernel.size(); ++j) {
      const int64_t q = std::llround(static_cast<double>(w.kernel[j]) / w_scale);
      kp[j] = static_cast<int8_t>(std::clamp<int64_t>(q, -127, 127));
    }
    l.kernel = std::move(kq);

    const double bscale = static_cast<double>(l.in_qp.scale) * w_scale;
    l.bias.resize(w.bias.size());
    for (size_t j = 0; j < w.bias.size(); ++j) {
      const int64_t q = std::llround(static_cast<double>(w.bias[j]) / bscale);
      l.bias[j] = static_cast<int32_t>(
          std::clamp<int64_t>(q, std::numeric_limits<int32_t>::min(),
                              std::numeric_limits<int32_t>::max()));
    }
    qm.layers.push_back(std::move(l));
  }
  qm.finalize_multipliers();
  qm.validate();
  return qm;
}

Tensor qconv2d(const Tensor& xq, const QuantizedLayer& layer, int threads) {
  check(xq.dtype() == DType::I8, ErrorCode::kInvalidArgument,
        "qconv2d: input must be int8");
  check(xq.shape().c == layer.c_in, ErrorCode::kShapeMismatch,
        "qconv2d: input channel mismatch");
  const int N = xq.shape().n, H = xq.shape().h, W = xq.shape().w;
  const int KH = layer.kh, KW = layer.kw, CI = layer.c_in, CO = layer.c_out;
  check(KH % 2 == 1 && KW % 2 == 1, ErrorCode::kInvalidArgument,
        "qconv2d: kernels must be odd (Same padding)");
  const int pad_h = (KH - 1) / 2, pad_w = (KW - 1) / 2;

  Tensor out = Tensor::filled_i8(Shape(N, H, W, CO), 0, layer.out_qp);
  const int8_t* xp = xq.i8();
  const int8_t* kp = layer.kernel.i8();
  int8_t* op = out.i8();
  const int32_t zp_in = xq.qparams().zero_point;
  const int32_t zp_out = layer.out_qp.zero_point;
  const int32_t q_lo = layer.apply_relu ? std::max(-128, zp_out) : -128;

  parallel_for(static_cast<int64_t>(N) * H, threads,
               [&](int64_t begin, int64_t end) {
    std::vector<int32_t> acc(CO);
    for (int64_t row = begin; row < end; ++row) {
      const int n = static_cast<int>(row / H);
      const int oh = static_cast<int>(row % H);
      for (int ow = 0; ow < W; ++ow) {
        std::copy(layer.bias.begin(), layer.bias.end(), acc.begin());
        for (int ky = 0; ky < KH; ++ky) {
          const int ih = oh + ky - pad_h;
          if (ih < 0 || ih >= H) continue;
          for (int kx = 0; kx < KW; ++kx) {
            const int iw = ow + kx - pad_w;
            if (iw < 0 || iw >= W) continue;
            const int8_t* xrow =
                xp + ((static_cast<int64_t>(n) * H + ih) * W + iw) * CI;
            const int8_t* kblk =
                kp + (static_cast<int64_t>(ky) * KW + kx) * CI * CO;
            for (int ci = 0; ci < CI; ++ci) {
              const int32_t xv = static_cast<int32_t>(xrow[ci]) - zp_in;
              const int8_t* krow = kblk + static_cast<int64_t>(ci) * CO;
              for (int co = 0; co < CO; ++co)
                acc[co] += xv * static_cast<int32_t>(krow[co]);
            }
          }
        }
        int8_t* orow = op + ((static_cast<int64_t>(n) * H + oh) * W + ow) * CO;
        for (int co = 0; co < CO; ++co) {
          const int32_t v = requantize(acc[co], layer.requant) + zp_out;
          orow[co] = static_cast<int8_t>(std::clamp(v, q_lo, 127));
        }
      }
    }
  });
  return out;
}

Tensor quantize_image(const ImageBuffer& img, QuantParams qp) {
  Tensor out = Tensor::filled_i8(Shape(1, img.height, img.width, 3), 0, qp);
  int8_t* p = out.i8();
  const size_t count = img.pixels.size();
  for (size_t i = 0; i < count; ++i) {
    const int64_t q =
        std::llround(static_cast<double>(img.pixels[i]) / qp.scale) +
        qp.zero_point;
    p[i] = static_cast<int8_t>(std::clamp<int64_t>(q, -128, 127));
  }
  return out;
}

ImageBuffer quantized_forward(const ImageBuffer& img, const QuantizedModel& qm,
                              int threads) {
  qm.validate();
  const Tensor input_q = quantize_image(img, qm.input_qp);

  Tensor a = input_q;
  for (const QuantizedLayer& l : qm.layers) a = qconv2d(a, l, threads);

  // Residual add in the quantized domain: both branches rescaled to the
  // sum edge. The nearest branch is a copy, so it carries the input
  // edge's params.
  const Tensor ncq = nearest_conv_forward_i8(input_q, qm.scale);
  check(a.shape() == ncq.shape(), ErrorCode::kShapeMismatch,
        "quantized forward: branch shapes differ");
  Tensor sum = Tensor::filled_i8(a.shape(), 0, qm.sum_qp);
  {
    const int8_t* rp = a.i8();
    const int8_t* np = ncq.i8();
    int8_t* sp = sum.i8();
    const int32_t zp_res = qm.residual_qp.zero_point;
    const int32_t zp_in = qm.input_qp.zero_point;
    const int32_t zp_sum = qm.sum_qp.zero_point;
    const int64_t count = sum.elems();
    for (int64_t i = 0; i < count; ++i) {
      const int32_t v =
          requantize(static_cast<int32_t>(rp[i]) - zp_res, qm.residual_to_sum) +
          requantize(static_cast<int32_t>(np[i]) - zp_in, qm.input_to_sum) +
          zp_sum;
      sp[i] = static_cast<int8_t>(std::clamp(v, -128, 127));
    }
  }

  const Tensor hr_q = depth_to_space(sum, qm.scale);
  ImageBuffer out = ImageBuffer::create(hr_q.shape().w, hr_q.shape().h);
  const int8_t* p = hr_q.i8();
  const double s = qm.sum_qp.scale;
  const int32_t zp = qm.sum_qp.zero_point;
  const size_t count = out.pixels.size();
  for (size_t i = 0; i < count; ++i) {
    double v = s * (static_cast<int32_t>(p[i]) - zp);
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    out.pixels[i] = static_cast<uint8_t>(std::llround(v));
  }
  return out;
}

ParityReport parity_report(
    const ModelWeights& m, const QuantizedModel& qm,
    const std::vector<std::pair<ImageBuffer, ImageBuffer>>& lr_hr_pairs,
    int threads) {
  check(!lr_hr_pairs.empty(), ErrorCode::kInvalidArgument,
        "parity_report: empty pair list");
  std::vector<PsnrResult> f32_scores, i8_scores;
  for (const auto& [lr, hr] : lr_hr_pairs) {
    const ImageBuffer sr_f32 =
        tensor_to_img(model_forward(img_to_tensor(lr), m, threads));
    const ImageBuffer sr_i8 = quantized_forward(lr, qm, threads);
    f32_scores.push_back(psnr(sr_f32, hr));
    i8_scores.push_back(psnr(sr_i8, hr));
  }
  ParityReport r;
  r.psnr_float_db = psnr_over_set(f32_scores);
  r.psnr_int8_db = psnr_over_set(i8_scores);
  r.delta_db = r.psnr_float_db - r.psnr_int8_db;
  return r;
}

}  // namespace ncnet
