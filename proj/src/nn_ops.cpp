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

#include "ncnet/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "ncnet/parallel.hpp"

namespace ncnet {

ConvWeights ConvWeights::make(int kh, int kw, int c_in, int c_out, int stride,
                              Padding padding, int dilation) {
  ConvWeights w;
  w.kh = kh;
  w.kw = kw;
  w.c_in = c_in;
  w.c_out = c_out;
  w.stride = stride;
  w.padding = padding;
  w.dilation = dilation;
  w.kernel.assign(static_cast<size_t>(kh) * kw * c_in * c_out, 0.0f);
  w.bias.assign(static_cast<size_t>(c_out), 0.0f);
  w.validate();
  return w;
}

void ConvWeights::validate() const {
  check(kh >= 1 && kw >= 1 && c_in >= 1 && c_out >= 1,
        ErrorCode::kInvalidArgument, "conv weights: extents must be >= 1");
  check(stride >= 1 && dilation >= 1, ErrorCode::kInvalidArgument,
        "conv weights: stride and dilation must be >= 1");
  check(kernel.size() == static_cast<size_t>(kh) * kw * c_in * c_out,
        ErrorCode::kShapeMismatch, "conv weights: kernel size mismatch");
  check(bias.size() == static_cast<size_t>(c_out), ErrorCode::kShapeMismatch,
        "conv weights: bias length must equal c_out");
  if (padding == Padding::kSame) {
    check(kh % 2 == 1 && kw % 2 == 1, ErrorCode::kInvalidArgument,
          "conv weights: Same padding requires odd kernel extents");
  }
}

ConvOutExtents conv_out_extents(int h, int w, const ConvWeights& cw) {
  cw.validate();
  ConvOutExtents e;
  const int eff_h = cw.dilation * (cw.kh - 1) + 1;
  const int eff_w = cw.dilation * (cw.kw - 1) + 1;
  if (cw.padding == Padding::kSame) {
    e.pad_h = cw.dilation * (cw.kh - 1) / 2;
    e.pad_w = cw.dilation * (cw.kw - 1) / 2;
  }
  const int span_h = h + 2 * e.pad_h - eff_h;
  const int span_w = w + 2 * e.pad_w - eff_w;
  check(span_h >= 0 && span_w >= 0, ErrorCode::kShapeMismatch,
        "conv2d: input smaller than the effective kernel extent");
  e.oh = span_h / cw.stride + 1;
  e.ow = span_w / cw.stride + 1;
  return e;
}

Tensor conv2d(const Tensor& x, const ConvWeights& w, int threads) {
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "conv2d: input must be float32");
  check(x.shape().c == w.c_in, ErrorCode::kShapeMismatch,
        "conv2d: input has " + std::to_string(x.shape().c) +
            " channels, weights expect " + std::to_string(w.c_in));
  const ConvOutExtents e = conv_out_extents(x.shape().h, x.shape().w, w);

  const int N = x.shape().n, H = x.shape().h, W = x.shape().w;
  const int CI = w.c_in, CO = w.c_out;
  Tensor out = Tensor::zeros(Shape(N, e.oh, e.ow, CO));

  const float* __restrict__ xp = x.f32();
  const float* __restrict__ kp = w.kernel.data();
  const float* __restrict__ bp = w.bias.data();
  float* __restrict__ op = out.f32();

  // One (n, oh) row per work item. Per output element the accumulation
  // order is kh, kw, c_in ascending regardless of partitioning.
  parallel_for(static_cast<int64_t>(N) * e.oh, threads,
               [&](int64_t begin, int64_t end) {
    for (int64_t row = begin; row < end; ++row) {
      const int n = static_cast<int>(row / e.oh);
      const int oh = static_cast<int>(row % e.oh);
      float* orow = op + (static_cast<int64_t>(n) * e.oh + oh) *
                             e.ow * CO;
      for (int ow = 0; ow < e.ow; ++ow)
        std::memcpy(orow + static_cast<int64_t>(ow) * CO, bp,
                    sizeof(float) * CO);
      for (int ky = 0; ky < w.kh; ++ky) {
        const int ih = oh * w.stride + ky * w.dilation - e.pad_h;
        if (ih < 0 || ih >= H) continue;
        for (int kx = 0; kx < w.kw; ++kx) {
          // Valid output-column range for this tap:
          // iw = ow*stride + kx*dilation - pad_w must land in [0, W).
          const int off = kx * w.dilation - e.pad_w;
          const int lo = off < 0 ? (-off + w.stride - 1) / w.stride : 0;
          const int hi = off > W - 1
                             ? 0
                             : std::min(e.ow, (W - 1 - off) / w.stride + 1);
          const float* kblk = kp + (static_cast<int64_t>(ky) * w.kw + kx) *
                                       CI * CO;
          const float* xrowbase =
              xp + (static_cast<int64_t>(n) * H + ih) * W * CI;
          for (int ow = lo; ow < hi; ++ow) {
            const int iw = ow * w.stride + off;
            const float* __restrict__ xrow =
                xrowbase + static_cast<int64_t>(iw) * CI;
            float* __restrict__ acc = orow + static_cast<int64_t>(ow) * CO;
            for (int ci = 0; ci < CI; ++ci) {
              const float xv = xrow[ci];
              const float* __restrict__ krow = kblk + static_cast<int64_t>(ci) * CO;
              for (int co = 0; co < CO; ++co) acc[co] += xv * krow[co];
            }
          }
        }
      }
    }
  });
  return out;
}

ConvGrads conv2d_backward(const Tensor& x, const ConvWeights& w,
                          const Tensor& grad_out) {
  check(x.dtype() == DType::F32 && grad_out.dtype() == DType::F32,
        ErrorCode::kInvalidArgument, "conv2d_backward: tensors must be float32");
  check(x.shape().c == w.c_in, ErrorCode::kShapeMismatch,
        "conv2d_backward: input channel mismatch");
  const ConvOutExtents e = conv_out_extents(x.shape().h, x.shape().w, w);
  check(grad_out.shape() == Shape(x.shape().n, e.oh, e.ow, w.c_out),
        ErrorCode::kShapeMismatch,
        "conv2d_backward: grad_out shape inconsistent with forward pass");

  const int N = x.shape().n, H = x.shape().h, W = x.shape().w;
  const int CI = w.c_in, CO = w.c_out;

  ConvGrads g;
  g.grad_x = Tensor::zeros(x.shape());
  g.grad_kernel.assign(w.kernel.size(), 0.0f);
  g.grad_bias.assign(w.bias.size(), 0.0f);

  const float* __restrict__ xp = x.f32();
  const float* __restrict__ gp = grad_out.f32();
  float* __restrict__ gxp = g.grad_x.f32();

  // Kernel transposed to [kh][kw][c_out][c_in] so the grad_x inner loop
  // streams contiguously over c_in.
  std::vector<float> kt(w.kernel.size());
  for (int ky = 0; ky < w.kh; ++ky)
    for (int kx = 0; kx < w.kw; ++kx)
      for (int ci = 0; ci < CI; ++ci)
        for (int co = 0; co < CO; ++co)
          kt[((static_cast<int64_t>(ky) * w.kw + kx) * CO + co) * CI + ci] =
              w.kernel[w.kernel_index(ky, kx, ci, co)];

  for (int n = 0; n < N; ++n) {
    for (int oh = 0; oh < e.oh; ++oh) {
      const float* grow = gp + (static_cast<int64_t>(n) * e.oh + oh) *
                                   e.ow * CO;
      for (int ow = 0; ow < e.ow; ++ow) {
        const float* gv = grow + static_cast<int64_t>(ow) * CO;
        for (int co = 0; co < CO; ++co) g.grad_bias[co] += gv[co];
      }
      for (int ky = 0; ky < w.kh; ++ky) {
        const int ih = oh * w.stride + ky * w.dilation - e.pad_h;
        if (ih < 0 || ih >= H) continue;
        for (int kx = 0; kx < w.kw; ++kx) {
          const int off = kx * w.dilation - e.pad_w;
          const int lo = off < 0 ? (-off + w.stride - 1) / w.stride : 0;
          const int hi = off > W - 1
                             ? 0
                             : std::min(e.ow, (W - 1 - off) / w.stride + 1);
          float* gkblk = g.grad_kernel.data() +
                         (static_cast<int64_t>(ky) * w.kw + kx) * CI * CO;
          const float* ktblk = kt.data() +
                               (static_cast<int64_t>(ky) * w.kw + kx) * CO * CI;
          const float* xrowbase =
              xp + (static_cast<int64_t>(n) * H + ih) * W * CI;
          float* gxrowbase =
              gxp + (static_cast<int64_t>(n) * H + ih) * W * CI;
          for (int ow = lo; ow < hi; ++ow) {
            const int iw = ow * w.stride + off;
            const float* __restrict__ xrow =
                xrowbase + static_cast<int64_t>(iw) * CI;
            float* __restrict__ gxrow =
                gxrowbase + static_cast<int64_t>(iw) * CI;
            const float* __restrict__ gv = grow + static_cast<int64_t>(ow) * CO;
            for (int ci = 0; ci < CI; ++ci) {
              const float xv = xrow[ci];
              float* __restrict__ gkrow = gkblk + static_cast<int64_t>(ci) * CO;
              for (int co = 0; co < CO; ++co) gkrow[co] += xv * gv[co];
            }
            for (int co = 0; co < CO; ++co) {
              const float gval = gv[co];
              const float* __restrict__ ktrow = ktblk + static_cast<int64_t>(co) * CI;
              for (int ci = 0; ci < CI; ++ci) gxrow[ci] += gval * ktrow[ci];
            }
          }
        }
      }
    }
  }
  return g;
}

Tensor relu(const Tensor& x) {
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "relu: input must be float32");
  Tensor out = Tensor::zeros(x.shape());
  const float* p = x.f32();
  float* o = out.f32();
  const int64_t count = x.elems();
  for (int64_t i = 0; i < count; ++i) o[i] = p[i] > 0.0f ? p[i] : 0.0f;
  return out;
}

Tensor relu_backward(const Tensor& x, const Tensor& grad_out) {
  check(x.shape() == grad_out.shape(), ErrorCode::kShapeMismatch,
        "relu_backward: shapes differ");
  Tensor out = Tensor::zeros(x.shape());
  const float* p = x.f32();
  const float* g = grad_out.f32();
  float* o = out.f32();
  const int64_t count = x.elems();
  for (int64_t i = 0; i < count; ++i) o[i] = p[i] > 0.0f ? g[i] : 0.0f;
  return out;
}

Tensor leaky_relu(const Tensor& x, float alpha) {
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "leaky_relu: input must be float32");
  Tensor out = Tensor::zeros(x.shape());
  const float* p = x.f32();
  float* o = out.f32();
  const int64_t count = x.elems();
  for (int64_t i = 0; i < count; ++i) o[i] = p[i] > 0.0f ? p[i] : alpha * p[i];
  return out;
}

namespace {

// Shared permutation core for depth_to_space / space_to_depth.
template <typename T>
void d2s_copy(const T* in, T* out, int n, int h, int w, int cin, int s) {
  const int cout = cin / (s * s);
  const int hs = h * s, ws = w * s;
  for (int b = 0; b < n; ++b) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const T* irow =
            in + ((static_cast<int64_t>(b) * h + y) * w + x) * cin;
        for (int dy = 0; dy < s; ++dy) {
          for (int dx = 0; dx < s; ++dx) {
            T* orow = out + ((static_cast<int64_t>(b) * hs + (y * s + dy)) * ws +
                             (x * s + dx)) * cout;
            const T* iblk = irow + (dy * s + dx) * cout;
            std::memcpy(orow, iblk, sizeof(T) * cout);
          }
        }
      }
    }
  }
}

}  // namespace

Tensor depth_to_space(const Tensor& x, int s) {
  check(s >= 1, ErrorCode::kInvalidArgument, "depth_to_space: s must be >= 1");
  const Shape& sh = x.shape();
  check(sh.c % (s * s) == 0, ErrorCode::kShapeMismatch,
        "depth_to_space: channels (" + std::to_string(sh.c) +
            ") not divisible by s^2");
  const Shape out_shape(sh.n, sh.h * s, sh.w * s, sh.c / (s * s));
  if (x.dtype() == DType::F32) {
    Tensor out = Tensor::zeros(out_shape);
    d2s_copy(x.f32(), out.f32(), sh.n, sh.h, sh.w, sh.c, s);
    return out;
  }
  Tensor out = Tensor::filled_i8(out_shape, 0, x.qparams());
  d2s_copy(x.i8(), out.i8(), sh.n, sh.h, sh.w, sh.c, s);
  return out;
}

Tensor space_to_depth(const Tensor& x, int s) {
  check(s >= 1, ErrorCode::kInvalidArgument, "space_to_depth: s must be >= 1");
  const Shape& sh = x.shape();
  check(sh.h % s == 0 && sh.w % s == 0, ErrorCode::kShapeMismatch,
        "space_to_depth: spatial extents not divisible by s");
  const Shape out_shape(sh.n, sh.h / s, sh.w / s, sh.c * s * s);
  const int h = out_shape.h, w = out_shape.w, cin = out_shape.c;
  auto gather = [&](auto* in, auto* out) {
    const int cout = sh.c;
    for (int b = 0; b < sh.n; ++b)
      for (int y = 0; y < h; ++y)
        for (int x2 = 0; x2 < w; ++x2) {
          auto* orow =
              out + ((static_cast<int64_t>(b) * h + y) * w + x2) * cin;
          for (int dy = 0; dy < s; ++dy)
            for (int dx = 0; dx < s; ++dx) {
              auto* irow = in + ((static_cast<int64_t>(b) * sh.h +
                                  (y * s + dy)) * sh.w + (x2 * s + dx)) * cout;
              std::memcpy(orow + (dy * s + dx) * cout, irow,
                          sizeof(*in) * cout);
            }
        }
  };
  if (x.dtype() == DType::F32) {
    Tensor out = Tensor::zeros(out_shape);
    gather(x.f32(), out.f32());
    return out;
  }
  Tensor out = Tensor::filled_i8(out_shape, 0, x.qparams());
  gather(x.i8(), out.i8());
  return out;
}

Tensor nearest_upsample(const Tensor& x, int s) {
  check(s >= 1, ErrorCode::kInvalidArgument, "nearest_upsample: s must be >= 1");
  const Shape& sh = x.shape();
  const Shape out_shape(sh.n, sh.h * s, sh.w * s, sh.c);
  auto replicate = [&](auto* in, auto* out) {
    for (int b = 0; b < sh.n; ++b)
      for (int y = 0; y < out_shape.h; ++y)
        for (int x2 = 0; x2 < out_shape.w; ++x2) {
          auto* irow = in + ((static_cast<int64_t>(b) * sh.h + y / s) * sh.w +
                             x2 / s) * sh.c;
          auto* orow = out + ((static_cast<int64_t>(b) * out_shape.h + y) *
                                  out_shape.w + x2) * sh.c;
          std::memcpy(orow, irow, sizeof(*in) * sh.c);
        }
  };
  if (x.dtype() == DType::F32) {
    Tensor out = Tensor::zeros(out_shape);
    replicate(x.f32(), out.f32());
    return out;
  }
  Tensor out = Tensor::filled_i8(out_shape, 0, x.qparams());
  replicate(x.i8(), out.i8());
  return out;
}

Tensor bilinear_upsample(const Tensor& x, int s) {
  check(s >= 1, ErrorCode::kInvalidArgument, "bilinear_upsample: s must be >= 1");
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "bilinear_upsample: input must be float32");
  const Shape& sh = x.shape();
  const Shape out_shape(sh.n, sh.h * s, sh.w * s, sh.c);
  Tensor out = Tensor::zeros(out_shape);
  const float* in = x.f32();
  float* o = out.f32();
  const int C = sh.c;

  auto src_coord = [&](int dst, int limit, int* i0, int* i1, float* t) {
    const float src = (static_cast<float>(dst) + 0.5f) / s - 0.5f;
    const float fl = std::floor(src);
    *t = src - fl;
    *i0 = std::clamp(static_cast<int>(fl), 0, limit - 1);
    *i1 = std::clamp(static_cast<int>(fl) + 1, 0, limit - 1);
  };

  for (int b = 0; b < sh.n; ++b) {
    for (int y = 0; y < out_shape.h; ++y) {
      int y0, y1;
      float ty;
      src_coord(y, sh.h, &y0, &y1, &ty);
      for (int x2 = 0; x2 < out_shape.w; ++x2) {
        int x0, x1;
        float tx;
        src_coord(x2, sh.w, &x0, &x1, &tx);
        const float* p00 = in + ((static_cast<int64_t>(b) * sh.h + y0) * sh.w + x0) * C;
        const float* p01 = in + ((static_cast<int64_t>(b) * sh.h + y0) * sh.w + x1) * C;
        const float* p10 = in + ((static_cast<int64_t>(b) * sh.h + y1) * sh.w + x0) * C;
        const float* p11 = in + ((static_cast<int64_t>(b) * sh.h + y1) * sh.w + x1) * C;
        float* orow = o + ((static_cast<int64_t>(b) * out_shape.h + y) *
                               out_shape.w + x2) * C;
        for (int c = 0; c < C; ++c) {
          const float top = p00[c] + (p01[c] - p00[c]) * tx;
          const float bot = p10[c] + (p11[c] - p10[c]) * tx;
          orow[c] = top + (bot - top) * ty;
        }
      }
    }
  }
  return out;
}

Tensor multiply(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), ErrorCode::kShapeMismatch,
        "multiply: shapes differ");
  check(a.dtype() == DType::F32 && b.dtype() == DType::F32,
        ErrorCode::kInvalidArgument, "multiply: operands must be float32");
  Tensor out = Tensor::zeros(a.shape());
  const float* pa = a.f32();
  const float* pb = b.f32();
  float* po = out.f32();
  const int64_t count = a.elems();
  for (int64_t i = 0; i < count; ++i) po[i] = pa[i] * pb[i];
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  check(a.dtype() == DType::F32 && b.dtype() == DType::F32,
        ErrorCode::kInvalidArgument, "concat_channels: operands must be float32");
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  check(sa.n == sb.n && sa.h == sb.h && sa.w == sb.w, ErrorCode::kShapeMismatch,
        "concat_channels: spatial extents differ");
  Tensor out = Tensor::zeros(Shape(sa.n, sa.h, sa.w, sa.c + sb.c));
  const float* pa = a.f32();
  const float* pb = b.f32();
  float* po = out.f32();
  const int64_t pixels = static_cast<int64_t>(sa.n) * sa.h * sa.w;
  for (int64_t i = 0; i < pixels; ++i) {
    std::memcpy(po + i * (sa.c + sb.c), pa + i * sa.c, sizeof(float) * sa.c);
    std::memcpy(po + i * (sa.c + sb.c) + sa.c, pb + i * sb.c,
                sizeof(float) * sb.c);
  }
  return out;
}

std::vector<Tensor> split_channels(const Tensor& x, int parts) {
  check(parts >= 1, ErrorCode::kInvalidArgument, "split_channels: parts must be >= 1");
  const Shape& sh = x.shape();
  check(sh.c % parts == 0, ErrorCode::kShapeMismatch,
        "split_channels: channels not divisible by parts");
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "split_channels: input must be float32");
  const int cc = sh.c / parts;
  std::vector<Tensor> out;
  out.reserve(parts);
  const float* p = x.f32();
  const int64_t pixels = static_cast<int64_t>(sh.n) * sh.h * sh.w;
  for (int k = 0; k < parts; ++k) {
    Tensor t = Tensor::zeros(Shape(sh.n, sh.h, sh.w, cc));
    float* po = t.f32();
    for (int64_t i = 0; i < pixels; ++i)
      std::memcpy(po + i * cc, p + i * sh.c + static_cast<int64_t>(k) * cc,
                  sizeof(float) * cc);
    out.push_back(std::move(t));
  }
  return out;
}

Tensor global_avgpool(const Tensor& x) {
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "global_avgpool: input must be float32");
  const Shape& sh = x.shape();
  Tensor out = Tensor::zeros(Shape(sh.n, 1, 1, sh.c));
  const float* p = x.f32();
  float* po = out.f32();
  const int64_t pixels = static_cast<int64_t>(sh.h) * sh.w;
  for (int b = 0; b < sh.n; ++b) {
    for (int c = 0; c < sh.c; ++c) {
      float sum = 0.0f;
      for (int64_t i = 0; i < pixels; ++i)
        sum += p[(static_cast<int64_t>(b) * pixels + i) * sh.c + c];
      po[static_cast<int64_t>(b) * sh.c + c] = sum / static_cast<float>(pixels);
    }
  }
  return out;
}

Tensor global_maxpool(const Tensor& x) {
  check(x.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "global_maxpool: input must be float32");
  const Shape& sh = x.shape();
  Tensor out = Tensor::zeros(Shape(sh.n, 1, 1, sh.c));
  const float* p = x.f32();
  float* po = out.f32();
  const int64_t pixels = static_cast<int64_t>(sh.h) * sh.w;
  for (int b = 0; b < sh.n; ++b) {
    for (int c = 0; c < sh.c; ++c) {
      float best = p[static_cast<int64_t>(b) * pixels * sh.c + c];
      for (int64_t i = 1; i < pixels; ++i)
        best = std::max(best,
                        p[(static_cast<int64_t>(b) * pixels + i) * sh.c + c]);
      po[static_cast<int64_t>(b) * sh.c + c] = best;
    }
  }
  return out;
}

}  // namespace ncnet
