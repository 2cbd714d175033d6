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

#include "ncnet/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "ncnet/image.hpp"
#include "ncnet/metrics.hpp"

namespace ncnet {

void TrainConfig::validate() const {
  check(scale >= 1, ErrorCode::kInvalidArgument, "train: scale must be >= 1");
  check(batch_size >= 1, ErrorCode::kInvalidArgument,
        "train: batch size must be >= 1");
  check(patch_phase1 >= 1 && patch_phase2 >= 1, ErrorCode::kInvalidArgument,
        "train: patch sizes must be positive");
  check(iters_phase1 >= 0 && iters_phase2 >= 0, ErrorCode::kInvalidArgument,
        "train: iteration counts must be >= 0");
  check(lr0 > 0.0, ErrorCode::kInvalidArgument, "train: lr0 must be > 0");
  check(lr_half_every >= 1, ErrorCode::kInvalidArgument,
        "train: lr_half_every must be >= 1");
  check(log_every >= 1, ErrorCode::kInvalidArgument,
        "train: log_every must be >= 1");
}

double l1_loss(const Tensor& pred, const Tensor& target) {
  check(pred.shape() == target.shape(), ErrorCode::kShapeMismatch,
        "l1_loss: shapes differ");
  const float* p = pred.f32();
  const float* t = target.f32();
  double sum = 0.0;
  const int64_t count = pred.elems();
  for (int64_t i = 0; i < count; ++i)
    sum += std::fabs(static_cast<double>(p[i]) - t[i]);
  return sum / static_cast<double>(count);
}

Tensor l1_loss_backward(const Tensor& pred, const Tensor& target) {
  check(pred.shape() == target.shape(), ErrorCode::kShapeMismatch,
        "l1_loss_backward: shapes differ");
  Tensor grad = Tensor::zeros(pred.shape());
  const float* p = pred.f32();
  const float* t = target.f32();
  float* g = grad.f32();
  const int64_t count = pred.elems();
  const float inv_n = 1.0f / static_cast<float>(count);
  for (int64_t i = 0; i < count; ++i) {
    const float d = p[i] - t[i];
    g[i] = d > 0.0f ? inv_n : d < 0.0f ? -inv_n : 0.0f;
  }
  return grad;
}

AdamState AdamState::like(const ModelWeights& m) {
  AdamState s;
  const size_t L = m.layers.size();
  s.m_kernel.resize(L);
  s.v_kernel.resize(L);
  s.m_bias.resize(L);
  s.v_bias.resize(L);
  for (size_t i = 0; i < L; ++i) {
    s.m_kernel[i].assign(m.layers[i].kernel.size(), 0.0f);
    s.v_kernel[i].assign(m.layers[i].kernel.size(), 0.0f);
    s.m_bias[i].assign(m.layers[i].bias.size(), 0.0f);
    s.v_bias[i].assign(m.layers[i].bias.size(), 0.0f);
  }
  return s;
}

namespace {

void adam_update(std::vector<float>& params, const std::vector<float>& grads,
                 std::vector<float>& mbuf, std::vector<float>& vbuf,
                 double lr, double bc1, double bc2, const AdamConfig& cfg,
                 int layer) {
  check(params.size() == grads.size() && params.size() == mbuf.size(),
        ErrorCode::kShapeMismatch, "adam: gradient shape mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    check(std::isfinite(g), ErrorCode::kNumeric,
          "adam: non-finite gradient in layer " + std::to_string(layer));
    const double m = cfg.beta1 * mbuf[i] + (1.0 - cfg.beta1) * g;
    const double v = cfg.beta2 * vbuf[i] + (1.0 - cfg.beta2) * g * g;
    mbuf[i] = static_cast<float>(m);
    vbuf[i] = static_cast<float>(v);
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    params[i] = static_cast<float>(params[i] -
                                   lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
  }
}

}  // namespace

void adam_step(ModelWeights& m, const ModelGrads& grads, AdamState& state,
               double lr, const AdamConfig& cfg) {
  check(grads.kernel.size() == m.layers.size() &&
            grads.bias.size() == m.layers.size(),
        ErrorCode::kShapeMismatch, "adam: layer count mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < m.layers.size(); ++i) {
    adam_update(m.layers[i].kernel, grads.kernel[i], state.m_kernel[i],
                state.v_kernel[i], lr, bc1, bc2, cfg, static_cast<int>(i));
    adam_update(m.layers[i].bias, grads.bias[i], state.m_bias[i],
                state.v_bias[i], lr, bc1, bc2, cfg, static_cast<int>(i));
  }
}

namespace {

// Crops `size` x `size` at (top, left) from a (1, h, w, c) tensor.
Tensor crop(const Tensor& t, int top, int left, int size) {
  const Shape& sh = t.shape();
  Tensor out = Tensor::zeros(Shape(1, size, size, sh.c));
  const float* p = t.f32();
  float* o = out.f32();
  for (int y = 0; y < size; ++y)
    std::memcpy(o + static_cast<int64_t>(y) * size * sh.c,
                p + ((static_cast<int64_t>(top) + y) * sh.w + left) * sh.c,
                sizeof(float) * size * sh.c);
  return out;
}

// Horizontal flip, then `quarters` 90-degree counter-clockwise turns, on
// a square (1, n, n, c) tensor.
Tensor dihedral(const Tensor& t, bool flip, int quarters) {
  const Shape& sh = t.shape();
  Tensor out = Tensor::zeros(sh);
  const float* p = t.f32();
  float* o = out.f32();
  const int n = sh.h;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      int sy = y, sx = flip ? n - 1 - x : x;
      for (int q = 0; q < quarters; ++q) {
        const int ty = n - 1 - sx, tx = sy;
        sy = ty;
        sx = tx;
      }
      std::memcpy(o + (static_cast<int64_t>(y) * n + x) * sh.c,
                  p + (static_cast<int64_t>(sy) * n + sx) * sh.c,
                  sizeof(float) * sh.c);
    }
  }
  return out;
}

}  // namespace

std::pair<Tensor, Tensor> sample_patch(const TrainPair& pair, int size,
                                       int scale, Rng& rng, bool augment) {
  const Shape& lo = pair.lr.shape();
  const Shape& hi = pair.hr.shape();
  check(hi.h == lo.h * scale && hi.w == lo.w * scale, ErrorCode::kShapeMismatch,
        "sample_patch: HR extents are not scale x LR extents");
  check(lo.h >= size && lo.w >= size, ErrorCode::kInvalidArgument,
        "sample_patch: image smaller than requested patch (" +
            std::to_string(lo.h) + "x" + std::to_string(lo.w) + " vs " +
            std::to_string(size) + ")");
  const int top = static_cast<int>(rng.next_below(lo.h - size + 1));
  const int left = static_cast<int>(rng.next_below(lo.w - size + 1));
  Tensor lr_patch = crop(pair.lr, top, left, size);
  Tensor hr_patch = crop(pair.hr, top * scale, left * scale, size * scale);
  if (augment) {
    const uint64_t k = rng.next_below(8);
    const bool flip = (k & 1) != 0;
    const int quarters = static_cast<int>(k >> 1);
    if (flip || quarters) {
      lr_patch = dihedral(lr_patch, flip, quarters);
      hr_patch = dihedral(hr_patch, flip, quarters);
    }
  }
  return {std::move(lr_patch), std::move(hr_patch)};
}

double lr_at(const TrainConfig& config, int64_t iter) {
  return config.lr0 * std::pow(2.0, -static_cast<double>(iter / config.lr_half_every));
}

double validate_psnr(const ModelWeights& m, const std::vector<TrainPair>& val,
                     int threads) {
  check(!val.empty(), ErrorCode::kInvalidArgument,
        "validate_psnr: empty validation set");
  std::vector<PsnrResult> scores;
  scores.reserve(val.size());
  for (const TrainPair& p : val) {
    const ImageBuffer sr = tensor_to_img(model_forward(p.lr, m, threads));
    scores.push_back(psnr(sr, tensor_to_img(p.hr)));
  }
  return psnr_over_set(scores);
}

TrainResult train(const TrainConfig& config,
                  const std::vector<TrainPair>& train_set,
                  const std::vector<TrainPair>& val_set,
                  const TrainLogFn& on_log) {
  config.validate();
  check(!train_set.empty(), ErrorCode::kInvalidArgument,
        "train: dataset is empty");

  ModelSpec spec;
  spec.scale = config.scale;
  for (const TrainPair& p : train_set) {
    check(p.lr.shape().c == spec.in_channels &&
              p.hr.shape().c == spec.in_channels,
          ErrorCode::kShapeMismatch, "train: pairs must be RGB");
    check(p.hr.shape().h == p.lr.shape().h * config.scale &&
              p.hr.shape().w == p.lr.shape().w * config.scale,
          ErrorCode::kShapeMismatch,
          "train: HR extents are not scale x LR extents");
  }

  uint64_t seq = config.seed;
  ModelWeights weights = init_weights(spec, splitmix64(seq));
  Rng rng(splitmix64(seq));
  AdamState adam = AdamState::like(weights);

  TrainResult result;
  ModelWeights best = weights;
  double best_psnr = -std::numeric_limits<double>::infinity();
  const int64_t total = config.iters_phase1 + config.iters_phase2;

  auto log_point = [&](int64_t iter, double loss, double lr) {
    TrainLogRow row;
    row.iter = iter;
    row.loss = loss;
    row.lr = lr;
    row.val_psnr = std::numeric_limits<double>::quiet_NaN();
    if (!val_set.empty()) {
      row.val_psnr = validate_psnr(weights, val_set, config.threads);
      if (row.val_psnr > best_psnr) {
        best_psnr = row.val_psnr;
        best = weights;
      }
    }
    result.curve.push_back(row);
    if (on_log) on_log(row);
  };

  for (int64_t iter = 0; iter < total; ++iter) {
    const bool phase2 = iter >= config.iters_phase1;
    const int patch = phase2 ? config.patch_phase2 : config.patch_phase1;
    const int64_t sched_iter =
        config.lr_reset_phase2 && phase2 ? iter - config.iters_phase1 : iter;
    const double lr = lr_at(config, sched_iter);

    // Assemble the batch. The whole batch lives in one tensor, so the L1
    // normalization averages per-sample gradients.
    Tensor batch_lr = Tensor::zeros(
        Shape(config.batch_size, patch, patch, spec.in_channels));
    Tensor batch_hr =
        Tensor::zeros(Shape(config.batch_size, patch * config.scale,
                            patch * config.scale, spec.in_channels));
    for (int b = 0; b < config.batch_size; ++b) {
      const size_t idx = rng.next_below(train_set.size());
      auto [lp, hp] =
          sample_patch(train_set[idx], patch, config.scale, rng, config.augment);
      std::memcpy(batch_lr.f32() + static_cast<int64_t>(b) * lp.elems(),
                  lp.f32(), sizeof(float) * lp.elems());
      std::memcpy(batch_hr.f32() + static_cast<int64_t>(b) * hp.elems(),
                  hp.f32(), sizeof(float) * hp.elems());
    }

    ModelGrads grads;
    const double loss =
        model_forward_backward(batch_lr, batch_hr, weights, &grads,
                               config.threads);
    check(std::isfinite(loss), ErrorCode::kNumeric,
          "train: non-finite loss at iteration " + std::to_string(iter));
    adam_step(weights, grads, adam, lr);

    if ((iter + 1) % config.log_every == 0 || iter + 1 == total)
      log_point(iter + 1, loss, lr);
  }
  if (total == 0) log_point(0, 0.0, config.lr0);

  result.weights = !val_set.empty() && total > 0 ? best : weights;
  return result;
}

void write_train_log(const std::vector<TrainLogRow>& curve,
                     const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  check(out.good(), ErrorCode::kIo, "cannot write " + path);
  out << "iter\tloss\tlr\tval_psnr\n";
  char buf[128];
  for (const TrainLogRow& row : curve) {
    std::snprintf(buf, sizeof(buf), "%lld\t%.8g\t%.8g\t%.6g\n",
                  static_cast<long long>(row.iter), row.loss, row.lr,
                  row.val_psnr);
    out << buf;
  }
  check(out.good(), ErrorCode::kIo, "write failed for " + path);
}

}  // namespace ncnet
