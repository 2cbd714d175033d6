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

#ifndef NCNET_TRAINER_HPP_
#define NCNET_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ncnet/model.hpp"
#include "ncnet/rng.hpp"
#include "ncnet/tensor.hpp"

namespace ncnet {

// Two-phase recipe: phase 1 on small LR patches, then finetuning on
// larger ones. The learning rate starts at lr0 and halves every
// lr_half_every iterations; by default the halving schedule continues
// across the phase boundary (lr_reset_phase2 restarts it instead).
struct TrainConfig {
  int scale = 3;
  int batch_size = 8;
  int patch_phase1 = 64;   // LR patch side
  int patch_phase2 = 128;
  int64_t iters_phase1 = 2000;
  int64_t iters_phase2 = 500;
  double lr0 = 1e-3;
  int64_t lr_half_every = 1000;
  bool lr_reset_phase2 = false;
  uint64_t seed = 0;
  bool augment = true;     // random horizontal flip + 90-degree rotations
  int threads = 1;
  int64_t log_every = 100;

  void validate() const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<float>> m_kernel, v_kernel, m_bias, v_bias;
  int64_t step = 0;

  static AdamState like(const ModelWeights& m);
};

// Mean absolute error over all elements (subgradient at 0 is 0).
double l1_loss(const Tensor& pred, const Tensor& target);
Tensor l1_loss_backward(const Tensor& pred, const Tensor& target);

// One bias-corrected Adam update of the backbone parameters. The
// nearest-conv branch is never touched. Aborts on non-finite gradients.
void adam_step(ModelWeights& m, const ModelGrads& grads, AdamState& state,
               double lr, const AdamConfig& cfg = {});

struct TrainPair {
  Tensor lr;  // (1, h, w, 3) float, 0..255
  Tensor hr;  // (1, s*h, s*w, 3)
};

// Aligned random crop: LR at (i, j), HR at (s*i, s*j), both of side
// `size` (times s for HR). Augmentation applies the same flip/rotation
// to both crops.
std::pair<Tensor, Tensor> sample_patch(const TrainPair& pair, int size,
                                       int scale, Rng& rng, bool augment);

struct TrainLogRow {
  int64_t iter = 0;
  double loss = 0.0;
  double lr = 0.0;
  double val_psnr = 0.0;  // NaN when no validation set is given
};

struct TrainResult {
  ModelWeights weights;
  std::vector<TrainLogRow> curve;
};

using TrainLogFn = std::function<void(const TrainLogRow&)>;

// Runs both phases; when a validation set is given, tracks mean PSNR on
// it at every log point and returns the best checkpoint.
TrainResult train(const TrainConfig& config,
                  const std::vector<TrainPair>& train_set,
                  const std::vector<TrainPair>& val_set = {},
                  const TrainLogFn& on_log = nullptr);

// lr0 * 2^(-floor(iter / lr_half_every))
double lr_at(const TrainConfig& config, int64_t iter);

// Mean PSNR of the model over full validation images.
double validate_psnr(const ModelWeights& m, const std::vector<TrainPair>& val,
                     int threads = 1);

// Tab-separated (iter, loss, lr, val_psnr) rows.
void write_train_log(const std::vector<TrainLogRow>& curve,
                     const std::string& path);

}  // namespace ncnet

#endif  // NCNET_TRAINER_HPP_
