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

#ifndef NCNET_WEIGHTS_IO_HPP_
#define NCNET_WEIGHTS_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ncnet/model.hpp"
#include "ncnet/quantize.hpp"
#include "ncnet/trainer.hpp"

namespace ncnet {

// Binary weight container:
//   8-byte magic "NCNETWTS", u32 version, u32 tensor count; per tensor:
//   u16 name length, UTF-8 name, u8 dtype (0=f32, 1=i8, 2=i32), u8 rank,
//   u32 dims[rank], raw little-endian payload, and for int payloads a
//   trailing (f32 scale, i32 zero_point).
// Version 1 stores the float model ("conv{i}.kernel", "conv{i}.bias");
// the nearest-conv branch is derived from the scale and never stored.
// Version 2 stores the quantized model plus per-edge "edge{i}.scale" /
// "edge{i}.zp" scalar pairs.
struct TensorRecord {
  std::string name;
  uint8_t dtype = 0;
  std::vector<uint32_t> dims;
  std::vector<uint8_t> payload;
  bool has_qparams = false;
  float scale = 0.0f;
  int32_t zero_point = 0;

  uint64_t elem_count() const;
};

struct WeightsFile {
  uint32_t version = 1;
  std::vector<TensorRecord> tensors;
};

void write_weights_file(const std::string& path, const WeightsFile& file);
WeightsFile read_weights_file(const std::string& path);

void save_model(const ModelWeights& m, const std::string& path);
ModelWeights load_model(const std::string& path);

void save_qmodel(const QuantizedModel& qm, const std::string& path);
QuantizedModel load_qmodel(const std::string& path);

// Peeks at the container version: 1 = float model, 2 = quantized.
uint32_t weights_file_version(const std::string& path);

// Two-column tab-separated (lr_path, hr_path) manifest. Every HR
// dimension must be exactly scale x the LR dimension; violations are
// reported per pair.
struct ManifestEntry {
  std::string lr_path;
  std::string hr_path;
};
std::vector<ManifestEntry> load_manifest(const std::string& path, int scale);

// Flat key = value config file mirroring TrainConfig; unknown keys are
// rejected. Values overwrite the fields of *config.
void load_train_config_file(const std::string& path, TrainConfig* config);

// Loads the manifest's images as training pairs.
std::vector<TrainPair> load_train_pairs(const std::vector<ManifestEntry>& entries);

}  // namespace ncnet

#endif  // NCNET_WEIGHTS_IO_HPP_
