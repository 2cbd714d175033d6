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

#include "ncnet/weights_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "ncnet/image.hpp"

namespace ncnet {

namespace {

constexpr char kMagic[8] = {'N', 'C', 'N', 'E', 'T', 'W', 'T', 'S'};

constexpr uint8_t kDtypeF32 = 0;
constexpr uint8_t kDtypeI8 = 1;
constexpr uint8_t kDtypeI32 = 2;

size_t dtype_size(uint8_t dtype) {
  switch (dtype) {
    case kDtypeF32: return 4;
    case kDtypeI8: return 1;
    case kDtypeI32: return 4;
    default:
      fail(ErrorCode::kParse, "weights: unknown dtype code " + std::to_string(dtype));
  }
}

template <typename T>
void put_le(std::vector<uint8_t>& out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<uint8_t>(static_cast<uint64_t>(v) >> (8 * i)));
}

void put_f32_le(std::vector<uint8_t>& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_le(out, bits);
}

class Reader {
 public:
  Reader(const uint8_t* data, size_t size, const std::string& path)
      : data_(data), size_(size), path_(path) {}

  template <typename T>
  T get_le() {
    need(sizeof(T));
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  float get_f32() {
    const uint32_t bits = get_le<uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::string get_string(size_t len) {
    need(len);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return s;
  }

  std::vector<uint8_t> get_bytes(size_t len) {
    need(len);
    std::vector<uint8_t> v(data_ + pos_, data_ + pos_ + len);
    pos_ += len;
    return v;
  }

  size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == size_; }

 private:
  void need(size_t n) {
    if (pos_ + n > size_)
      fail(ErrorCode::kParse,
           path_ + ": truncated weights file at byte " + std::to_string(pos_));
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  std::string path_;
};

}  // namespace

uint64_t TensorRecord::elem_count() const {
  uint64_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

void write_weights_file(const std::string& path, const WeightsFile& file) {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 8);
  put_le(out, file.version);
  put_le(out, static_cast<uint32_t>(file.tensors.size()));
  for (const TensorRecord& t : file.tensors) {
    check(t.name.size() <= 0xffff, ErrorCode::kInvalidArgument,
          "weights: tensor name too long");
    check(!t.dims.empty() && t.dims.size() <= 0xff,
          ErrorCode::kInvalidArgument, "weights: bad tensor rank");
    check(t.payload.size() == t.elem_count() * dtype_size(t.dtype),
          ErrorCode::kShapeMismatch,
          "weights: payload size mismatch for " + t.name);
    put_le(out, static_cast<uint16_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    out.push_back(t.dtype);
    out.push_back(static_cast<uint8_t>(t.dims.size()));
    for (uint32_t d : t.dims) put_le(out, d);
    out.insert(out.end(), t.payload.begin(), t.payload.end());
    if (t.dtype != kDtypeF32) {
      put_f32_le(out, t.scale);
      put_le(out, static_cast<uint32_t>(t.zero_point));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  check(f.good(), ErrorCode::kIo, "cannot write " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  f.flush();
  check(f.good(), ErrorCode::kIo, "write failed for " + path);
}

WeightsFile read_weights_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(f.good(), ErrorCode::kIo, "cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  Reader r(bytes.data(), bytes.size(), path);

  const std::string magic = r.get_string(8);
  check(std::memcmp(magic.data(), kMagic, 8) == 0, ErrorCode::kParse,
        path + ": not a weights file (bad magic)");
  WeightsFile out;
  out.version = r.get_le<uint32_t>();
  check(out.version == 1 || out.version == 2, ErrorCode::kUnsupported,
        path + ": unsupported version " + std::to_string(out.version));
  const uint32_t count = r.get_le<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    TensorRecord t;
    const uint16_t name_len = r.get_le<uint16_t>();
    t.name = r.get_string(name_len);
    t.dtype = r.get_le<uint8_t>();
    dtype_size(t.dtype);  // validates
    const uint8_t rank = r.get_le<uint8_t>();
    check(rank >= 1, ErrorCode::kParse, path + ": zero-rank tensor " + t.name);
    uint64_t elems = 1;
    for (uint8_t d = 0; d < rank; ++d) {
      t.dims.push_back(r.get_le<uint32_t>());
      elems *= t.dims.back();
      check(elems <= (uint64_t{1} << 33), ErrorCode::kParse,
            path + ": tensor " + t.name + " too large");
    }
    t.payload = r.get_bytes(elems * dtype_size(t.dtype));
    if (t.dtype != kDtypeF32) {
      t.has_qparams = true;
      t.scale = r.get_f32();
      t.zero_point = static_cast<int32_t>(r.get_le<uint32_t>());
    }
    out.tensors.push_back(std::move(t));
  }
  check(r.at_end(), ErrorCode::kParse,
        path + ": trailing bytes at " + std::to_string(r.pos()));
  return out;
}

uint32_t weights_file_version(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(f.good(), ErrorCode::kIo, "cannot open " + path);
  char head[12];
  f.read(head, sizeof(head));
  check(f.gcount() == sizeof(head), ErrorCode::kParse,
        path + ": truncated weights file at byte 0");
  check(std::memcmp(head, kMagic, 8) == 0, ErrorCode::kParse,
        path + ": not a weights file (bad magic)");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<uint8_t>(head[8 + i])) << (8 * i);
  return v;
}

namespace {

TensorRecord f32_record(const std::string& name, std::vector<uint32_t> dims,
                        const float* data, size_t count) {
  TensorRecord t;
  t.name = name;
  t.dtype = kDtypeF32;
  t.dims = std::move(dims);
  t.payload.resize(count * 4);
  std::memcpy(t.payload.data(), data, count * 4);
  return t;
}

TensorRecord scalar_record(const std::string& name, float value) {
  return f32_record(name, {1}, &value, 1);
}

const TensorRecord& find_record(const WeightsFile& f, const std::string& name,
                                const std::string& path) {
  for (const TensorRecord& t : f.tensors)
    if (t.name == name) return t;
  fail(ErrorCode::kParse, path + ": missing tensor '" + name + "'");
}

int count_layers(const WeightsFile& f) {
  int layers = 0;
  for (const TensorRecord& t : f.tensors)
    if (t.name.rfind("conv", 0) == 0 &&
        t.name.find(".kernel") != std::string::npos)
      ++layers;
  return layers;
}

int infer_scale(uint32_t last_cout, const std::string& path) {
  check(last_cout % 3 == 0, ErrorCode::kParse,
        path + ": last layer output channels not divisible by 3");
  const int groups = static_cast<int>(last_cout / 3);
  const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(groups))));
  check(s >= 1 && s * s == groups, ErrorCode::kParse,
        path + ": last layer output channels are not 3*s^2");
  return s;
}

}  // namespace

void save_model(const ModelWeights& m, const std::string& path) {
  m.validate();
  WeightsFile f;
  f.version = 1;
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const ConvWeights& w = m.layers[i];
    const std::string base = "conv" + std::to_string(i);
    f.tensors.push_back(f32_record(
        base + ".kernel",
        {static_cast<uint32_t>(w.kh), static_cast<uint32_t>(w.kw),
         static_cast<uint32_t>(w.c_in), static_cast<uint32_t>(w.c_out)},
        w.kernel.data(), w.kernel.size()));
    f.tensors.push_back(f32_record(base + ".bias",
                                   {static_cast<uint32_t>(w.c_out)},
                                   w.bias.data(), w.bias.size()));
  }
  write_weights_file(path, f);
}

ModelWeights load_model(const std::string& path) {
  const WeightsFile f = read_weights_file(path);
  check(f.version == 1, ErrorCode::kUnsupported,
        path + ": expected a float model (container version 1), got version " +
            std::to_string(f.version));
  const int L = count_layers(f);
  check(L >= 2, ErrorCode::kParse, path + ": fewer than 2 conv layers");

  std::vector<ConvWeights> layers;
  for (int i = 0; i < L; ++i) {
    const std::string base = "conv" + std::to_string(i);
    const TensorRecord& k = find_record(f, base + ".kernel", path);
    const TensorRecord& b = find_record(f, base + ".bias", path);
    check(k.dtype == kDtypeF32 && b.dtype == kDtypeF32, ErrorCode::kParse,
          path + ": float model holds non-f32 tensors");
    check(k.dims.size() == 4, ErrorCode::kParse,
          path + ": kernel " + base + " must be rank 4");
    ConvWeights w = ConvWeights::make(
        static_cast<int>(k.dims[0]), static_cast<int>(k.dims[1]),
        static_cast<int>(k.dims[2]), static_cast<int>(k.dims[3]));
    std::memcpy(w.kernel.data(), k.payload.data(), k.payload.size());
    check(b.dims.size() == 1 && b.dims[0] == k.dims[3], ErrorCode::kParse,
          path + ": bias " + base + " length mismatch");
    std::memcpy(w.bias.data(), b.payload.data(), b.payload.size());
    layers.push_back(std::move(w));
  }

  ModelWeights m;
  m.spec.num_layers = L;
  m.spec.in_channels = static_cast<int>(layers.front().c_in);
  m.spec.channels = static_cast<int>(layers.front().c_out);
  m.spec.scale = infer_scale(layers.back().c_out, path);
  m.layers = std::move(layers);
  m.nearest = build_nearest_conv(m.spec.scale);
  m.validate();
  return m;
}

void save_qmodel(const QuantizedModel& qm, const std::string& path) {
  qm.validate();
  WeightsFile f;
  f.version = 2;
  for (size_t i = 0; i < qm.layers.size(); ++i) {
    const QuantizedLayer& l = qm.layers[i];
    const std::string base = "conv" + std::to_string(i);
    TensorRecord k;
    k.name = base + ".kernel";
    k.dtype = kDtypeI8;
    k.dims = {static_cast<uint32_t>(l.kh), static_cast<uint32_t>(l.kw),
              static_cast<uint32_t>(l.c_in), static_cast<uint32_t>(l.c_out)};
    k.payload.resize(l.kernel.elems());
    std::memcpy(k.payload.data(), l.kernel.i8(), k.payload.size());
    k.has_qparams = true;
    k.scale = l.kernel.qparams().scale;
    k.zero_point = 0;
    f.tensors.push_back(std::move(k));

    TensorRecord b;
    b.name = base + ".bias";
    b.dtype = kDtypeI32;
    b.dims = {static_cast<uint32_t>(l.c_out)};
    b.payload.resize(l.bias.size() * 4);
    std::memcpy(b.payload.data(), l.bias.data(), b.payload.size());
    b.has_qparams = true;
    b.scale = l.bias_scale;
    b.zero_point = 0;
    f.tensors.push_back(std::move(b));
  }
  // Activation edges, in graph order (see CalibrationStats layout).
  const int L = qm.num_layers;
  auto edge_pair = [&f](int idx, QuantParams qp) {
    f.tensors.push_back(scalar_record("edge" + std::to_string(idx) + ".scale",
                                      qp.scale));
    f.tensors.push_back(scalar_record("edge" + std::to_string(idx) + ".zp",
                                      static_cast<float>(qp.zero_point)));
  };
  edge_pair(0, qm.input_qp);
  for (int i = 0; i < L - 1; ++i) edge_pair(i + 1, qm.layers[i].out_qp);
  edge_pair(L, qm.residual_qp);
  edge_pair(L + 1, qm.nearest_qp);
  edge_pair(L + 2, qm.sum_qp);
  write_weights_file(path, f);
}

QuantizedModel load_qmodel(const std::string& path) {
  const WeightsFile f = read_weights_file(path);
  check(f.version == 2, ErrorCode::kUnsupported,
        path + ": expected a quantized model (container version 2), got "
               "version " + std::to_string(f.version));
  const int L = count_layers(f);
  check(L >= 2, ErrorCode::kParse, path + ": fewer than 2 conv layers");

  auto edge_qp = [&](int idx) {
    const std::string base = "edge" + std::to_string(idx);
    const TensorRecord& s = find_record(f, base + ".scale", path);
    const TensorRecord& z = find_record(f, base + ".zp", path);
    float scale, zp;
    std::memcpy(&scale, s.payload.data(), 4);
    std::memcpy(&zp, z.payload.data(), 4);
    QuantParams qp;
    qp.scale = scale;
    qp.zero_point = static_cast<int32_t>(std::lround(zp));
    check(qp.scale > 0.0f, ErrorCode::kParse,
          path + ": non-positive scale on " + base);
    return qp;
  };

  QuantizedModel qm;
  qm.num_layers = L;
  for (int i = 0; i < L; ++i) {
    const std::string base = "conv" + std::to_string(i);
    const TensorRecord& k = find_record(f, base + ".kernel", path);
    const TensorRecord& b = find_record(f, base + ".bias", path);
    check(k.dtype == kDtypeI8 && b.dtype == kDtypeI32, ErrorCode::kParse,
          path + ": quantized model holds unexpected dtypes");
    check(k.dims.size() == 4, ErrorCode::kParse,
          path + ": kernel " + base + " must be rank 4");
    QuantizedLayer l;
    l.kh = static_cast<int>(k.dims[0]);
    l.kw = static_cast<int>(k.dims[1]);
    l.c_in = static_cast<int>(k.dims[2]);
    l.c_out = static_cast<int>(k.dims[3]);
    l.apply_relu = i < L - 1;
    l.kernel = Tensor::filled_i8(Shape(l.kh, l.kw, l.c_in, l.c_out), 0,
                                 QuantParams{k.scale, k.zero_point});
    std::memcpy(l.kernel.i8(), k.payload.data(), k.payload.size());
    check(b.dims.size() == 1 && b.dims[0] == k.dims[3], ErrorCode::kParse,
          path + ": bias " + base + " length mismatch");
    l.bias.resize(b.dims[0]);
    std::memcpy(l.bias.data(), b.payload.data(), b.payload.size());
    l.bias_scale = b.scale;
    l.in_qp = edge_qp(i);
    l.out_qp = edge_qp(i + 1);
    qm.layers.push_back(std::move(l));
  }
  qm.channels = qm.layers.front().c_out;
  qm.scale = infer_scale(qm.layers.back().c_out, path);
  qm.input_qp = edge_qp(0);
  qm.residual_qp = edge_qp(L);
  qm.nearest_qp = edge_qp(L + 1);
  qm.sum_qp = edge_qp(L + 2);
  qm.finalize_multipliers();
  qm.validate();
  return qm;
}

std::vector<ManifestEntry> load_manifest(const std::string& path, int scale) {
  check(scale >= 1, ErrorCode::kInvalidArgument, "manifest: scale must be >= 1");
  std::ifstream f(path);
  check(f.good(), ErrorCode::kIo, "cannot open " + path);
  std::vector<ManifestEntry> entries;
  std::string line, bad;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    check(tab != std::string::npos, ErrorCode::kParse,
          path + ":" + std::to_string(line_no) +
              ": expected two tab-separated paths");
    ManifestEntry e;
    e.lr_path = line.substr(0, tab);
    e.hr_path = line.substr(tab + 1);
    check(!e.lr_path.empty() && !e.hr_path.empty(), ErrorCode::kParse,
          path + ":" + std::to_string(line_no) + ": empty path");
    const auto [lw, lh] = png_dimensions(e.lr_path);
    const auto [hw, hh] = png_dimensions(e.hr_path);
    if (hw != lw * scale || hh != lh * scale) {
      bad += "\n  " + e.lr_path + " (" + std::to_string(lw) + "x" +
             std::to_string(lh) + ") vs " + e.hr_path + " (" +
             std::to_string(hw) + "x" + std::to_string(hh) + ")";
    }
    entries.push_back(std::move(e));
  }
  check(bad.empty(), ErrorCode::kShapeMismatch,
        path + ": HR dimensions are not " + std::to_string(scale) +
            "x the LR dimensions for:" + bad);
  check(!entries.empty(), ErrorCode::kInvalidArgument,
        path + ": manifest lists no image pairs");
  return entries;
}

void load_train_config_file(const std::string& path, TrainConfig* config) {
  check(config != nullptr, ErrorCode::kInvalidArgument, "config: null output");
  std::ifstream f(path);
  check(f.good(), ErrorCode::kIo, "cannot open " + path);
  std::string line;
  int line_no = 0;

  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    const size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };

  while (std::getline(f, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    check(eq != std::string::npos, ErrorCode::kParse,
          path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "scale") config->scale = std::stoi(value);
      else if (key == "batch_size") config->batch_size = std::stoi(value);
      else if (key == "patch_phase1") config->patch_phase1 = std::stoi(value);
      else if (key == "patch_phase2") config->patch_phase2 = std::stoi(value);
      else if (key == "iters_phase1") config->iters_phase1 = std::stoll(value);
      else if (key == "iters_phase2") config->iters_phase2 = std::stoll(value);
      else if (key == "lr0") config->lr0 = std::stod(value);
      else if (key == "lr_half_every") config->lr_half_every = std::stoll(value);
      else if (key == "lr_reset_phase2") config->lr_reset_phase2 = std::stoi(value) != 0;
      else if (key == "seed") config->seed = std::stoull(value);
      else if (key == "augment") config->augment = std::stoi(value) != 0;
      else if (key == "threads") config->threads = std::stoi(value);
      else if (key == "log_every") config->log_every = std::stoll(value);
      else
        fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                    ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                  ": bad value for '" + key + "'");
    } catch (const std::out_of_range&) {
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                  ": value out of range for '" + key + "'");
    }
  }
  config->validate();
}

std::vector<TrainPair> load_train_pairs(
    const std::vector<ManifestEntry>& entries) {
  std::vector<TrainPair> pairs;
  pairs.reserve(entries.size());
  for (const ManifestEntry& e : entries) {
    TrainPair p;
    p.lr = img_to_tensor(load_png(e.lr_path));
    p.hr = img_to_tensor(load_png(e.hr_path));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace ncnet
