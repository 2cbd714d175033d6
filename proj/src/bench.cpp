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

#include "ncnet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "ncnet/nearest_conv.hpp"
#include "ncnet/nn_ops.hpp"
#include "ncnet/quantize.hpp"
#include "ncnet/rng.hpp"

namespace ncnet {

uint64_t fnv1a(const void* data, size_t size) {
  const uint8_t* p = static_cast<const uint8_t*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr int kBenchH = 360;
constexpr int kBenchW = 640;
constexpr int kUpscale = 3;

uint64_t tensor_checksum(const Tensor& t) {
  if (t.dtype() == DType::F32)
    return fnv1a(t.f32(), static_cast<size_t>(t.elems()) * sizeof(float));
  return fnv1a(t.i8(), static_cast<size_t>(t.elems()));
}

Tensor random_image_tensor(int h, int w, int c, uint64_t seed) {
  Tensor t = Tensor::zeros(Shape(1, h, w, c));
  Rng rng(seed);
  float* p = t.f32();
  const int64_t count = t.elems();
  for (int64_t i = 0; i < count; ++i) p[i] = rng.uniform(0.0f, 255.0f);
  return t;
}

ConvWeights random_conv(int k, int ci, int co, uint64_t seed, int dilation = 1) {
  ConvWeights w = ConvWeights::make(k, k, ci, co, 1, Padding::kSame, dilation);
  Rng rng(seed);
  const float bound = std::sqrt(6.0f / (static_cast<float>(k) * k * (ci + co)));
  for (float& v : w.kernel) v = rng.uniform(-bound, bound);
  for (float& v : w.bias) v = rng.uniform(-0.1f, 0.1f);
  return w;
}

// Builds an int8 layer from a float conv: weights quantized symmetric,
// the output range taken from one float evaluation on the same input.
QuantizedLayer make_qlayer(const Tensor& x, const ConvWeights& w,
                           QuantParams in_qp) {
  QuantizedLayer l;
  l.kh = w.kh;
  l.kw = w.kw;
  l.c_in = w.c_in;
  l.c_out = w.c_out;
  l.in_qp = in_qp;
  const Tensor ref = conv2d(x, w);
  const auto [lo, hi] = minmax(ref);
  l.out_qp = choose_activation_qparams(lo, hi);
  const float w_scale = choose_weight_scale(w.kernel);
  l.kernel = Tensor::filled_i8(Shape(w.kh, w.kw, w.c_in, w.c_out), 0,
                               QuantParams{w_scale, 0});
  int8_t* kp = l.kernel.i8();
  for (size_t j = 0; j < w.kernel.size(); ++j)
    kp[j] = static_cast<int8_t>(std::clamp<int64_t>(
        std::llround(w.kernel[j] / w_scale), -127, 127));
  const double bscale = static_cast<double>(in_qp.scale) * w_scale;
  l.bias.resize(w.bias.size());
  for (size_t j = 0; j < w.bias.size(); ++j)
    l.bias[j] = static_cast<int32_t>(std::llround(w.bias[j] / bscale));
  l.requant = quantize_multiplier(static_cast<double>(in_qp.scale) * w_scale /
                                  l.out_qp.scale);
  l.bias_scale = static_cast<float>(bscale);
  return l;
}

Tensor quantize_tensor(const Tensor& x, QuantParams qp) {
  Tensor out = Tensor::filled_i8(x.shape(), 0, qp);
  const float* p = x.f32();
  int8_t* o = out.i8();
  const int64_t count = x.elems();
  for (int64_t i = 0; i < count; ++i) {
    const int64_t q = std::llround(static_cast<double>(p[i]) / qp.scale) +
                      qp.zero_point;
    o[i] = static_cast<int8_t>(std::clamp<int64_t>(q, -128, 127));
  }
  return out;
}

using Graph = std::function<uint64_t()>;

// Conv base plus an optional trailing op, f32.
BenchCase make_conv_case(const std::string& name, const std::string& group,
                         std::vector<int> channels, int k, int dilation,
                         const std::function<Tensor(const Tensor&)>& tail) {
  BenchCase c;
  c.name = name;
  c.group = group;
  c.dtype = "f32";
  c.setup = [channels, k, dilation, tail](int threads) -> Graph {
    auto x = std::make_shared<Tensor>(random_image_tensor(kBenchH, kBenchW, 3, 11));
    auto weights = std::make_shared<std::vector<ConvWeights>>();
    int ci = 3;
    uint64_t seed = 101;
    for (int co : channels) {
      weights->push_back(random_conv(k, ci, co, seed++, dilation));
      ci = co;
    }
    return [x, weights, tail, threads]() -> uint64_t {
      Tensor t = *x;
      for (const ConvWeights& w : *weights) t = conv2d(t, w, threads);
      if (tail) t = tail(t);
      return tensor_checksum(t);
    };
  };
  return c;
}

BenchCase make_qconv_case(const std::string& name, const std::string& group,
                          std::vector<int> channels, int k) {
  BenchCase c;
  c.name = name;
  c.group = group;
  c.dtype = "i8";
  c.setup = [channels, k](int threads) -> Graph {
    const Tensor xf = random_image_tensor(kBenchH, kBenchW, 3, 11);
    auto layers = std::make_shared<std::vector<QuantizedLayer>>();
    QuantParams qp = choose_activation_qparams(0.0f, 255.0f);
    Tensor stage = xf;
    int ci = 3;
    uint64_t seed = 101;
    for (int co : channels) {
      const ConvWeights w = random_conv(k, ci, co, seed++);
      layers->push_back(make_qlayer(stage, w, qp));
      stage = conv2d(stage, w);
      qp = layers->back().out_qp;
      ci = co;
    }
    auto xq = std::make_shared<Tensor>(
        quantize_tensor(xf, layers->front().in_qp));
    return [xq, layers, threads]() -> uint64_t {
      Tensor t = *xq;
      for (const QuantizedLayer& l : *layers) t = qconv2d(t, l, threads);
      return tensor_checksum(t);
    };
  };
  return c;
}

// "Conv3 - f3-16" baseline with one appended elementwise node.
BenchCase make_tail_case(const std::string& name,
                         const std::function<Tensor(const Tensor&, const Tensor&)>& op) {
  BenchCase c;
  c.name = name;
  c.group = "tensor-op";
  c.dtype = "f32";
  c.setup = [op](int threads) -> Graph {
    auto x = std::make_shared<Tensor>(random_image_tensor(kBenchH, kBenchW, 3, 11));
    auto w = std::make_shared<ConvWeights>(random_conv(3, 3, 16, 77));
    auto aux = std::make_shared<Tensor>(
        random_image_tensor(kBenchH, kBenchW, 16, 13));
    return [x, w, aux, op, threads]() -> uint64_t {
      Tensor t = conv2d(*x, *w, threads);
      t = op(t, *aux);
      return tensor_checksum(t);
    };
  };
  return c;
}

}  // namespace

std::vector<BenchCase> standard_suite(const std::string& dtype) {
  check(dtype == "f32" || dtype == "i8", ErrorCode::kInvalidArgument,
        "bench: dtype must be f32 or i8");
  std::vector<BenchCase> cases;

  if (dtype == "i8") {
    cases.push_back(make_qconv_case("Conv3 - f3-16", "tensor-op", {16}, 3));
    cases.push_back(make_qconv_case("Conv1 - f3-3", "conv-net", {3}, 1));
    cases.push_back(make_qconv_case("Conv3 - f3-3", "conv-net", {3}, 3));
    cases.push_back(make_qconv_case("Conv5 - f3-3", "conv-net", {3}, 5));
    cases.push_back(make_qconv_case("Conv3 - f3-8", "conv-net", {8}, 3));
    cases.push_back(make_qconv_case("Conv3 - f3-32", "conv-net", {32}, 3));
    cases.push_back(make_qconv_case("Conv3 - f3-8-8", "conv-net", {8, 8}, 3));
    cases.push_back(make_qconv_case("Conv3 - f3-8-16", "conv-net", {8, 16}, 3));
    cases.push_back(make_qconv_case("Conv3 - f3-16-16", "conv-net", {16, 16}, 3));
    cases.push_back(make_qconv_case("Conv3 - f3-16-32", "conv-net", {16, 32}, 3));
    cases.push_back(make_qconv_case("Conv3 - f3-32-32", "conv-net", {32, 32}, 3));

    // Integer nearest-conv + depth-to-space (pure int8 permutation path).
    BenchCase nc;
    nc.name = "nearest convolution + depth2space";
    nc.group = "upsample";
    nc.dtype = "i8";
    nc.setup = [](int) -> Graph {
      const QuantParams qp = choose_activation_qparams(0.0f, 255.0f);
      auto xq = std::make_shared<Tensor>(quantize_tensor(
          random_image_tensor(kBenchH, kBenchW, 3, 11), qp));
      return [xq]() -> uint64_t {
        Tensor t = nearest_conv_forward_i8(*xq, kUpscale);
        t = depth_to_space(t, kUpscale);
        return tensor_checksum(t);
      };
    };
    cases.push_back(std::move(nc));
    return cases;
  }

  // --- Single tensor-operation nodes on the Conv3 - f3-16 baseline ---
  cases.push_back(make_conv_case("Conv3 - f3-16", "tensor-op", {16}, 3, 1, nullptr));
  cases.push_back(make_conv_case("w/ dilation", "tensor-op", {16}, 3, 2, nullptr));
  cases.push_back(make_tail_case("+ Add", [](const Tensor& t, const Tensor& aux) {
    return add(t, aux);
  }));
  cases.push_back(make_tail_case("+ Multiply", [](const Tensor& t, const Tensor& aux) {
    return multiply(t, aux);
  }));
  cases.push_back(make_tail_case("+ Concat", [](const Tensor& t, const Tensor& aux) {
    return concat_channels(t, aux);
  }));
  cases.push_back(make_tail_case("+ Split", [](const Tensor& t, const Tensor&) {
    auto parts = split_channels(t, 2);
    return concat_channels(parts[0], parts[1]);  // keep both halves live
  }));
  cases.push_back(make_tail_case("+ ReLU", [](const Tensor& t, const Tensor&) {
    return relu(t);
  }));
  cases.push_back(make_tail_case("+ LeakyReLU", [](const Tensor& t, const Tensor&) {
    return leaky_relu(t, 0.2f);
  }));
  cases.push_back(make_tail_case("+ Global_Avgpool", [](const Tensor& t, const Tensor&) {
    return global_avgpool(t);
  }));
  cases.push_back(make_tail_case("+ Global_Maxpool", [](const Tensor& t, const Tensor&) {
    return global_maxpool(t);
  }));

  // --- Convolution arrangements ---
  cases.push_back(make_conv_case("Conv1 - f3-3", "conv-net", {3}, 1, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-3", "conv-net", {3}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv5 - f3-3", "conv-net", {3}, 5, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-8", "conv-net", {8}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-32", "conv-net", {32}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-8-8", "conv-net", {8, 8}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-8-16", "conv-net", {8, 16}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-16-16", "conv-net", {16, 16}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-16-32", "conv-net", {16, 32}, 3, 1, nullptr));
  cases.push_back(make_conv_case("Conv3 - f3-32-32", "conv-net", {32, 32}, 3, 1, nullptr));

  // --- Upsampling comparison at s=3 ---
  {
    BenchCase c;
    c.name = "nearest";
    c.group = "upsample";
    c.dtype = "f32";
    c.setup = [](int) -> Graph {
      auto x = std::make_shared<Tensor>(random_image_tensor(kBenchH, kBenchW, 3, 11));
      return [x]() { return tensor_checksum(nearest_upsample(*x, kUpscale)); };
    };
    cases.push_back(std::move(c));
  }
  {
    BenchCase c;
    c.name = "bilinear";
    c.group = "upsample";
    c.dtype = "f32";
    c.setup = [](int) -> Graph {
      auto x = std::make_shared<Tensor>(random_image_tensor(kBenchH, kBenchW, 3, 11));
      return [x]() { return tensor_checksum(bilinear_upsample(*x, kUpscale)); };
    };
    cases.push_back(std::move(c));
  }
  cases.push_back(make_conv_case(
      "Conv-3 + depth2space", "upsample", {3 * kUpscale * kUpscale}, 3, 1,
      [](const Tensor& t) { return depth_to_space(t, kUpscale); }));
  {
    // Literal 1x1 identity-group convolution route.
    BenchCase c;
    c.name = "nearest convolution + depth2space";
    c.group = "upsample";
    c.dtype = "f32";
    c.setup = [](int threads) -> Graph {
      auto x = std::make_shared<Tensor>(random_image_tensor(kBenchH, kBenchW, 3, 11));
      auto nc = std::make_shared<NearestConvWeights>(build_nearest_conv(kUpscale));
      return [x, nc, threads]() -> uint64_t {
        Tensor t = nearest_conv_apply_conv(*x, *nc, threads);
        t = depth_to_space(t, kUpscale);
        return tensor_checksum(t);
      };
    };
    cases.push_back(std::move(c));
  }
  {
    // Fused copy route, for comparison with the literal convolution.
    BenchCase c;
    c.name = "nearest convolution (fused) + depth2space";
    c.group = "upsample";
    c.dtype = "f32";
    c.setup = [](int) -> Graph {
      auto x = std::make_shared<Tensor>(random_image_tensor(kBenchH, kBenchW, 3, 11));
      auto nc = std::make_shared<NearestConvWeights>(build_nearest_conv(kUpscale));
      return [x, nc]() -> uint64_t {
        Tensor t = nearest_conv_forward(*x, *nc);
        t = depth_to_space(t, kUpscale);
        return tensor_checksum(t);
      };
    };
    cases.push_back(std::move(c));
  }
  return cases;
}

namespace {

std::string read_cpu_model() {
  std::ifstream f("/proc/cpuinfo");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("model name", 0) == 0) {
      const size_t colon = line.find(':');
      if (colon != std::string::npos) {
        size_t b = line.find_first_not_of(' ', colon + 1);
        return b == std::string::npos ? "unknown" : line.substr(b);
      }
    }
  }
  return "unknown";
}

void summarize(BenchCaseResult* r) {
  std::vector<double> s = r->samples_ms;
  std::sort(s.begin(), s.end());
  const size_t n = s.size();
  r->median_ms = n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  double sum = 0.0;
  for (double v : s) sum += v;
  r->mean_ms = sum / static_cast<double>(n);
  const size_t idx = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(n))) - 1;
  r->p95_ms = s[std::min(idx, n - 1)];
}

}  // namespace

BenchReport run_suite(const std::vector<BenchCase>& cases, int reps,
                      int warmups, int threads) {
  check(reps >= 10, ErrorCode::kInvalidArgument, "bench: reps must be >= 10");
  check(warmups >= 3, ErrorCode::kInvalidArgument,
        "bench: warmups must be >= 3");
  BenchReport report;
  report.reps = reps;
  report.warmups = warmups;
  report.threads = threads;
  report.cpu_model = read_cpu_model();

  for (const BenchCase& c : cases) {
    BenchCaseResult r;
    r.name = c.name;
    r.group = c.group;
    r.dtype = c.dtype;
    try {
      Graph graph = c.setup(threads);
      r.checksum = graph();  // validates the graph before timing begins
      for (int i = 1; i < warmups; ++i) graph();
      for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const uint64_t sum = graph();
        const auto t1 = std::chrono::steady_clock::now();
        check(sum == r.checksum, ErrorCode::kNumeric,
              "bench: nondeterministic output in case '" + c.name + "'");
        r.samples_ms.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      summarize(&r);
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    report.cases.push_back(std::move(r));
  }
  return report;
}

std::string emit_markdown(const BenchReport& report) {
  std::ostringstream out;
  out << "# Operator benchmark\n\n";
  out << "- cpu: " << report.cpu_model << "\n";
  out << "- threads: " << report.threads << "\n";
  out << "- reps: " << report.reps << " (after " << report.warmups
      << " warmups)\n";
  out << "- input shape: 1x" << kBenchH << "x" << kBenchW << "x3\n\n";
  out << "| case | group | dtype | median ms | mean ms | p95 ms |\n";
  out << "|------|-------|-------|-----------|---------|--------|\n";
  char buf[256];
  for (const BenchCaseResult& r : report.cases) {
    if (!r.ok) {
      out << "| " << r.name << " | " << r.group << " | " << r.dtype
          << " | failed: " << r.error << " | - | - |\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), "| %s | %s | %s | %.3f | %.3f | %.3f |\n",
                  r.name.c_str(), r.group.c_str(), r.dtype.c_str(),
                  r.median_ms, r.mean_ms, r.p95_ms);
    out << buf;
  }
  return out.str();
}

std::string emit_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "name,group,dtype,median_ms,mean_ms,p95_ms,reps,ok\n";
  char buf[320];
  for (const BenchCaseResult& r : report.cases) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.17g,%.17g,%.17g,%d,%d\n",
                  r.name.c_str(), r.group.c_str(), r.dtype.c_str(),
                  r.median_ms, r.mean_ms, r.p95_ms, report.reps,
                  r.ok ? 1 : 0);
    out << buf;
  }
  return out.str();
}

}  // namespace ncnet
