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

#include "ncnet/tensor.hpp"

#include <string>

namespace ncnet {

namespace {

// Largest element count we are willing to address (16 GiB of f32).
constexpr int64_t kMaxElems = int64_t{1} << 32;

std::string shape_str(int n, int h, int w, int c) {
  return "(" + std::to_string(n) + "," + std::to_string(h) + "," +
         std::to_string(w) + "," + std::to_string(c) + ")";
}

}  // namespace

Shape::Shape(int n_, int h_, int w_, int c_) : n(n_), h(h_), w(w_), c(c_) {
  check(n >= 1 && h >= 1 && w >= 1 && c >= 1, ErrorCode::kInvalidArgument,
        "shape extents must all be >= 1, got " + shape_str(n, h, w, c));
  int64_t count = n;
  for (int64_t d : {int64_t{h}, int64_t{w}, int64_t{c}}) {
    if (__builtin_mul_overflow(count, d, &count) || count > kMaxElems) {
      fail(ErrorCode::kInvalidArgument,
           "shape " + shape_str(n, h, w, c) + " overflows the address space");
    }
  }
}

Tensor Tensor::filled(const Shape& shape, float value) {
  Tensor t;
  t.shape_ = shape;
  t.dtype_ = DType::F32;
  t.fdata_.assign(static_cast<size_t>(shape.elems()), value);
  return t;
}

Tensor Tensor::filled_i8(const Shape& shape, int8_t value, QuantParams qp) {
  check(qp.scale > 0.0f, ErrorCode::kInvalidArgument,
        "quantization scale must be positive");
  check(qp.zero_point >= -128 && qp.zero_point <= 127,
        ErrorCode::kInvalidArgument, "zero point out of int8 range");
  Tensor t;
  t.shape_ = shape;
  t.dtype_ = DType::I8;
  t.idata_.assign(static_cast<size_t>(shape.elems()), value);
  t.qparams_ = qp;
  return t;
}

const QuantParams& Tensor::qparams() const {
  check(qparams_.has_value(), ErrorCode::kInvalidArgument,
        "tensor has no quantization params (dtype is not int8)");
  return *qparams_;
}

void Tensor::set_qparams(QuantParams qp) {
  check(dtype_ == DType::I8, ErrorCode::kInvalidArgument,
        "quantization params only apply to int8 tensors");
  check(qp.scale > 0.0f, ErrorCode::kInvalidArgument,
        "quantization scale must be positive");
  qparams_ = qp;
}

void Tensor::check_index(int n, int h, int w, int c) const {
  if (n < 0 || n >= shape_.n || h < 0 || h >= shape_.h || w < 0 ||
      w >= shape_.w || c < 0 || c >= shape_.c) {
    fail(ErrorCode::kInvalidArgument,
         "index " + shape_str(n, h, w, c) + " out of range for shape " +
             shape_str(shape_.n, shape_.h, shape_.w, shape_.c));
  }
}

float Tensor::at(int n, int h, int w, int c) const {
  check_index(n, h, w, c);
  return f32()[offset(n, h, w, c)];
}

int8_t Tensor::at_i8(int n, int h, int w, int c) const {
  check_index(n, h, w, c);
  return i8()[offset(n, h, w, c)];
}

float* Tensor::f32() {
  check(dtype_ == DType::F32, ErrorCode::kInvalidArgument,
        "tensor is not float32");
  return fdata_.data();
}

const float* Tensor::f32() const {
  check(dtype_ == DType::F32, ErrorCode::kInvalidArgument,
        "tensor is not float32");
  return fdata_.data();
}

int8_t* Tensor::i8() {
  check(dtype_ == DType::I8, ErrorCode::kInvalidArgument,
        "tensor is not int8");
  return idata_.data();
}

const int8_t* Tensor::i8() const {
  check(dtype_ == DType::I8, ErrorCode::kInvalidArgument,
        "tensor is not int8");
  return idata_.data();
}

Tensor add(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), ErrorCode::kShapeMismatch,
        "add: shapes differ");
  check(a.dtype() == DType::F32 && b.dtype() == DType::F32,
        ErrorCode::kInvalidArgument, "add: operands must be float32");
  Tensor out = Tensor::zeros(a.shape());
  const float* pa = a.f32();
  const float* pb = b.f32();
  float* po = out.f32();
  const int64_t count = a.elems();
  for (int64_t i = 0; i < count; ++i) po[i] = pa[i] + pb[i];
  return out;
}

std::pair<float, float> minmax(const Tensor& t) {
  check(t.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "minmax: tensor must be float32");
  const float* p = t.f32();
  float lo = p[0], hi = p[0];
  const int64_t count = t.elems();
  for (int64_t i = 1; i < count; ++i) {
    if (p[i] < lo) lo = p[i];
    if (p[i] > hi) hi = p[i];
  }
  return {lo, hi};
}

}  // namespace ncnet
