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

#ifndef NCNET_TENSOR_HPP_
#define NCNET_TENSOR_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ncnet/error.hpp"

namespace ncnet {

enum class DType : uint8_t { F32 = 0, I8 = 1 };

// Affine quantization: real = scale * (q - zero_point).
struct QuantParams {
  float scale = 1.0f;
  int32_t zero_point = 0;
};

// NHWC extents. All four must be >= 1 and the element count must fit
// comfortably in the address space; the constructor rejects overflow.
struct Shape {
  int n = 1, h = 1, w = 1, c = 1;

  Shape() = default;
  Shape(int n_, int h_, int w_, int c_);

  int64_t elems() const {
    return static_cast<int64_t>(n) * h * w * c;
  }
  bool operator==(const Shape&) const = default;
};

// Contiguous row-major NHWC buffer, float32 or int8. Quantization params
// are attached exactly when the payload is int8. Tensors are treated as
// immutable by every operation; mutation happens only through construction
// or the trainer's explicitly exclusive weight updates.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(const Shape& shape) { return filled(shape, 0.0f); }
  static Tensor filled(const Shape& shape, float value);
  static Tensor filled_i8(const Shape& shape, int8_t value, QuantParams qp);

  const Shape& shape() const { return shape_; }
  DType dtype() const { return dtype_; }
  int64_t elems() const { return shape_.elems(); }

  const QuantParams& qparams() const;
  void set_qparams(QuantParams qp);

  // Linear offset of (n, h, w, c); unchecked.
  int64_t offset(int n, int h, int w, int c) const {
    return ((static_cast<int64_t>(n) * shape_.h + h) * shape_.w + w) *
               shape_.c + c;
  }

  // Bounds-checked element access.
  float at(int n, int h, int w, int c) const;
  int8_t at_i8(int n, int h, int w, int c) const;

  float* f32();
  const float* f32() const;
  int8_t* i8();
  const int8_t* i8() const;

 private:
  Shape shape_;
  DType dtype_ = DType::F32;
  std::vector<float> fdata_;
  std::vector<int8_t> idata_;
  std::optional<QuantParams> qparams_;

  void check_index(int n, int h, int w, int c) const;
};

// Elementwise sum; shapes must match exactly, F32 only (no broadcasting).
Tensor add(const Tensor& a, const Tensor& b);

// Exact (min, max) over all elements of a F32 tensor.
std::pair<float, float> minmax(const Tensor& t);

}  // namespace ncnet

#endif  // NCNET_TENSOR_HPP_
