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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "ncnet/tensor.hpp"
#include "testutil.hpp"

using ncnet::DType;
using ncnet::Error;
using ncnet::QuantParams;
using ncnet::Shape;
using ncnet::Tensor;

TEST_CASE("shape validates extents and overflow") {
  CHECK_THROWS_AS(Shape(0, 1, 1, 1), Error);
  CHECK_THROWS_AS(Shape(1, -2, 1, 1), Error);
  CHECK_THROWS_AS(Shape(1 << 20, 1 << 20, 1 << 20, 4), Error);
  const Shape s(2, 3, 4, 5);
  CHECK(s.elems() == 120);
}

TEST_CASE("filled tensors") {
  const Tensor z = Tensor::zeros(Shape(1, 2, 2, 1));
  CHECK(z.elems() == 4);
  for (int i = 0; i < 4; ++i) CHECK(z.f32()[i] == 0.0f);

  const Tensor ones = Tensor::filled(Shape(1, 1, 1, 3), 1.0f);
  for (int i = 0; i < 3; ++i) CHECK(ones.f32()[i] == 1.0f);

  const Tensor t = Tensor::filled(Shape(2, 3, 4, 5), 7.5f);
  CHECK(t.elems() == 120);
  for (int64_t i = 0; i < t.elems(); ++i) CHECK(t.f32()[i] == 7.5f);
}

TEST_CASE("indexing matches the NHWC linear formula") {
  Tensor t = Tensor::zeros(Shape(1, 2, 2, 2));
  for (int i = 0; i < 8; ++i) t.f32()[i] = static_cast<float>(i);
  CHECK(t.at(0, 1, 0, 1) == 5.0f);  // (1*2 + 0)*2 + 1
  CHECK(t.at(0, 0, 0, 0) == 0.0f);
  CHECK(t.at(0, 1, 1, 1) == 7.0f);
  CHECK_THROWS_AS(t.at(0, 2, 0, 0), Error);
  CHECK_THROWS_AS(t.at(0, 0, 0, 2), Error);
  CHECK_THROWS_AS(t.at(1, 0, 0, 0), Error);
}

TEST_CASE("offset round-trips through index decomposition") {
  ncnet::Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape sh(1 + static_cast<int>(rng.next_below(3)),
                   1 + static_cast<int>(rng.next_below(7)),
                   1 + static_cast<int>(rng.next_below(7)),
                   1 + static_cast<int>(rng.next_below(5)));
    const Tensor t = Tensor::zeros(sh);
    const int n = static_cast<int>(rng.next_below(sh.n));
    const int h = static_cast<int>(rng.next_below(sh.h));
    const int w = static_cast<int>(rng.next_below(sh.w));
    const int c = static_cast<int>(rng.next_below(sh.c));
    int64_t off = t.offset(n, h, w, c);
    const int rc = static_cast<int>(off % sh.c);
    off /= sh.c;
    const int rw = static_cast<int>(off % sh.w);
    off /= sh.w;
    const int rh = static_cast<int>(off % sh.h);
    const int rn = static_cast<int>(off / sh.h);
    CHECK(rn == n);
    CHECK(rh == h);
    CHECK(rw == w);
    CHECK(rc == c);
  }
}

TEST_CASE("add basics") {
  Tensor a = Tensor::zeros(Shape(1, 1, 1, 2));
  Tensor b = Tensor::zeros(Shape(1, 1, 1, 2));
  a.f32()[0] = 1.0f;
  a.f32()[1] = 2.0f;
  b.f32()[0] = 3.0f;
  b.f32()[1] = 4.0f;
  const Tensor sum = ncnet::add(a, b);
  CHECK(sum.f32()[0] == 4.0f);
  CHECK(sum.f32()[1] == 6.0f);

  const Tensor t = testutil::random_tensor(Shape(2, 3, 3, 4), -5.0f, 5.0f, 7);
  CHECK(testutil::bit_equal(ncnet::add(t, Tensor::zeros(t.shape())), t));

  CHECK_THROWS_AS(ncnet::add(a, Tensor::zeros(Shape(1, 1, 2, 1))), Error);
}

TEST_CASE("add matches a scalar loop oracle exactly") {
  const Tensor a = testutil::random_tensor(Shape(2, 4, 5, 3), -10.0f, 10.0f, 1);
  const Tensor b = testutil::random_tensor(Shape(2, 4, 5, 3), -10.0f, 10.0f, 2);
  const Tensor sum = ncnet::add(a, b);
  for (int64_t i = 0; i < a.elems(); ++i)
    CHECK(sum.f32()[i] == a.f32()[i] + b.f32()[i]);
}

TEST_CASE("add is commutative and associative on small integer floats") {
  ncnet::Rng rng(99);
  const Shape sh(1, 4, 4, 2);
  auto random_int_tensor = [&](uint64_t) {
    Tensor t = Tensor::zeros(sh);
    for (int64_t i = 0; i < t.elems(); ++i)
      t.f32()[i] = static_cast<float>(static_cast<int64_t>(rng.next_below(1 << 20)) -
                                      (1 << 19));
    return t;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = random_int_tensor(0);
    const Tensor b = random_int_tensor(0);
    const Tensor c = random_int_tensor(0);
    CHECK(testutil::bit_equal(ncnet::add(a, b), ncnet::add(b, a)));
    CHECK(testutil::bit_equal(ncnet::add(ncnet::add(a, b), c),
                              ncnet::add(a, ncnet::add(b, c))));
  }
}

TEST_CASE("minmax basics") {
  Tensor t = Tensor::zeros(Shape(1, 1, 1, 3));
  t.f32()[0] = -1.0f;
  t.f32()[1] = 0.0f;
  t.f32()[2] = 3.0f;
  auto [lo, hi] = ncnet::minmax(t);
  CHECK(lo == -1.0f);
  CHECK(hi == 3.0f);

  const Tensor c = Tensor::filled(Shape(2, 2, 2, 2), 5.0f);
  auto [clo, chi] = ncnet::minmax(c);
  CHECK(clo == 5.0f);
  CHECK(chi == 5.0f);
}

TEST_CASE("minmax matches a sort-based oracle") {
  const Tensor t = testutil::random_tensor(Shape(2, 5, 7, 3), -42.0f, 17.0f, 3);
  std::vector<float> sorted(t.f32(), t.f32() + t.elems());
  std::sort(sorted.begin(), sorted.end());
  auto [lo, hi] = ncnet::minmax(t);
  CHECK(lo == sorted.front());
  CHECK(hi == sorted.back());
}

TEST_CASE("minmax bounds every element") {
  const Tensor t = testutil::random_tensor(Shape(1, 6, 6, 4), -3.0f, 9.0f, 4);
  auto [lo, hi] = ncnet::minmax(t);
  for (int64_t i = 0; i < t.elems(); ++i) {
    CHECK(t.f32()[i] >= lo);
    CHECK(t.f32()[i] <= hi);
  }
}

TEST_CASE("quantization params attach exactly to int8 tensors") {
  const Tensor q = Tensor::filled_i8(Shape(1, 2, 2, 1), 7, QuantParams{0.5f, -3});
  CHECK(q.dtype() == DType::I8);
  CHECK(q.qparams().scale == 0.5f);
  CHECK(q.qparams().zero_point == -3);
  CHECK(q.at_i8(0, 1, 1, 0) == 7);

  const Tensor f = Tensor::zeros(Shape(1, 1, 1, 1));
  CHECK_THROWS_AS(f.qparams(), Error);
  CHECK_THROWS_AS(Tensor::filled_i8(Shape(1, 1, 1, 1), 0, QuantParams{0.0f, 0}),
                  Error);
  CHECK_THROWS_AS(Tensor::filled_i8(Shape(1, 1, 1, 1), 0, QuantParams{1.0f, 200}),
                  Error);
}
