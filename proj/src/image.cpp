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

#include "ncnet/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ncnet/error.hpp"

namespace ncnet {

ImageBuffer ImageBuffer::create(int width, int height) {
  check(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
        "image: extents must be >= 1");
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<size_t>(3) * width * height, 0);
  return img;
}

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), ErrorCode::kIo, "cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  check(!in.bad(), ErrorCode::kIo, "read failed for " + path);
  return bytes;
}

}  // namespace

ImageBuffer load_png(const std::string& path) {
  try {
    return decode_png(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_png(const ImageBuffer& img, const std::string& path) {
  const std::vector<uint8_t> bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  check(out.good(), ErrorCode::kIo, "write failed for " + path);
}

std::pair<int, int> png_dimensions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), ErrorCode::kIo, "cannot open " + path);
  uint8_t head[24];
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  check(in.gcount() == sizeof(head), ErrorCode::kParse,
        path + ": png: truncated header at byte 0");
  static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  for (int i = 0; i < 8; ++i)
    check(head[i] == sig[i], ErrorCode::kParse,
          path + ": png: bad signature at byte 0");
  check(head[12] == 'I' && head[13] == 'H' && head[14] == 'D' && head[15] == 'R',
        ErrorCode::kParse, path + ": png: IHDR not first chunk at byte 12");
  auto be = [&](int o) {
    return (static_cast<uint32_t>(head[o]) << 24) |
           (static_cast<uint32_t>(head[o + 1]) << 16) |
           (static_cast<uint32_t>(head[o + 2]) << 8) |
           static_cast<uint32_t>(head[o + 3]);
  };
  return {static_cast<int>(be(16)), static_cast<int>(be(20))};
}

Tensor img_to_tensor(const ImageBuffer& img) {
  check(img.width >= 1 && img.height >= 1 &&
            img.pixels.size() == static_cast<size_t>(3) * img.width * img.height,
        ErrorCode::kInvalidArgument, "img_to_tensor: invalid image buffer");
  Tensor t = Tensor::zeros(Shape(1, img.height, img.width, 3));
  float* p = t.f32();
  const size_t count = img.pixels.size();
  for (size_t i = 0; i < count; ++i) p[i] = static_cast<float>(img.pixels[i]);
  return t;
}

ImageBuffer tensor_to_img(const Tensor& t) {
  const Shape& sh = t.shape();
  check(t.dtype() == DType::F32, ErrorCode::kInvalidArgument,
        "tensor_to_img: tensor must be float32");
  check(sh.n == 1 && sh.c == 3, ErrorCode::kShapeMismatch,
        "tensor_to_img: tensor must be (1, h, w, 3)");
  ImageBuffer img = ImageBuffer::create(sh.w, sh.h);
  const float* p = t.f32();
  const size_t count = img.pixels.size();
  for (size_t i = 0; i < count; ++i) {
    float v = p[i];
    if (v < 0.0f) v = 0.0f;
    if (v > 255.0f) v = 255.0f;
    img.pixels[i] = static_cast<uint8_t>(std::llround(v));
  }
  return img;
}

}  // namespace ncnet
