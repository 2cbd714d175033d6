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

#ifndef NCNET_IMAGE_HPP_
#define NCNET_IMAGE_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncnet/tensor.hpp"

namespace ncnet {

// 8-bit RGB raster, row-major triples.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // 3 * width * height bytes

  static ImageBuffer create(int width, int height);

  uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
};

// PNG codec. 8-bit depth only; grayscale and palette images are promoted
// to RGB, alpha is dropped with a warning on stderr. Malformed streams
// raise parse errors carrying the byte offset of the failure.
ImageBuffer decode_png(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> encode_png(const ImageBuffer& img);

ImageBuffer load_png(const std::string& path);
void save_png(const ImageBuffer& img, const std::string& path);

// Reads just the IHDR to get (width, height) without decoding the image.
std::pair<int, int> png_dimensions(const std::string& path);

// uint8 -> float32 keeps 0..255 values exact; the reverse clips to
// [0, 255] and rounds half away from zero.
Tensor img_to_tensor(const ImageBuffer& img);
ImageBuffer tensor_to_img(const Tensor& t);

}  // namespace ncnet

#endif  // NCNET_IMAGE_HPP_
