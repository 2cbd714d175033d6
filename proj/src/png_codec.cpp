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

// Minimal PNG reader/writer on top of zlib. Supports the 8-bit,
// non-interlaced subset (gray, gray+alpha, RGB, RGBA, 8-bit palette),
// which covers every image this engine produces or consumes. Parse errors
// report the byte offset where decoding stopped.

#include <zlib.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "ncnet/error.hpp"
#include "ncnet/image.hpp"

namespace ncnet {

namespace {

constexpr uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

[[noreturn]] void parse_fail(size_t offset, const std::string& what) {
  fail(ErrorCode::kParse,
       "png: " + what + " at byte " + std::to_string(offset));
}

uint32_t read_u32be(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

int channels_for_color_type(int color_type, size_t offset) {
  switch (color_type) {
    case 0: return 1;  // gray
    case 2: return 3;  // rgb
    case 3: return 1;  // palette index
    case 4: return 2;  // gray + alpha
    case 6: return 4;  // rgba
    default: parse_fail(offset, "unknown color type " + std::to_string(color_type));
  }
}

uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<uint8_t>(a);
  if (pb <= pc) return static_cast<uint8_t>(b);
  return static_cast<uint8_t>(c);
}

struct Ihdr {
  uint32_t width = 0, height = 0;
  int bit_depth = 0, color_type = 0, interlace = 0;
};

struct Chunks {
  Ihdr ihdr;
  std::vector<uint8_t> idat;
  std::vector<uint8_t> palette;  // 3 bytes per entry
  bool has_trns = false;
};

Chunks walk_chunks(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
    parse_fail(0, "bad signature");
  }
  Chunks out;
  bool saw_ihdr = false, saw_iend = false;
  size_t pos = 8;
  while (!saw_iend) {
    if (pos + 8 > bytes.size()) parse_fail(pos, "truncated chunk header");
    const uint32_t len = read_u32be(&bytes[pos]);
    if (len > 0x7fffffffu) parse_fail(pos, "oversized chunk");
    char type[5] = {0};
    std::memcpy(type, &bytes[pos + 4], 4);
    if (pos + 12 + static_cast<size_t>(len) > bytes.size())
      parse_fail(pos, "truncated chunk '" + std::string(type) + "'");
    const uint8_t* data = &bytes[pos + 8];
    const uint32_t want_crc = read_u32be(&bytes[pos + 8 + len]);
    uint32_t crc = static_cast<uint32_t>(crc32(0L, Z_NULL, 0));
    crc = static_cast<uint32_t>(crc32(crc, &bytes[pos + 4], 4 + len));
    if (crc != want_crc)
      parse_fail(pos + 8 + len, "bad CRC in chunk '" + std::string(type) + "'");

    if (std::strcmp(type, "IHDR") == 0) {
      if (len != 13) parse_fail(pos, "IHDR must be 13 bytes");
      out.ihdr.width = read_u32be(data);
      out.ihdr.height = read_u32be(data + 4);
      out.ihdr.bit_depth = data[8];
      out.ihdr.color_type = data[9];
      if (data[10] != 0) parse_fail(pos, "unknown compression method");
      if (data[11] != 0) parse_fail(pos, "unknown filter method");
      out.ihdr.interlace = data[12];
      saw_ihdr = true;
    } else if (std::strcmp(type, "PLTE") == 0) {
      if (len % 3 != 0) parse_fail(pos, "PLTE length not a multiple of 3");
      out.palette.assign(data, data + len);
    } else if (std::strcmp(type, "IDAT") == 0) {
      if (!saw_ihdr) parse_fail(pos, "IDAT before IHDR");
      out.idat.insert(out.idat.end(), data, data + len);
    } else if (std::strcmp(type, "tRNS") == 0) {
      out.has_trns = true;
    } else if (std::strcmp(type, "IEND") == 0) {
      saw_iend = true;
    }
    // ancillary chunks are skipped
    pos += 12 + len;
  }
  if (!saw_ihdr) parse_fail(8, "missing IHDR");
  if (out.idat.empty()) parse_fail(pos, "missing IDAT");
  return out;
}

}  // namespace

ImageBuffer decode_png(const std::vector<uint8_t>& bytes) {
  const Chunks ch = walk_chunks(bytes);
  const Ihdr& h = ch.ihdr;
  if (h.width == 0 || h.height == 0) parse_fail(16, "zero image extent");
  if (h.width > 1u << 24 || h.height > 1u << 24)
    fail(ErrorCode::kUnsupported, "png: image too large");
  if (h.bit_depth != 8)
    fail(ErrorCode::kUnsupported,
         "png: unsupported bit depth " + std::to_string(h.bit_depth) +
             " (only 8-bit images are supported)");
  if (h.interlace != 0)
    fail(ErrorCode::kUnsupported, "png: interlaced images are not supported");
  const int nch = channels_for_color_type(h.color_type, 25);
  if (h.color_type == 3 && ch.palette.empty())
    fail(ErrorCode::kParse, "png: palette image without PLTE chunk");

  const size_t stride = static_cast<size_t>(h.width) * nch;
  const size_t raw_size = (stride + 1) * h.height;
  std::vector<uint8_t> raw(raw_size);
  uLongf dest_len = raw_size;
  const int zrc = uncompress(raw.data(), &dest_len, ch.idat.data(),
                             static_cast<uLong>(ch.idat.size()));
  if (zrc != Z_OK || dest_len != raw_size)
    fail(ErrorCode::kParse, "png: IDAT inflate failed (zlib rc " +
                                std::to_string(zrc) + ")");

  // Undo per-row filters in place (result stored without filter bytes).
  std::vector<uint8_t> img(stride * h.height);
  const int bpp = nch;
  for (uint32_t y = 0; y < h.height; ++y) {
    const uint8_t filter = raw[y * (stride + 1)];
    const uint8_t* src = &raw[y * (stride + 1) + 1];
    uint8_t* dst = &img[y * stride];
    const uint8_t* up = y > 0 ? &img[(y - 1) * stride] : nullptr;
    switch (filter) {
      case 0:
        std::memcpy(dst, src, stride);
        break;
      case 1:
        for (size_t i = 0; i < stride; ++i)
          dst[i] = static_cast<uint8_t>(src[i] + (i >= static_cast<size_t>(bpp) ? dst[i - bpp] : 0));
        break;
      case 2:
        for (size_t i = 0; i < stride; ++i)
          dst[i] = static_cast<uint8_t>(src[i] + (up ? up[i] : 0));
        break;
      case 3:
        for (size_t i = 0; i < stride; ++i) {
          const int left = i >= static_cast<size_t>(bpp) ? dst[i - bpp] : 0;
          const int above = up ? up[i] : 0;
          dst[i] = static_cast<uint8_t>(src[i] + ((left + above) >> 1));
        }
        break;
      case 4:
        for (size_t i = 0; i < stride; ++i) {
          const int left = i >= static_cast<size_t>(bpp) ? dst[i - bpp] : 0;
          const int above = up ? up[i] : 0;
          const int upleft = (up && i >= static_cast<size_t>(bpp)) ? up[i - bpp] : 0;
          dst[i] = static_cast<uint8_t>(src[i] + paeth(left, above, upleft));
        }
        break;
      default:
        parse_fail(8, "unknown row filter " + std::to_string(filter));
    }
  }

  const bool drops_alpha = h.color_type == 4 || h.color_type == 6 || ch.has_trns;
  if (drops_alpha)
    std::fprintf(stderr, "png: alpha channel dropped\n");

  ImageBuffer out = ImageBuffer::create(static_cast<int>(h.width),
                                        static_cast<int>(h.height));
  const size_t pixels = static_cast<size_t>(h.width) * h.height;
  for (size_t i = 0; i < pixels; ++i) {
    const uint8_t* p = &img[i * nch];
    uint8_t r, g, b;
    switch (h.color_type) {
      case 0: case 4:
        r = g = b = p[0];
        break;
      case 2: case 6:
        r = p[0]; g = p[1]; b = p[2];
        break;
      default: {  // palette
        const size_t idx = static_cast<size_t>(p[0]) * 3;
        if (idx + 2 >= ch.palette.size())
          fail(ErrorCode::kParse, "png: palette index out of range");
        r = ch.palette[idx]; g = ch.palette[idx + 1]; b = ch.palette[idx + 2];
      }
    }
    out.pixels[i * 3] = r;
    out.pixels[i * 3 + 1] = g;
    out.pixels[i * 3 + 2] = b;
  }
  return out;
}

std::vector<uint8_t> encode_png(const ImageBuffer& img) {
  check(img.width > 0 && img.height > 0 &&
            img.pixels.size() == static_cast<size_t>(3) * img.width * img.height,
        ErrorCode::kInvalidArgument, "png: invalid image buffer");

  const size_t stride = static_cast<size_t>(img.width) * 3;
  std::vector<uint8_t> raw((stride + 1) * img.height);
  // Sub filter on every row; cheap and effective on photographic data.
  for (int y = 0; y < img.height; ++y) {
    uint8_t* row = &raw[static_cast<size_t>(y) * (stride + 1)];
    row[0] = 1;
    const uint8_t* src = &img.pixels[static_cast<size_t>(y) * stride];
    for (size_t i = 0; i < stride; ++i)
      row[1 + i] = static_cast<uint8_t>(src[i] - (i >= 3 ? src[i - 3] : 0));
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> deflated(bound);
  const int zrc = compress2(deflated.data(), &bound, raw.data(),
                            static_cast<uLong>(raw.size()), 6);
  check(zrc == Z_OK, ErrorCode::kIo, "png: deflate failed");
  deflated.resize(bound);

  std::vector<uint8_t> out(kSignature, kSignature + 8);
  auto put_chunk = [&out](const char* type, const std::vector<uint8_t>& data) {
    put_u32be(out, static_cast<uint32_t>(data.size()));
    const size_t crc_begin = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uint32_t crc = static_cast<uint32_t>(crc32(0L, Z_NULL, 0));
    crc = static_cast<uint32_t>(
        crc32(crc, &out[crc_begin], static_cast<uInt>(4 + data.size())));
    put_u32be(out, crc);
  };

  std::vector<uint8_t> ihdr;
  put_u32be(ihdr, static_cast<uint32_t>(img.width));
  put_u32be(ihdr, static_cast<uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: RGB
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  put_chunk("IHDR", ihdr);
  put_chunk("IDAT", deflated);
  put_chunk("IEND", {});
  return out;
}

}  // namespace ncnet
