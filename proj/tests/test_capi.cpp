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

// Exercises the shared-library surface the CLI is built on. Everything
// here goes through the opaque-handle C API only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ncnet.h"
#include "testutil.hpp"

namespace fs = std::filesystem;

TEST_CASE("version and error surfaces") {
  CHECK(std::strlen(ncnet_version()) > 0);

  ncnet_image* img = nullptr;
  CHECK(ncnet_image_load_png(nullptr, &img) == NCNET_E_INVALID_ARGUMENT);
  CHECK(std::strlen(ncnet_last_error()) > 0);

  CHECK(ncnet_image_load_png("/definitely/not/here.png", &img) == NCNET_E_IO);
  CHECK(img == nullptr);
}

TEST_CASE("image create, pixel access, png round-trip") {
  const auto dir = testutil::make_temp_dir("capi-img");
  std::vector<uint8_t> rgb(3 * 5 * 4);
  for (size_t i = 0; i < rgb.size(); ++i) rgb[i] = static_cast<uint8_t>(i * 7);

  ncnet_image* img = nullptr;
  REQUIRE(ncnet_image_create(5, 4, rgb.data(), &img) == NCNET_OK);
  CHECK(ncnet_image_width(img) == 5);
  CHECK(ncnet_image_height(img) == 4);
  CHECK(std::memcmp(ncnet_image_pixels(img), rgb.data(), rgb.size()) == 0);

  const std::string path = (dir / "x.png").string();
  REQUIRE(ncnet_image_save_png(img, path.c_str()) == NCNET_OK);
  ncnet_image* back = nullptr;
  REQUIRE(ncnet_image_load_png(path.c_str(), &back) == NCNET_OK);
  CHECK(std::memcmp(ncnet_image_pixels(back), rgb.data(), rgb.size()) == 0);

  ncnet_image_free(img);
  ncnet_image_free(back);
  fs::remove_all(dir);

  CHECK(ncnet_image_create(0, 4, nullptr, &img) == NCNET_E_INVALID_ARGUMENT);
}

TEST_CASE("zero model through the C API acts as nearest upsampling") {
  ncnet_model* model = nullptr;
  REQUIRE(ncnet_model_create_zero(3, &model) == NCNET_OK);
  CHECK(ncnet_model_scale(model) == 3);

  const ncnet::ImageBuffer in_img = testutil::random_image(7, 5, 42);
  ncnet_image* in = nullptr;
  REQUIRE(ncnet_image_create(7, 5, in_img.pixels.data(), &in) == NCNET_OK);
  ncnet_image* out = nullptr;
  REQUIRE(ncnet_model_run(model, in, 1, &out) == NCNET_OK);
  REQUIRE(ncnet_image_width(out) == 21);
  REQUIRE(ncnet_image_height(out) == 15);

  // independent pixel-replication reference
  const uint8_t* op = ncnet_image_pixels(out);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 21; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(op[(y * 21 + x) * 3 + c] == in_img.at(x / 3, y / 3, c));

  // psnr of identical images is flagged infinite
  double mse = -1.0, db = 0.0;
  int32_t inf = 0;
  REQUIRE(ncnet_psnr(out, out, &mse, &db, &inf) == NCNET_OK);
  CHECK(inf == 1);
  CHECK(mse == 0.0);

  ncnet_image_free(in);
  ncnet_image_free(out);
  ncnet_model_free(model);
}

TEST_CASE("model save/load round-trip through the C API") {
  const auto dir = testutil::make_temp_dir("capi-model");
  const std::string path = (dir / "m.ncw").string();

  ncnet_model* model = nullptr;
  REQUIRE(ncnet_model_create(3, 99, &model) == NCNET_OK);
  REQUIRE(ncnet_model_save(model, path.c_str()) == NCNET_OK);

  ncnet_model* back = nullptr;
  REQUIRE(ncnet_model_load(path.c_str(), &back) == NCNET_OK);
  CHECK(ncnet_model_scale(back) == 3);

  ncnet_image* in = nullptr;
  const ncnet::ImageBuffer img = testutil::synth_image(12, 10, 5);
  REQUIRE(ncnet_image_create(12, 10, img.pixels.data(), &in) == NCNET_OK);
  ncnet_image *a = nullptr, *b = nullptr;
  REQUIRE(ncnet_model_run(model, in, 1, &a) == NCNET_OK);
  REQUIRE(ncnet_model_run(back, in, 1, &b) == NCNET_OK);
  CHECK(std::memcmp(ncnet_image_pixels(a), ncnet_image_pixels(b),
                    static_cast<size_t>(3) * 36 * 30) == 0);

  ncnet_image_free(in);
  ncnet_image_free(a);
  ncnet_image_free(b);
  ncnet_model_free(model);
  ncnet_model_free(back);
  fs::remove_all(dir);
}

TEST_CASE("manifest, train, quantize, int8 inference end to end") {
  const auto dir = testutil::make_temp_dir("capi-train");
  const int scale = 2;

  // three synthetic pairs: HR plus bicubic-downscaled LR
  std::string manifest_path = (dir / "train.tsv").string();
  {
    std::ofstream mf(manifest_path);
    for (int i = 0; i < 3; ++i) {
      const ncnet::ImageBuffer hr = testutil::synth_image(32, 32, 600 + i);
      const ncnet::ImageBuffer lr = testutil::bicubic_downscale(hr, scale);
      const std::string hr_path =
          (dir / ("hr" + std::to_string(i) + ".png")).string();
      const std::string lr_path =
          (dir / ("lr" + std::to_string(i) + ".png")).string();
      ncnet::save_png(hr, hr_path);
      ncnet::save_png(lr, lr_path);
      mf << lr_path << "\t" << hr_path << "\n";
    }
  }

  ncnet_dataset* ds = nullptr;
  REQUIRE(ncnet_manifest_load(manifest_path.c_str(), scale, &ds) == NCNET_OK);
  CHECK(ncnet_dataset_size(ds) == 3);
  const char* lr0 = nullptr;
  const char* hr0 = nullptr;
  REQUIRE(ncnet_dataset_paths(ds, 0, &lr0, &hr0) == NCNET_OK);
  CHECK(std::string(lr0).find("lr0.png") != std::string::npos);
  CHECK(ncnet_dataset_paths(ds, 5, &lr0, &hr0) == NCNET_E_INVALID_ARGUMENT);

  // wrong scale must fail the ratio validation
  ncnet_dataset* bad = nullptr;
  CHECK(ncnet_manifest_load(manifest_path.c_str(), 3, &bad) ==
        NCNET_E_SHAPE_MISMATCH);

  ncnet_train_config cfg;
  ncnet_train_config_default(&cfg);
  cfg.scale = scale;
  cfg.batch_size = 2;
  cfg.patch_phase1 = 12;
  cfg.patch_phase2 = 12;
  cfg.iters_phase1 = 4;
  cfg.iters_phase2 = 2;
  cfg.log_every = 2;
  cfg.seed = 7;

  const std::string log_path = (dir / "log.tsv").string();
  ncnet_model* model = nullptr;
  REQUIRE(ncnet_train(ds, nullptr, &cfg, log_path.c_str(), nullptr, nullptr,
                      &model) == NCNET_OK);
  CHECK(fs::exists(log_path));

  ncnet_qmodel* qm = nullptr;
  REQUIRE(ncnet_quantize(model, ds, &qm) == NCNET_OK);
  CHECK(ncnet_qmodel_scale(qm) == scale);

  const std::string qpath = (dir / "q.ncw").string();
  REQUIRE(ncnet_qmodel_save(qm, qpath.c_str()) == NCNET_OK);
  ncnet_qmodel* qback = nullptr;
  REQUIRE(ncnet_qmodel_load(qpath.c_str(), &qback) == NCNET_OK);

  // loading a quantized file as a float model must fail cleanly
  ncnet_model* wrong = nullptr;
  CHECK(ncnet_model_load(qpath.c_str(), &wrong) == NCNET_E_UNSUPPORTED);

  ncnet_image* lr_img = nullptr;
  const char* lr_path_again = nullptr;
  REQUIRE(ncnet_dataset_paths(ds, 0, &lr_path_again, nullptr) == NCNET_OK);
  REQUIRE(ncnet_image_load_png(lr_path_again, &lr_img) == NCNET_OK);

  ncnet_image *qa = nullptr, *qb = nullptr;
  REQUIRE(ncnet_qmodel_run(qm, lr_img, 1, &qa) == NCNET_OK);
  REQUIRE(ncnet_qmodel_run(qback, lr_img, 1, &qb) == NCNET_OK);
  CHECK(std::memcmp(ncnet_image_pixels(qa), ncnet_image_pixels(qb),
                    static_cast<size_t>(3) * ncnet_image_width(qa) *
                        ncnet_image_height(qa)) == 0);

  ncnet_image_free(lr_img);
  ncnet_image_free(qa);
  ncnet_image_free(qb);
  ncnet_qmodel_free(qm);
  ncnet_qmodel_free(qback);
  ncnet_model_free(model);
  ncnet_dataset_free(ds);
  fs::remove_all(dir);
}

TEST_CASE("bench through the C API renders both formats") {
  ncnet_bench_report* report = nullptr;
  REQUIRE(ncnet_bench_run(10, 3, 1, NCNET_BENCH_F32, &report) == NCNET_OK);

  char* md = nullptr;
  REQUIRE(ncnet_bench_report_render(report, NCNET_BENCH_FORMAT_MARKDOWN, &md) ==
          NCNET_OK);
  CHECK(std::string(md).find("Conv3 - f3-16") != std::string::npos);
  ncnet_string_free(md);

  char* csv = nullptr;
  REQUIRE(ncnet_bench_report_render(report, NCNET_BENCH_FORMAT_CSV, &csv) ==
          NCNET_OK);
  CHECK(std::string(csv).find("median_ms") != std::string::npos);
  ncnet_string_free(csv);

  ncnet_bench_report_free(report);

  // repetition and warmup floors are enforced
  CHECK(ncnet_bench_run(5, 3, 1, NCNET_BENCH_F32, &report) ==
        NCNET_E_INVALID_ARGUMENT);
  CHECK(ncnet_bench_run(10, 1, 1, NCNET_BENCH_F32, &report) ==
        NCNET_E_INVALID_ARGUMENT);
}
