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

#include "ncnet.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ncnet/bench.hpp"
#include "ncnet/error.hpp"
#include "ncnet/image.hpp"
#include "ncnet/metrics.hpp"
#include "ncnet/model.hpp"
#include "ncnet/quantize.hpp"
#include "ncnet/trainer.hpp"
#include "ncnet/weights_io.hpp"

struct ncnet_image {
  ncnet::ImageBuffer img;
};
struct ncnet_model {
  ncnet::ModelWeights m;
};
struct ncnet_qmodel {
  ncnet::QuantizedModel qm;
};
struct ncnet_dataset {
  std::vector<ncnet::ManifestEntry> entries;
  int scale = 0;
};
struct ncnet_bench_report {
  ncnet::BenchReport report;
};

namespace {

thread_local std::string g_last_error;

ncnet_status map_code(ncnet::ErrorCode code) {
  using ncnet::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return NCNET_E_INVALID_ARGUMENT;
    case ErrorCode::kShapeMismatch: return NCNET_E_SHAPE_MISMATCH;
    case ErrorCode::kIo: return NCNET_E_IO;
    case ErrorCode::kParse: return NCNET_E_PARSE;
    case ErrorCode::kUnsupported: return NCNET_E_UNSUPPORTED;
    case ErrorCode::kNumeric: return NCNET_E_NUMERIC;
  }
  return NCNET_E_INTERNAL;
}

template <typename Fn>
ncnet_status wrap(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return NCNET_OK;
  } catch (const ncnet::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NCNET_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return NCNET_E_INTERNAL;
  }
}

ncnet_status invalid(const char* msg) {
  g_last_error = msg;
  return NCNET_E_INVALID_ARGUMENT;
}

std::vector<ncnet::ImageBuffer> load_lr_images(const ncnet_dataset* ds) {
  std::vector<ncnet::ImageBuffer> images;
  images.reserve(ds->entries.size());
  for (const auto& e : ds->entries) images.push_back(ncnet::load_png(e.lr_path));
  return images;
}

}  // namespace

extern "C" {

const char* ncnet_version(void) { return "0.1.0"; }

const char* ncnet_last_error(void) { return g_last_error.c_str(); }

void ncnet_string_free(char* s) { delete[] s; }

/* ---- images ---- */

ncnet_status ncnet_image_create(int32_t width, int32_t height,
                                const uint8_t* rgb_or_null,
                                ncnet_image** out) {
  if (!out) return invalid("out is null");
  *out = nullptr;
  return wrap([&] {
    auto img = std::make_unique<ncnet_image>();
    img->img = ncnet::ImageBuffer::create(width, height);
    if (rgb_or_null)
      std::memcpy(img->img.pixels.data(), rgb_or_null, img->img.pixels.size());
    *out = img.release();
  });
}

ncnet_status ncnet_image_load_png(const char* path, ncnet_image** out) {
  if (!out || !path) return invalid("path or out is null");
  *out = nullptr;
  return wrap([&] {
    auto img = std::make_unique<ncnet_image>();
    img->img = ncnet::load_png(path);
    *out = img.release();
  });
}

ncnet_status ncnet_image_save_png(const ncnet_image* img, const char* path) {
  if (!img || !path) return invalid("image or path is null");
  return wrap([&] { ncnet::save_png(img->img, path); });
}

int32_t ncnet_image_width(const ncnet_image* img) {
  return img ? img->img.width : 0;
}

int32_t ncnet_image_height(const ncnet_image* img) {
  return img ? img->img.height : 0;
}

const uint8_t* ncnet_image_pixels(const ncnet_image* img) {
  return img ? img->img.pixels.data() : nullptr;
}

void ncnet_image_free(ncnet_image* img) { delete img; }

/* ---- float model ---- */

ncnet_status ncnet_model_create(int32_t scale, uint64_t seed,
                                ncnet_model** out) {
  if (!out) return invalid("out is null");
  *out = nullptr;
  return wrap([&] {
    ncnet::ModelSpec spec;
    spec.scale = scale;
    auto m = std::make_unique<ncnet_model>();
    m->m = ncnet::init_weights(spec, seed);
    *out = m.release();
  });
}

ncnet_status ncnet_model_create_zero(int32_t scale, ncnet_model** out) {
  if (!out) return invalid("out is null");
  *out = nullptr;
  return wrap([&] {
    ncnet::ModelSpec spec;
    spec.scale = scale;
    auto m = std::make_unique<ncnet_model>();
    m->m = ncnet::zero_weights(spec);
    *out = m.release();
  });
}

ncnet_status ncnet_model_load(const char* path, ncnet_model** out) {
  if (!out || !path) return invalid("path or out is null");
  *out = nullptr;
  return wrap([&] {
    auto m = std::make_unique<ncnet_model>();
    m->m = ncnet::load_model(path);
    *out = m.release();
  });
}

ncnet_status ncnet_model_save(const ncnet_model* m, const char* path) {
  if (!m || !path) return invalid("model or path is null");
  return wrap([&] { ncnet::save_model(m->m, path); });
}

int32_t ncnet_model_scale(const ncnet_model* m) {
  return m ? m->m.spec.scale : 0;
}

ncnet_status ncnet_model_run(const ncnet_model* m, const ncnet_image* input,
                             int32_t threads, ncnet_image** out) {
  if (!m || !input || !out) return invalid("model, input or out is null");
  *out = nullptr;
  return wrap([&] {
    const ncnet::Tensor y = ncnet::img_to_tensor(input->img);
    const ncnet::Tensor sr = ncnet::model_forward(y, m->m, threads < 1 ? 1 : threads);
    auto img = std::make_unique<ncnet_image>();
    img->img = ncnet::tensor_to_img(sr);
    *out = img.release();
  });
}

void ncnet_model_free(ncnet_model* m) { delete m; }

/* ---- metrics ---- */

ncnet_status ncnet_psnr(const ncnet_image* a, const ncnet_image* b,
                        double* mse, double* psnr_db, int32_t* is_infinite) {
  if (!a || !b) return invalid("image is null");
  return wrap([&] {
    const ncnet::PsnrResult r = ncnet::psnr(a->img, b->img);
    if (mse) *mse = r.mse;
    if (psnr_db) *psnr_db = r.is_infinite
                                ? std::numeric_limits<double>::infinity()
                                : r.psnr_db;
    if (is_infinite) *is_infinite = r.is_infinite ? 1 : 0;
  });
}

/* ---- datasets ---- */

ncnet_status ncnet_manifest_load(const char* path, int32_t scale,
                                 ncnet_dataset** out) {
  if (!out || !path) return invalid("path or out is null");
  *out = nullptr;
  return wrap([&] {
    auto ds = std::make_unique<ncnet_dataset>();
    ds->entries = ncnet::load_manifest(path, scale);
    ds->scale = scale;
    *out = ds.release();
  });
}

int32_t ncnet_dataset_size(const ncnet_dataset* ds) {
  return ds ? static_cast<int32_t>(ds->entries.size()) : 0;
}

ncnet_status ncnet_dataset_paths(const ncnet_dataset* ds, int32_t index,
                                 const char** lr_path, const char** hr_path) {
  if (!ds) return invalid("dataset is null");
  if (index < 0 || index >= static_cast<int32_t>(ds->entries.size()))
    return invalid("dataset index out of range");
  if (lr_path) *lr_path = ds->entries[index].lr_path.c_str();
  if (hr_path) *hr_path = ds->entries[index].hr_path.c_str();
  return NCNET_OK;
}

void ncnet_dataset_free(ncnet_dataset* ds) { delete ds; }

/* ---- training ---- */

void ncnet_train_config_default(ncnet_train_config* config) {
  if (!config) return;
  const ncnet::TrainConfig d;
  config->scale = d.scale;
  config->batch_size = d.batch_size;
  config->patch_phase1 = d.patch_phase1;
  config->patch_phase2 = d.patch_phase2;
  config->iters_phase1 = d.iters_phase1;
  config->iters_phase2 = d.iters_phase2;
  config->lr0 = d.lr0;
  config->lr_half_every = d.lr_half_every;
  config->lr_reset_phase2 = d.lr_reset_phase2 ? 1 : 0;
  config->seed = d.seed;
  config->augment = d.augment ? 1 : 0;
  config->threads = d.threads;
  config->log_every = d.log_every;
}

ncnet_status ncnet_train(const ncnet_dataset* train_set,
                         const ncnet_dataset* val_or_null,
                         const ncnet_train_config* config,
                         const char* log_path_or_null,
                         ncnet_train_log_fn log_cb_or_null, void* log_user,
                         ncnet_model** out) {
  if (!train_set || !config || !out)
    return invalid("train_set, config or out is null");
  *out = nullptr;
  return wrap([&] {
    ncnet::TrainConfig cfg;
    cfg.scale = config->scale;
    cfg.batch_size = config->batch_size;
    cfg.patch_phase1 = config->patch_phase1;
    cfg.patch_phase2 = config->patch_phase2;
    cfg.iters_phase1 = config->iters_phase1;
    cfg.iters_phase2 = config->iters_phase2;
    cfg.lr0 = config->lr0;
    cfg.lr_half_every = config->lr_half_every;
    cfg.lr_reset_phase2 = config->lr_reset_phase2 != 0;
    cfg.seed = config->seed;
    cfg.augment = config->augment != 0;
    cfg.threads = config->threads < 1 ? 1 : config->threads;
    cfg.log_every = config->log_every;

    const auto train_pairs = ncnet::load_train_pairs(train_set->entries);
    std::vector<ncnet::TrainPair> val_pairs;
    if (val_or_null) val_pairs = ncnet::load_train_pairs(val_or_null->entries);

    ncnet::TrainLogFn log_fn;
    if (log_cb_or_null) {
      log_fn = [log_cb_or_null, log_user](const ncnet::TrainLogRow& row) {
        log_cb_or_null(row.iter, row.loss, row.lr, row.val_psnr, log_user);
      };
    }
    ncnet::TrainResult result =
        ncnet::train(cfg, train_pairs, val_pairs, log_fn);
    if (log_path_or_null) ncnet::write_train_log(result.curve, log_path_or_null);
    auto m = std::make_unique<ncnet_model>();
    m->m = std::move(result.weights);
    *out = m.release();
  });
}

/* ---- int8 quantization ---- */

ncnet_status ncnet_quantize(const ncnet_model* m, const ncnet_dataset* calib,
                            ncnet_qmodel** out) {
  if (!m || !calib || !out) return invalid("model, calib or out is null");
  *out = nullptr;
  return wrap([&] {
    const auto images = load_lr_images(calib);
    const ncnet::CalibrationStats stats = ncnet::calibrate(m->m, images);
    auto qm = std::make_unique<ncnet_qmodel>();
    qm->qm = ncnet::quantize_model(m->m, stats);
    *out = qm.release();
  });
}

ncnet_status ncnet_qmodel_load(const char* path, ncnet_qmodel** out) {
  if (!out || !path) return invalid("path or out is null");
  *out = nullptr;
  return wrap([&] {
    auto qm = std::make_unique<ncnet_qmodel>();
    qm->qm = ncnet::load_qmodel(path);
    *out = qm.release();
  });
}

ncnet_status ncnet_qmodel_save(const ncnet_qmodel* qm, const char* path) {
  if (!qm || !path) return invalid("model or path is null");
  return wrap([&] { ncnet::save_qmodel(qm->qm, path); });
}

int32_t ncnet_qmodel_scale(const ncnet_qmodel* qm) {
  return qm ? qm->qm.scale : 0;
}

ncnet_status ncnet_qmodel_run(const ncnet_qmodel* qm, const ncnet_image* input,
                              int32_t threads, ncnet_image** out) {
  if (!qm || !input || !out) return invalid("model, input or out is null");
  *out = nullptr;
  return wrap([&] {
    auto img = std::make_unique<ncnet_image>();
    img->img = ncnet::quantized_forward(input->img, qm->qm,
                                        threads < 1 ? 1 : threads);
    *out = img.release();
  });
}

void ncnet_qmodel_free(ncnet_qmodel* qm) { delete qm; }

/* ---- operator benchmark ---- */

ncnet_status ncnet_bench_run(int32_t reps, int32_t warmups, int32_t threads,
                             int32_t dtype, ncnet_bench_report** out) {
  if (!out) return invalid("out is null");
  if (dtype != NCNET_BENCH_F32 && dtype != NCNET_BENCH_I8)
    return invalid("dtype must be NCNET_BENCH_F32 or NCNET_BENCH_I8");
  *out = nullptr;
  return wrap([&] {
    const auto cases =
        ncnet::standard_suite(dtype == NCNET_BENCH_I8 ? "i8" : "f32");
    auto report = std::make_unique<ncnet_bench_report>();
    report->report =
        ncnet::run_suite(cases, reps, warmups, threads < 1 ? 1 : threads);
    *out = report.release();
  });
}

ncnet_status ncnet_bench_report_render(const ncnet_bench_report* report,
                                       int32_t format, char** out_text) {
  if (!report || !out_text) return invalid("report or out_text is null");
  *out_text = nullptr;
  return wrap([&] {
    const std::string text = format == NCNET_BENCH_FORMAT_CSV
                                 ? ncnet::emit_csv(report->report)
                                 : ncnet::emit_markdown(report->report);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_text = buf;
  });
}

void ncnet_bench_report_free(ncnet_bench_report* report) { delete report; }

} /* extern "C" */
