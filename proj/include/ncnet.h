/* Copyright 2026 The NCSR Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the NCNet super-resolution engine.
 *
 * Every object is an opaque handle created and destroyed through this
 * API. Functions return NCNET_OK on success; on failure they return an
 * error code and leave a human-readable message in ncnet_last_error()
 * (thread-local). Handles returned through out-parameters are owned by
 * the caller and must be released with the matching *_free function.
 */

#ifndef NCNET_H_
#define NCNET_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncnet_status {
  NCNET_OK = 0,
  NCNET_E_INVALID_ARGUMENT = 1,
  NCNET_E_SHAPE_MISMATCH = 2,
  NCNET_E_IO = 3,
  NCNET_E_PARSE = 4,
  NCNET_E_UNSUPPORTED = 5,
  NCNET_E_NUMERIC = 6,
  NCNET_E_INTERNAL = 7
} ncnet_status;

typedef struct ncnet_image ncnet_image;
typedef struct ncnet_model ncnet_model;       /* float model */
typedef struct ncnet_qmodel ncnet_qmodel;     /* int8 model */
typedef struct ncnet_dataset ncnet_dataset;   /* (LR, HR) path manifest */
typedef struct ncnet_bench_report ncnet_bench_report;

const char* ncnet_version(void);
/* Message of the most recent failure on this thread ("" if none). */
const char* ncnet_last_error(void);
void ncnet_string_free(char* s);

/* ---- images (8-bit RGB) ---- */
ncnet_status ncnet_image_create(int32_t width, int32_t height,
                                const uint8_t* rgb_or_null,
                                ncnet_image** out);
ncnet_status ncnet_image_load_png(const char* path, ncnet_image** out);
ncnet_status ncnet_image_save_png(const ncnet_image* img, const char* path);
int32_t ncnet_image_width(const ncnet_image* img);
int32_t ncnet_image_height(const ncnet_image* img);
/* Row-major RGB triples, 3*width*height bytes, valid until the image is
 * freed. */
const uint8_t* ncnet_image_pixels(const ncnet_image* img);
void ncnet_image_free(ncnet_image* img);

/* ---- float model ---- */
/* Fresh 7-layer, 32-channel model with Xavier-initialized weights. */
ncnet_status ncnet_model_create(int32_t scale, uint64_t seed,
                                ncnet_model** out);
/* All-zero backbone: the model degenerates to nearest upsampling. */
ncnet_status ncnet_model_create_zero(int32_t scale, ncnet_model** out);
ncnet_status ncnet_model_load(const char* path, ncnet_model** out);
ncnet_status ncnet_model_save(const ncnet_model* m, const char* path);
int32_t ncnet_model_scale(const ncnet_model* m);
/* Super-resolves an RGB image; output is scale x input size. */
ncnet_status ncnet_model_run(const ncnet_model* m, const ncnet_image* input,
                             int32_t threads, ncnet_image** out);
void ncnet_model_free(ncnet_model* m);

/* ---- metrics ---- */
/* PSNR in RGB space over the full frame. is_infinite is set when the
 * images are identical (mse == 0). */
ncnet_status ncnet_psnr(const ncnet_image* a, const ncnet_image* b,
                        double* mse, double* psnr_db, int32_t* is_infinite);

/* ---- datasets ---- */
/* Loads a two-column tab-separated (lr_path<TAB>hr_path) manifest and
 * validates that every HR image is exactly scale x its LR image. */
ncnet_status ncnet_manifest_load(const char* path, int32_t scale,
                                 ncnet_dataset** out);
int32_t ncnet_dataset_size(const ncnet_dataset* ds);
/* Borrowed pointers, valid until the dataset is freed. */
ncnet_status ncnet_dataset_paths(const ncnet_dataset* ds, int32_t index,
                                 const char** lr_path, const char** hr_path);
void ncnet_dataset_free(ncnet_dataset* ds);

/* ---- training ---- */
typedef struct ncnet_train_config {
  int32_t scale;
  int32_t batch_size;
  int32_t patch_phase1;    /* LR patch side, phase 1 */
  int32_t patch_phase2;    /* LR patch side, finetune phase */
  int64_t iters_phase1;
  int64_t iters_phase2;
  double lr0;
  int64_t lr_half_every;   /* lr halves every this many iterations */
  int32_t lr_reset_phase2; /* nonzero: restart the schedule in phase 2 */
  uint64_t seed;
  int32_t augment;         /* nonzero: random flip + 90-degree rotations */
  int32_t threads;
  int64_t log_every;
} ncnet_train_config;

void ncnet_train_config_default(ncnet_train_config* config);

typedef void (*ncnet_train_log_fn)(int64_t iter, double loss, double lr,
                                   double val_psnr, void* user);

/* Trains a fresh model on the manifest's pairs. If val is non-NULL the
 * best checkpoint by validation PSNR is returned and val_psnr is
 * reported at every log point (NaN otherwise). If log_path is non-NULL
 * a tab-separated (iter, loss, lr, val_psnr) file is written. */
ncnet_status ncnet_train(const ncnet_dataset* train_set,
                         const ncnet_dataset* val_or_null,
                         const ncnet_train_config* config,
                         const char* log_path_or_null,
                         ncnet_train_log_fn log_cb_or_null, void* log_user,
                         ncnet_model** out);

/* ---- int8 quantization ---- */
/* Post-training quantization: calibrates activation ranges on the LR
 * images of the manifest, then quantizes weights symmetric per-tensor
 * and activations asymmetric per-edge. */
ncnet_status ncnet_quantize(const ncnet_model* m, const ncnet_dataset* calib,
                            ncnet_qmodel** out);
ncnet_status ncnet_qmodel_load(const char* path, ncnet_qmodel** out);
ncnet_status ncnet_qmodel_save(const ncnet_qmodel* qm, const char* path);
int32_t ncnet_qmodel_scale(const ncnet_qmodel* qm);
/* Full integer pipeline: int8 convolutions with int32 accumulation and
 * fixed-point requantization. */
ncnet_status ncnet_qmodel_run(const ncnet_qmodel* qm, const ncnet_image* input,
                              int32_t threads, ncnet_image** out);
void ncnet_qmodel_free(ncnet_qmodel* qm);

/* ---- operator benchmark ---- */
#define NCNET_BENCH_F32 0
#define NCNET_BENCH_I8 1

#define NCNET_BENCH_FORMAT_MARKDOWN 0
#define NCNET_BENCH_FORMAT_CSV 1

/* Runs the standard operator/arrangement suite at 1x360x640x3. */
ncnet_status ncnet_bench_run(int32_t reps, int32_t warmups, int32_t threads,
                             int32_t dtype, ncnet_bench_report** out);
/* Renders the report; free the returned string with ncnet_string_free. */
ncnet_status ncnet_bench_report_render(const ncnet_bench_report* report,
                                       int32_t format, char** out_text);
void ncnet_bench_report_free(ncnet_bench_report* report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NCNET_H_ */
