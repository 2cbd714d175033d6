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

// ncsr: super-resolution command line on top of the ncnet C API.
// Subcommands: sr, eval, train, quantize, bench, init.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncnet.h"

namespace {

[[noreturn]] void die(const std::string& what) {
  std::fprintf(stderr, "ncsr: %s: %s\n", what.c_str(), ncnet_last_error());
  std::exit(1);
}

int thread_count(int flag_value) {
  // Explicit flag wins; otherwise NCSR_THREADS; otherwise 1.
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("NCSR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

struct ImageHandle {
  ncnet_image* p = nullptr;
  ~ImageHandle() { ncnet_image_free(p); }
};
struct ModelHandle {
  ncnet_model* p = nullptr;
  ~ModelHandle() { ncnet_model_free(p); }
};
struct QModelHandle {
  ncnet_qmodel* p = nullptr;
  ~QModelHandle() { ncnet_qmodel_free(p); }
};
struct DatasetHandle {
  ncnet_dataset* p = nullptr;
  ~DatasetHandle() { ncnet_dataset_free(p); }
};

// Shared by `eval`: runs one path (float or int8) over a manifest and
// prints per-image and mean PSNR.
int run_eval(const std::string& model_path, const std::string& manifest_path,
             bool int8, int threads) {
  ModelHandle model;
  QModelHandle qmodel;
  int scale = 0;
  if (int8) {
    if (ncnet_qmodel_load(model_path.c_str(), &qmodel.p) != NCNET_OK)
      die("loading quantized model");
    scale = ncnet_qmodel_scale(qmodel.p);
  } else {
    if (ncnet_model_load(model_path.c_str(), &model.p) != NCNET_OK)
      die("loading model");
    scale = ncnet_model_scale(model.p);
  }

  DatasetHandle ds;
  if (ncnet_manifest_load(manifest_path.c_str(), scale, &ds.p) != NCNET_OK)
    die("loading manifest");

  const int n = ncnet_dataset_size(ds.p);
  double sum = 0.0;
  int counted = 0;
  for (int i = 0; i < n; ++i) {
    const char* lr_path = nullptr;
    const char* hr_path = nullptr;
    ncnet_dataset_paths(ds.p, i, &lr_path, &hr_path);
    ImageHandle lr, hr, sr;
    if (ncnet_image_load_png(lr_path, &lr.p) != NCNET_OK) die("loading LR image");
    if (ncnet_image_load_png(hr_path, &hr.p) != NCNET_OK) die("loading HR image");
    const ncnet_status rc =
        int8 ? ncnet_qmodel_run(qmodel.p, lr.p, threads, &sr.p)
             : ncnet_model_run(model.p, lr.p, threads, &sr.p);
    if (rc != NCNET_OK) die("super-resolving");
    double mse = 0.0, db = 0.0;
    int32_t inf = 0;
    if (ncnet_psnr(sr.p, hr.p, &mse, &db, &inf) != NCNET_OK) die("psnr");
    if (inf) {
      std::printf("%-40s  psnr inf\n", lr_path);
    } else {
      std::printf("%-40s  psnr %.4f dB\n", lr_path, db);
      sum += db;
      ++counted;
    }
  }
  if (counted == 0) {
    std::fprintf(stderr, "ncsr: eval: every pair was identical\n");
    return 1;
  }
  std::printf("mean psnr %.4f dB over %d image(s)%s\n", sum / counted, counted,
              int8 ? " [int8]" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NCNet super-resolution engine"};
  app.require_subcommand(1);

  // --- sr ---
  auto* sr = app.add_subcommand("sr", "Super-resolve a PNG image");
  std::string sr_model, sr_input, sr_output;
  int sr_scale = 0, sr_threads = 0;
  bool sr_int8 = false;
  sr->add_option("--model", sr_model, "Model weights file")->required();
  sr->add_option("--scale", sr_scale, "Expected upscale factor (validated against the model)");
  sr->add_option("--input", sr_input, "Input PNG")->required();
  sr->add_option("--output", sr_output, "Output PNG")->required();
  sr->add_option("--threads", sr_threads, "Worker threads (default: NCSR_THREADS or 1)");
  sr->add_flag("--int8", sr_int8, "Model file is a quantized int8 model");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "Mean PSNR over a (LR, HR) manifest");
  std::string eval_model, eval_manifest;
  int eval_threads = 0;
  bool eval_int8 = false;
  eval->add_option("--model", eval_model, "Model weights file")->required();
  eval->add_option("--manifest", eval_manifest, "Tab-separated lr<TAB>hr manifest")->required();
  eval->add_option("--threads", eval_threads, "Worker threads");
  eval->add_flag("--int8", eval_int8, "Model file is a quantized int8 model");

  // --- train ---
  auto* train = app.add_subcommand("train", "Train a model from scratch");
  std::string train_manifest, train_val_manifest, train_config, train_out,
      train_log;
  long long tr_iters1 = -1, tr_iters2 = -1, tr_log_every = -1;
  long long tr_seed = -1;
  int tr_batch = 0, tr_patch1 = 0, tr_patch2 = 0, tr_scale = 0, tr_threads = 0;
  double tr_lr0 = 0.0;
  int tr_augment = -1;
  train->add_option("--manifest", train_manifest, "Training manifest")->required();
  train->add_option("--val-manifest", train_val_manifest, "Validation manifest (best checkpoint by PSNR)");
  train->add_option("--config", train_config, "key = value config file");
  train->add_option("--out", train_out, "Output weights file")->required();
  train->add_option("--log", train_log, "Loss curve TSV output");
  train->add_option("--scale", tr_scale, "Upscale factor");
  train->add_option("--batch", tr_batch, "Batch size");
  train->add_option("--patch1", tr_patch1, "Phase-1 LR patch side");
  train->add_option("--patch2", tr_patch2, "Phase-2 LR patch side");
  train->add_option("--iters1", tr_iters1, "Phase-1 iterations");
  train->add_option("--iters2", tr_iters2, "Phase-2 iterations");
  train->add_option("--lr0", tr_lr0, "Initial learning rate");
  train->add_option("--seed", tr_seed, "Random seed");
  train->add_option("--augment", tr_augment, "1/0: random flips and rotations");
  train->add_option("--log-every", tr_log_every, "Log interval");
  train->add_option("--threads", tr_threads, "Worker threads");

  // --- quantize ---
  auto* quant = app.add_subcommand("quantize", "Post-training int8 quantization");
  std::string q_model, q_calib, q_out;
  quant->add_option("--model", q_model, "Float model weights file")->required();
  quant->add_option("--calib-manifest", q_calib, "Calibration manifest (LR images are used)")->required();
  quant->add_option("--out", q_out, "Output quantized model file")->required();

  // --- bench ---
  auto* bench = app.add_subcommand("bench", "Operator micro-benchmark at 1x360x640x3");
  int b_reps = 30, b_warmups = 3, b_threads = 0;
  std::string b_dtype = "f32", b_out;
  bench->add_option("--reps", b_reps, "Timed repetitions per case");
  bench->add_option("--warmups", b_warmups, "Discarded warmup runs per case");
  bench->add_option("--threads", b_threads, "Worker threads");
  bench->add_option("--dtype", b_dtype, "f32 or i8")
      ->check(CLI::IsMember({"f32", "i8"}));
  bench->add_option("--out", b_out, "Report file (.md or .csv; default: markdown to stdout)");

  // --- init ---
  auto* init = app.add_subcommand("init", "Write a fresh model weights file");
  std::string init_out;
  int init_scale = 3;
  long long init_seed = 0;
  bool init_zero = false;
  init->add_option("--out", init_out, "Output weights file")->required();
  init->add_option("--scale", init_scale, "Upscale factor");
  init->add_option("--seed", init_seed, "Random seed for Xavier init");
  init->add_flag("--zero", init_zero, "All-zero backbone (model acts as nearest upsampling)");

  CLI11_PARSE(app, argc, argv);

  if (sr->parsed()) {
    const int threads = thread_count(sr_threads);
    ModelHandle model;
    QModelHandle qmodel;
    int file_scale = 0;
    if (sr_int8) {
      if (ncnet_qmodel_load(sr_model.c_str(), &qmodel.p) != NCNET_OK)
        die("loading quantized model");
      file_scale = ncnet_qmodel_scale(qmodel.p);
    } else {
      if (ncnet_model_load(sr_model.c_str(), &model.p) != NCNET_OK)
        die("loading model");
      file_scale = ncnet_model_scale(model.p);
    }
    if (sr_scale != 0 && sr_scale != file_scale) {
      std::fprintf(stderr,
                   "ncsr: scale mismatch: --scale %d but the model file is "
                   "x%d\n", sr_scale, file_scale);
      return 1;
    }
    ImageHandle in, out;
    if (ncnet_image_load_png(sr_input.c_str(), &in.p) != NCNET_OK)
      die("loading input image");
    const ncnet_status rc = sr_int8
                                ? ncnet_qmodel_run(qmodel.p, in.p, threads, &out.p)
                                : ncnet_model_run(model.p, in.p, threads, &out.p);
    if (rc != NCNET_OK) die("super-resolving");
    if (ncnet_image_save_png(out.p, sr_output.c_str()) != NCNET_OK)
      die("saving output image");
    std::printf("%s: %dx%d -> %s: %dx%d (x%d)\n", sr_input.c_str(),
                ncnet_image_width(in.p), ncnet_image_height(in.p),
                sr_output.c_str(), ncnet_image_width(out.p),
                ncnet_image_height(out.p), file_scale);
    return 0;
  }

  if (eval->parsed())
    return run_eval(eval_model, eval_manifest, eval_int8,
                    thread_count(eval_threads));

  if (train->parsed()) {
    ncnet_train_config cfg;
    ncnet_train_config_default(&cfg);
    if (!train_config.empty()) {
      // The config file mirrors the flag set; flags override file values.
      // Parsing is done by the engine through a temporary: the file format
      // belongs to the CLI surface, so parse it here.
      std::ifstream f(train_config);
      if (!f.good()) {
        std::fprintf(stderr, "ncsr: cannot open config %s\n", train_config.c_str());
        return 1;
      }
      std::string line;
      int line_no = 0;
      auto reject = [&](const std::string& why) {
        std::fprintf(stderr, "ncsr: %s:%d: %s\n", train_config.c_str(), line_no,
                     why.c_str());
        std::exit(1);
      };
      while (std::getline(f, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) reject("expected key = value");
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t\r");
          if (b == std::string::npos) return std::string();
          const auto e = s.find_last_not_of(" \t\r");
          return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
          if (key == "scale") cfg.scale = std::stoi(value);
          else if (key == "batch_size") cfg.batch_size = std::stoi(value);
          else if (key == "patch_phase1") cfg.patch_phase1 = std::stoi(value);
          else if (key == "patch_phase2") cfg.patch_phase2 = std::stoi(value);
          else if (key == "iters_phase1") cfg.iters_phase1 = std::stoll(value);
          else if (key == "iters_phase2") cfg.iters_phase2 = std::stoll(value);
          else if (key == "lr0") cfg.lr0 = std::stod(value);
          else if (key == "lr_half_every") cfg.lr_half_every = std::stoll(value);
          else if (key == "lr_reset_phase2") cfg.lr_reset_phase2 = std::stoi(value);
          else if (key == "seed") cfg.seed = std::stoull(value);
          else if (key == "augment") cfg.augment = std::stoi(value);
          else if (key == "threads") cfg.threads = std::stoi(value);
          else if (key == "log_every") cfg.log_every = std::stoll(value);
          else reject("unknown key '" + key + "'");
        } catch (const std::exception&) {
          reject("bad value for '" + key + "'");
        }
      }
    }
    if (tr_scale > 0) cfg.scale = tr_scale;
    if (tr_batch > 0) cfg.batch_size = tr_batch;
    if (tr_patch1 > 0) cfg.patch_phase1 = tr_patch1;
    if (tr_patch2 > 0) cfg.patch_phase2 = tr_patch2;
    if (tr_iters1 >= 0) cfg.iters_phase1 = tr_iters1;
    if (tr_iters2 >= 0) cfg.iters_phase2 = tr_iters2;
    if (tr_lr0 > 0.0) cfg.lr0 = tr_lr0;
    if (tr_seed >= 0) cfg.seed = static_cast<uint64_t>(tr_seed);
    if (tr_augment >= 0) cfg.augment = tr_augment;
    if (tr_log_every > 0) cfg.log_every = tr_log_every;
    if (tr_threads > 0)
      cfg.threads = tr_threads;
    else if (cfg.threads <= 1)
      cfg.threads = thread_count(0);

    DatasetHandle ds, val;
    if (ncnet_manifest_load(train_manifest.c_str(), cfg.scale, &ds.p) != NCNET_OK)
      die("loading manifest");
    if (!train_val_manifest.empty() &&
        ncnet_manifest_load(train_val_manifest.c_str(), cfg.scale, &val.p) !=
            NCNET_OK)
      die("loading validation manifest");

    auto log_cb = [](int64_t iter, double loss, double lr, double val_psnr,
                     void*) {
      if (std::isnan(val_psnr))
        std::printf("iter %6lld  loss %10.5f  lr %.6g\n",
                    static_cast<long long>(iter), loss, lr);
      else
        std::printf("iter %6lld  loss %10.5f  lr %.6g  val %.4f dB\n",
                    static_cast<long long>(iter), loss, lr, val_psnr);
      std::fflush(stdout);
    };
    ModelHandle model;
    if (ncnet_train(ds.p, val.p, &cfg,
                    train_log.empty() ? nullptr : train_log.c_str(), log_cb,
                    nullptr, &model.p) != NCNET_OK)
      die("training");
    if (ncnet_model_save(model.p, train_out.c_str()) != NCNET_OK)
      die("saving model");
    std::printf("saved %s\n", train_out.c_str());
    return 0;
  }

  if (quant->parsed()) {
    ModelHandle model;
    if (ncnet_model_load(q_model.c_str(), &model.p) != NCNET_OK)
      die("loading model");
    DatasetHandle calib;
    if (ncnet_manifest_load(q_calib.c_str(), ncnet_model_scale(model.p),
                            &calib.p) != NCNET_OK)
      die("loading calibration manifest");
    QModelHandle qm;
    if (ncnet_quantize(model.p, calib.p, &qm.p) != NCNET_OK) die("quantizing");
    if (ncnet_qmodel_save(qm.p, q_out.c_str()) != NCNET_OK)
      die("saving quantized model");
    std::printf("saved %s\n", q_out.c_str());
    return 0;
  }

  if (bench->parsed()) {
    const int threads = thread_count(b_threads);
    ncnet_bench_report* report = nullptr;
    if (ncnet_bench_run(b_reps, b_warmups, threads,
                        b_dtype == "i8" ? NCNET_BENCH_I8 : NCNET_BENCH_F32,
                        &report) != NCNET_OK)
      die("running benchmark");
    const bool csv = b_out.size() >= 4 &&
                     b_out.compare(b_out.size() - 4, 4, ".csv") == 0;
    char* text = nullptr;
    if (ncnet_bench_report_render(report, csv ? NCNET_BENCH_FORMAT_CSV
                                              : NCNET_BENCH_FORMAT_MARKDOWN,
                                  &text) != NCNET_OK) {
      ncnet_bench_report_free(report);
      die("rendering report");
    }
    if (b_out.empty()) {
      std::fputs(text, stdout);
    } else {
      std::ofstream f(b_out, std::ios::trunc);
      if (!f.good()) {
        std::fprintf(stderr, "ncsr: cannot write %s\n", b_out.c_str());
        ncnet_string_free(text);
        ncnet_bench_report_free(report);
        return 1;
      }
      f << text;
      std::printf("wrote %s\n", b_out.c_str());
    }
    ncnet_string_free(text);
    ncnet_bench_report_free(report);
    return 0;
  }

  if (init->parsed()) {
    ModelHandle model;
    const ncnet_status rc =
        init_zero ? ncnet_model_create_zero(init_scale, &model.p)
                  : ncnet_model_create(init_scale,
                                       static_cast<uint64_t>(init_seed),
                                       &model.p);
    if (rc != NCNET_OK) die("creating model");
    if (ncnet_model_save(model.p, init_out.c_str()) != NCNET_OK)
      die("saving model");
    std::printf("saved %s (x%d%s)\n", init_out.c_str(), init_scale,
                init_zero ? ", zero backbone" : "");
    return 0;
  }

  return 0;
}
