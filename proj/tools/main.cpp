/*
 * Copyright 2026 The stegkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "stegkit/bench.hpp"
#include "stegkit/config.hpp"
#include "stegkit/dct.hpp"
#include "stegkit/detect.hpp"
#include "stegkit/image.hpp"
#include "stegkit/lsb.hpp"
#include "stegkit/metrics.hpp"
#include "stegkit/payload.hpp"
#include "stegkit/trainer.hpp"
#include "stegkit/util.hpp"

namespace {

// Exit codes: 0 ok, 2 capacity, 3 IO/format, 4 bad flags or validation,
// 5 non-finite training loss.
enum ExitCode {
  kOk = 0,
  kCapacity = 2,
  kIo = 3,
  kUsage = 4,
  kDiverged = 5,
};

[[noreturn]] void fail(int code, const std::string& detail) {
  std::cerr << "error: " << code << ": " << detail << std::endl;
  std::exit(code);
}

stegkit::MethodSpec build_method(const std::string& method, int k,
                                 double delta, const std::string& checkpoint,
                                 int /*bpp*/) {
  using stegkit::MethodSpec;
  MethodSpec spec;
  if (method == "lsb") {
    spec.kind = MethodSpec::Kind::lsb;
    spec.lsb.k = k;
    spec.lsb.validate();
  } else if (method == "dct") {
    spec.kind = MethodSpec::Kind::dct;
    spec.dct.delta = delta;
    spec.dct.validate();
  } else if (method == "gan") {
    spec.kind = MethodSpec::Kind::gan;
    if (checkpoint.empty())
      throw stegkit::ConfigError("gan method requires --checkpoint");
    spec.checkpoint = checkpoint;
  } else {
    throw stegkit::ConfigError("unknown method '" + method +
                               "' (lsb, dct or gan)");
  }
  return spec;
}

int cmd_embed(const std::string& cover_path, const std::string& payload_path,
              const std::string& method, int k, double delta,
              const std::string& checkpoint, int bpp,
              const std::string& out_path) {
  stegkit::MethodSpec spec;
  try {
    spec = build_method(method, k, delta, checkpoint, bpp);
  } catch (const stegkit::Error& e) {
    fail(kUsage, e.what());
  }

  try {
    stegkit::Image cover = stegkit::load_image(cover_path);
    auto payload_bytes = stegkit::read_file_bytes(payload_path);
    stegkit::Bits bits = stegkit::bytes_to_bits(payload_bytes);

    stegkit::Image stego;
    std::size_t capacity = 0;
    switch (spec.kind) {
      case stegkit::MethodSpec::Kind::lsb:
        capacity = stegkit::lsb_capacity_bits(cover, spec.lsb);
        stego = stegkit::lsb_embed(cover, bits, spec.lsb);
        break;
      case stegkit::MethodSpec::Kind::dct:
        capacity = stegkit::dct_capacity_bits(cover, spec.dct);
        stego = stegkit::dct_embed(cover, bits, spec.dct);
        break;
      case stegkit::MethodSpec::Kind::gan: {
        stegkit::GanCodec codec(spec.checkpoint);
        const std::size_t mult = 8;
        if (cover.width % mult || cover.height % mult) {
          std::size_t w = cover.width - cover.width % mult;
          std::size_t h = cover.height - cover.height % mult;
          if (w == 0 || h == 0)
            throw stegkit::UnsupportedFormat("cover smaller than 8x8");
          std::cout << "note: center-cropping cover to " << w << "x" << h
                    << " (generator stride pyramid)\n";
          cover = stegkit::center_crop(cover, w, h);
        }
        capacity = codec.capacity_bits(cover);
        stego = codec.embed(cover, bits);
        break;
      }
    }
    stegkit::save_image(stego, out_path);
    double used = static_cast<double>(bits.size() + stegkit::kFrameHeaderBits);
    std::printf("capacity: %zu/%zu bits (%.1f%%)\n",
                bits.size() + stegkit::kFrameHeaderBits, capacity,
                100.0 * used / static_cast<double>(capacity));
    std::printf("psnr: %s dB\n",
                stegkit::format_double(stegkit::psnr(cover, stego)).c_str());
    return kOk;
  } catch (const stegkit::CapacityExceeded& e) {
    fail(kCapacity, e.what());
  } catch (const stegkit::ConfigError& e) {
    fail(kUsage, e.what());
  } catch (const stegkit::Error& e) {
    fail(kIo, e.what());
  }
}

int cmd_extract(const std::string& stego_path, const std::string& method,
                int k, double delta, const std::string& checkpoint, int bpp,
                const std::string& out_path) {
  stegkit::MethodSpec spec;
  try {
    spec = build_method(method, k, delta, checkpoint, bpp);
  } catch (const stegkit::Error& e) {
    fail(kUsage, e.what());
  }

  try {
    stegkit::Image stego = stegkit::load_image(stego_path);
    stegkit::Bits bits;
    switch (spec.kind) {
      case stegkit::MethodSpec::Kind::lsb:
        bits = stegkit::lsb_extract(stego, spec.lsb);
        break;
      case stegkit::MethodSpec::Kind::dct:
        bits = stegkit::dct_extract(stego, spec.dct);
        break;
      case stegkit::MethodSpec::Kind::gan: {
        stegkit::GanCodec codec(spec.checkpoint);
        bits = codec.extract(stego);
        break;
      }
    }
    auto bytes = stegkit::bits_to_bytes(bits);
    stegkit::write_file_atomic(out_path, std::span<const std::uint8_t>(bytes));
    std::printf("recovered %zu bits (%zu bytes)\n", bits.size(), bytes.size());
    return kOk;
  } catch (const stegkit::ConfigError& e) {
    fail(kUsage, e.what());
  } catch (const stegkit::Error& e) {
    fail(kIo, e.what());
  }
}

int cmd_train(const std::string& config_path, const std::string& resume) {
  stegkit::TrainConfig cfg;
  try {
    cfg = stegkit::TrainConfig::from_file(config_path);
  } catch (const stegkit::IoError& e) {
    fail(kIo, e.what());
  } catch (const stegkit::Error& e) {
    fail(kUsage, e.what());
  }

  try {
    auto trainer = resume.empty()
                       ? std::make_unique<stegkit::Trainer>(cfg)
                       : std::make_unique<stegkit::Trainer>(cfg, resume);
    stegkit::TrainTrace trace = trainer->run();
    std::printf("trained %llu steps; trace rows: %zu; out: %s\n",
                static_cast<unsigned long long>(trainer->step()),
                trace.rows.size(), cfg.out_dir.c_str());
    if (!trace.rows.empty()) {
      const auto& last = trace.rows.back();
      std::printf("final: l_adv=%.4f l_rec=%.4f l_perc=%.4f d_acc=%.3f "
                  "e_bitacc=%.3f\n",
                  last.l_adv, last.l_rec, last.l_perc, last.d_acc,
                  last.e_bitacc);
    }
    return kOk;
  } catch (const stegkit::TrainError& e) {
    fail(kDiverged, e.what());
  } catch (const stegkit::ConfigError& e) {
    fail(kUsage, e.what());
  } catch (const stegkit::Error& e) {
    fail(kIo, e.what());
  }
}

int cmd_evaluate(const std::string& dataset_dir,
                 const std::vector<std::string>& method_strs,
                 const std::string& out_dir, std::uint64_t seed,
                 const std::string& formats, bool references,
                 const std::string& payload_mode) {
  std::vector<stegkit::MethodSpec> methods;
  bool csv = false, json = false;
  stegkit::BenchConfig config;
  try {
    for (const auto& s : method_strs)
      methods.push_back(stegkit::MethodSpec::parse(s));
    config.seed = seed;
    config.include_references = references;
    if (payload_mode == "image")
      config.payload_mode = stegkit::PayloadMode::image;
    else if (payload_mode == "bitstream")
      config.payload_mode = stegkit::PayloadMode::bitstream;
    else
      throw stegkit::ConfigError("payload mode must be image or bitstream");
    for (std::size_t i = 0; i < formats.size();) {
      auto comma = formats.find(',', i);
      std::string f = formats.substr(i, comma == std::string::npos
                                            ? std::string::npos
                                            : comma - i);
      i = comma == std::string::npos ? formats.size() : comma + 1;
      if (f == "csv")
        csv = true;
      else if (f == "json")
        json = true;
      else if (!f.empty())
        throw stegkit::ConfigError("unknown format '" + f + "'");
    }
    if (!csv && !json) csv = json = true;
  } catch (const stegkit::Error& e) {
    fail(kUsage, e.what());
  }

  try {
    stegkit::BenchReport report =
        stegkit::run_benchmark(dataset_dir, methods, config);
    stegkit::emit_report(report, out_dir, csv, json);
    std::printf("evaluated %zu method(s); report written to %s\n",
                methods.size(), out_dir.c_str());
    return kOk;
  } catch (const stegkit::ConfigError& e) {
    fail(kUsage, e.what());
  } catch (const stegkit::Error& e) {
    fail(kIo, e.what());
  }
}

int cmd_metrics(const std::string& a_path, const std::string& b_path) {
  stegkit::Image a, b;
  try {
    a = stegkit::load_image(a_path);
    b = stegkit::load_image(b_path);
  } catch (const stegkit::Error& e) {
    fail(kIo, e.what());
  }
  try {
    stegkit::MetricsReport r =
        stegkit::compute_metrics(a, b, stegkit::PairKind::cover_stego);
    std::printf("psnr=%s\n", stegkit::format_double(r.psnr_db).c_str());
    std::printf("ssim=%s\n", stegkit::format_double(r.ssim).c_str());
    std::printf("rmse=%s\n", stegkit::format_double(r.rmse).c_str());
    std::printf("mae=%s\n", stegkit::format_double(r.mae).c_str());
    return kOk;
  } catch (const stegkit::ShapeError& e) {
    fail(kUsage, e.what());
  } catch (const stegkit::Error& e) {
    fail(kIo, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stegkit: GAN and classical image steganography toolkit"};
  app.require_subcommand(1);

  std::string cover, payload, stego, out, method = "lsb", checkpoint;
  std::string config_path, resume, dataset, formats = "csv,json";
  std::string a_path, b_path, payload_mode = "image";
  std::vector<std::string> methods;
  int k = 1, bpp = 1;
  double delta = 8.0;
  std::uint64_t seed = 42;  // fixed default so casual runs reproduce
  bool references = false;

  auto* embed = app.add_subcommand("embed", "Hide a payload in a cover image");
  embed->add_option("cover", cover, "Cover PNG")->required();
  embed->add_option("payload", payload, "Payload file (raw bytes)")->required();
  embed->add_option("--method", method, "lsb, dct or gan");
  embed->add_option("--k", k, "LSB bits per channel (1..4)");
  embed->add_option("--delta", delta, "DCT quantization step");
  embed->add_option("--checkpoint", checkpoint, "GAN checkpoint path");
  embed->add_option("--bpp", bpp, "GAN bits per pixel");
  embed->add_option("--seed", seed, "Seed");
  embed->add_option("--out", out, "Output stego PNG")->required();

  auto* extract = app.add_subcommand("extract", "Recover a payload");
  extract->add_option("stego", stego, "Stego PNG")->required();
  extract->add_option("--method", method, "lsb, dct or gan");
  extract->add_option("--k", k, "LSB bits per channel (1..4)");
  extract->add_option("--delta", delta, "DCT quantization step");
  extract->add_option("--checkpoint", checkpoint, "GAN checkpoint path");
  extract->add_option("--bpp", bpp, "GAN bits per pixel");
  extract->add_option("--seed", seed, "Seed");
  extract->add_option("--out", out, "Output payload file")->required();

  auto* train = app.add_subcommand("train", "Run the adversarial training loop");
  train->add_option("config", config_path, "key=value config file")->required();
  train->add_option("--resume", resume, "Checkpoint to resume from");

  auto* evaluate = app.add_subcommand("evaluate", "Benchmark methods on a dataset");
  evaluate->add_option("dataset", dataset, "Directory of PNG covers")->required();
  evaluate->add_option("--methods", methods,
                       "Method specs, e.g. lsb:k=4 dct:delta=8")
      ->delimiter(',');
  evaluate->add_option("--out", out, "Report directory")->required();
  evaluate->add_option("--seed", seed, "Seed");
  evaluate->add_option("--format", formats, "csv,json");
  evaluate->add_option("--payload-mode", payload_mode, "image or bitstream");
  evaluate->add_flag("--references", references,
                     "Include paper-reported CAIS/HiNet reference rows");

  auto* metrics = app.add_subcommand("metrics", "Print PSNR/SSIM/RMSE/MAE");
  metrics->add_option("a", a_path, "First PNG")->required();
  metrics->add_option("b", b_path, "Second PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << kUsage << ": " << e.what() << std::endl;
    return kUsage;
  }

  if (embed->parsed())
    return cmd_embed(cover, payload, method, k, delta, checkpoint, bpp, out);
  if (extract->parsed())
    return cmd_extract(stego, method, k, delta, checkpoint, bpp, out);
  if (train->parsed()) return cmd_train(config_path, resume);
  if (evaluate->parsed())
    return cmd_evaluate(dataset, methods, out, seed, formats, references,
                        payload_mode);
  if (metrics->parsed()) return cmd_metrics(a_path, b_path);
  return kUsage;
}
