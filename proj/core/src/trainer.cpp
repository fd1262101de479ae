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

#include "stegkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>

#include "stegkit/rng.hpp"
#include "stegkit/util.hpp"

namespace stegkit {

namespace {

// --- little-endian encoding helpers -----------------------------------------

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size())
      throw UnsupportedFormat("checkpoint: truncated at byte " +
                              std::to_string(pos));
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = bytes[pos] | (std::uint16_t(bytes[pos + 1]) << 8);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[pos + i];
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[pos + i];
    pos += 8;
    return v;
  }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
    pos += n;
    return s;
  }
};

constexpr char kMagic[4] = {'S', 'G', 'F', '1'};

// Named parameters of the bundle in checkpoint order: per network, the
// trainables then the batchnorm running buffers.
std::vector<Parameter<float>*> checkpoint_params(ModelBundle<float>& b) {
  std::vector<Parameter<float>*> out;
  auto append = [&out](std::vector<Parameter<float>*> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  append(b.generator.parameters());
  append(b.generator.buffers());
  append(b.discriminator.parameters());
  append(b.discriminator.buffers());
  append(b.extractor.parameters());
  append(b.extractor.buffers());
  return out;
}

std::vector<Parameter<float>*> trainable_params(ModelBundle<float>& b) {
  std::vector<Parameter<float>*> out;
  auto append = [&out](std::vector<Parameter<float>*> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  append(b.generator.parameters());
  append(b.discriminator.parameters());
  append(b.extractor.parameters());
  return out;
}

std::uint64_t require(const CheckpointData::Blob* b, const char* what) {
  if (!b) throw UnsupportedFormat(std::string("checkpoint: missing blob ") + what);
  return 0;
}

const CheckpointData::Blob* find_blob(const CheckpointData& ck,
                                      const std::string& name) {
  for (const auto& b : ck.params)
    if (b.name == name) return &b;
  return nullptr;
}

// Recovers the network topology from parameter shapes alone, so a checkpoint
// is self-describing for inference.
NetTopology topology_from_checkpoint(const CheckpointData& ck) {
  const auto* ge1 = find_blob(ck, "g.e1.weight");
  const auto* ghead = find_blob(ck, "g.head.weight");
  const auto* dc1 = find_blob(ck, "d.c1.weight");
  const auto* dfc = find_blob(ck, "d.fc.weight");
  const auto* ec1 = find_blob(ck, "e.c1.weight");
  require(ge1, "g.e1.weight");
  require(ghead, "g.head.weight");
  require(dc1, "d.c1.weight");
  require(dfc, "d.fc.weight");
  require(ec1, "e.c1.weight");

  NetTopology t;
  t.cover_channels = ghead->shape.at(0);
  std::size_t in_ch = ge1->shape.at(1);
  if (in_ch <= t.cover_channels)
    throw UnsupportedFormat("checkpoint: inconsistent generator channels");
  t.secret_planes = in_ch - t.cover_channels;
  t.gen_base = ge1->shape.at(0);
  t.disc_base = dc1->shape.at(0);
  t.extractor_width = ec1->shape.at(0);
  std::size_t fc_in = dfc->shape.at(0);
  std::size_t per_cell = t.disc_base * 8;
  if (fc_in % per_cell != 0)
    throw UnsupportedFormat("checkpoint: inconsistent discriminator head");
  std::size_t cells = fc_in / per_cell;
  std::size_t side = static_cast<std::size_t>(std::lround(std::sqrt(double(cells))));
  if (side * side != cells)
    throw UnsupportedFormat("checkpoint: inconsistent discriminator head");
  t.disc_extent = side * 16;
  return t;
}

void apply_checkpoint(ModelBundle<float>& bundle,
                      std::vector<AdamOptimizer<float>*> opts,
                      const CheckpointData& ck) {
  auto params = checkpoint_params(bundle);
  if (params.size() != ck.params.size())
    throw UnsupportedFormat("checkpoint: expected " +
                            std::to_string(params.size()) + " blobs, found " +
                            std::to_string(ck.params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& blob = ck.params[i];
    if (blob.name != params[i]->name || blob.shape != params[i]->shape)
      throw UnsupportedFormat("checkpoint: blob '" + blob.name +
                              "' does not match parameter '" +
                              params[i]->name + "'");
    params[i]->value = blob.data;
  }
  if (opts.empty()) return;

  std::size_t idx = 0;
  for (auto* opt : opts) {
    auto& states = opt->states();
    for (std::size_t i = 0; i < states.size(); ++i, ++idx) {
      if (idx >= ck.opt_states.size())
        throw UnsupportedFormat("checkpoint: missing optimizer states");
      const auto& ob = ck.opt_states[idx];
      if (ob.name != opt->params()[i]->name ||
          ob.m.size() != states[i].m.size())
        throw UnsupportedFormat("checkpoint: optimizer state '" + ob.name +
                                "' does not match parameter order");
      states[i].m = ob.m;
      states[i].v = ob.v;
      states[i].t = ob.t;
    }
  }
  if (idx != ck.opt_states.size())
    throw UnsupportedFormat("checkpoint: surplus optimizer states");
}

}  // namespace

// --- checkpoint serialization ------------------------------------------------

std::vector<std::uint8_t> serialize_checkpoint(const CheckpointData& ck) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, ck.version);
  out.insert(out.end(), ck.config_hash.begin(), ck.config_hash.end());
  put_u64(out, ck.step);
  put_u64(out, ck.rng_state);
  put_u32(out, static_cast<std::uint32_t>(ck.params.size()));
  for (const auto& b : ck.params) {
    put_u32(out, static_cast<std::uint32_t>(b.name.size()));
    out.insert(out.end(), b.name.begin(), b.name.end());
    put_u32(out, static_cast<std::uint32_t>(b.shape.size()));
    for (auto d : b.shape) put_u64(out, d);
    for (float v : b.data) put_f32(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(ck.opt_states.size()));
  for (const auto& s : ck.opt_states) {
    put_u32(out, static_cast<std::uint32_t>(s.name.size()));
    out.insert(out.end(), s.name.begin(), s.name.end());
    put_u64(out, s.t);
    put_u32(out, static_cast<std::uint32_t>(s.m.size()));
    for (float v : s.m) put_f32(out, v);
    for (float v : s.v) put_f32(out, v);
  }
  return out;
}

CheckpointData deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  if (r.str(4) != std::string(kMagic, 4))
    throw UnsupportedFormat("checkpoint: bad magic (expected SGF1)");
  CheckpointData ck;
  ck.version = r.u16();
  if (ck.version != 1)
    throw UnsupportedFormat("checkpoint: unsupported format version " +
                            std::to_string(ck.version));
  r.need(32);
  std::copy_n(bytes.begin() + r.pos, 32, ck.config_hash.begin());
  r.pos += 32;
  ck.step = r.u64();
  ck.rng_state = r.u64();
  std::uint32_t nparams = r.u32();
  ck.params.resize(nparams);
  for (auto& b : ck.params) {
    b.name = r.str(r.u32());
    std::uint32_t nd = r.u32();
    b.shape.resize(nd);
    for (auto& d : b.shape) d = r.u64();
    b.data.resize(shape_size(b.shape));
    for (auto& v : b.data) v = r.f32();
  }
  std::uint32_t nopt = r.u32();
  ck.opt_states.resize(nopt);
  for (auto& s : ck.opt_states) {
    s.name = r.str(r.u32());
    s.t = r.u64();
    std::uint32_t n = r.u32();
    s.m.resize(n);
    for (auto& v : s.m) v = r.f32();
    s.v.resize(n);
    for (auto& v : s.v) v = r.f32();
  }
  if (r.pos != bytes.size())
    throw UnsupportedFormat("checkpoint: trailing bytes after payload");
  return ck;
}

void save_checkpoint_file(const CheckpointData& ck, const std::string& path) {
  write_file_atomic(path, serialize_checkpoint(ck));
}

CheckpointData load_checkpoint_file(const std::string& path) {
  auto bytes = read_file_bytes(path);
  return deserialize_checkpoint(bytes);
}

// --- trace ---------------------------------------------------------------

std::string TrainTrace::to_csv() const {
  std::string out = "step,l_adv,l_rec,l_perc,total,d_acc,e_bitacc\n";
  for (const auto& r : rows) {
    out += std::to_string(r.step) + "," + format_double(r.l_adv) + "," +
           format_double(r.l_rec) + "," + format_double(r.l_perc) + "," +
           format_double(r.total) + "," + format_double(r.d_acc) + "," +
           format_double(r.e_bitacc) + "\n";
  }
  return out;
}

void TrainTrace::write_csv(const std::string& path) const {
  write_file_atomic(path, to_csv());
}

// --- trainer ----------------------------------------------------------------

struct Trainer::Impl {
  TrainConfig cfg;
  std::vector<Image> covers;
  std::size_t channels = 1;
  std::unique_ptr<ModelBundle<float>> bundle;
  std::unique_ptr<AdamOptimizer<float>> opt_g, opt_d, opt_e;
  std::uint64_t step = 0;
  Rng master{0};

  // Cached per-epoch shuffle of cover indices.
  std::uint64_t cached_epoch = ~0ull;
  std::vector<std::size_t> perm;

  explicit Impl(const TrainConfig& config) : cfg(config), master(config.seed) {
    cfg.validate();
    load_dataset();
    bundle = std::make_unique<ModelBundle<float>>(
        cfg.topology(channels), master.fork(0x6D6F64656C /* "model" */));
    AdamHyper hg{cfg.lr_g, 0.5, 0.999, 1e-8};
    AdamHyper hd{cfg.lr_d, 0.5, 0.999, 1e-8};
    AdamHyper he{cfg.lr_e, 0.5, 0.999, 1e-8};
    opt_g = std::make_unique<AdamOptimizer<float>>(
        bundle->generator.parameters(), hg);
    opt_d = std::make_unique<AdamOptimizer<float>>(
        bundle->discriminator.parameters(), hd);
    opt_e = std::make_unique<AdamOptimizer<float>>(
        bundle->extractor.parameters(), he);
  }

  void load_dataset() {
    namespace fs = std::filesystem;
    if (!fs::is_directory(cfg.dataset_dir))
      throw IoError("dataset directory not found: " + cfg.dataset_dir);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(cfg.dataset_dir))
      if (e.is_regular_file() && e.path().extension() == ".png")
        files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw IoError("dataset is empty: no .png files in " + cfg.dataset_dir);
    covers.reserve(files.size());
    for (const auto& f : files) {
      Image img = load_image(f);
      if (covers.empty()) channels = img.channels;
      if (img.channels != channels)
        throw UnsupportedFormat(f + ": dataset mixes channel counts (" +
                                std::to_string(img.channels) + " vs " +
                                std::to_string(channels) + ")");
      if (img.width < cfg.crop || img.height < cfg.crop)
        throw UnsupportedFormat(f + ": smaller than crop extent " +
                                std::to_string(cfg.crop));
      covers.push_back(std::move(img));
    }
  }

  std::size_t cover_index(std::uint64_t global) {
    const std::size_t n = covers.size();
    std::uint64_t epoch = global / n;
    std::size_t pos = static_cast<std::size_t>(global % n);
    if (epoch != cached_epoch) {
      perm.resize(n);
      std::iota(perm.begin(), perm.end(), std::size_t(0));
      Rng r = master.fork(0x73687566 /* "shuf" */).fork(epoch);
      for (std::size_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[r.next_below(i)]);
      cached_epoch = epoch;
    }
    return perm[pos];
  }

  struct Batch {
    Tensor<float> covers;   // [N,C,S,S] in [-1,1]
    Tensor<float> gen_in;   // [N,C+P,S,S]
    Tensor<float> targets;  // [N,P,S,S] in {0,1}
    Bits bits;              // N*P*S*S
  };

  Batch sample_batch(std::uint64_t at_step) {
    const std::size_t n = cfg.batch, c = channels, s = cfg.crop,
                      p = cfg.bpp;
    Batch b{Tensor<float>({n, c, s, s}), Tensor<float>({n, c + p, s, s}),
            Tensor<float>({n, p, s, s}), Bits(n * p * s * s)};
    auto& cov = b.covers.mutable_data();
    auto& gin = b.gen_in.mutable_data();
    auto& tgt = b.targets.mutable_data();
    for (std::size_t i = 0; i < n; ++i) {
      const Image& img = covers[cover_index(at_step * n + i)];
      Rng crop_rng = master.fork(0x63726F70 /* "crop" */).fork(at_step).fork(i);
      std::size_t ox = img.width == s ? 0 : crop_rng.next_below(img.width - s + 1);
      std::size_t oy = img.height == s ? 0 : crop_rng.next_below(img.height - s + 1);
      for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t y = 0; y < s; ++y)
          for (std::size_t x = 0; x < s; ++x) {
            float v = static_cast<float>(
                static_cast<double>(img.at(ox + x, oy + y, ch)) / 127.5 - 1.0);
            cov[((i * c + ch) * s + y) * s + x] = v;
            gin[((i * (c + p) + ch) * s + y) * s + x] = v;
          }
      Rng bit_rng = master.fork(0x73656372 /* "secr" */).fork(at_step).fork(i);
      for (std::size_t j = 0; j < p * s * s; ++j) {
        std::uint8_t bit = bit_rng.next_bit() ? 1 : 0;
        b.bits[i * p * s * s + j] = bit;
        tgt[i * p * s * s + j] = static_cast<float>(bit);
        gin[(i * (c + p) + c) * s * s + j] = bit ? 1.0f : -1.0f;
      }
    }
    return b;
  }

  void check_finite(double v, const char* phase) const {
    if (!std::isfinite(v))
      throw TrainError("non-finite loss in " + std::string(phase) +
                       " phase at step " + std::to_string(step));
  }

  TrainTraceRow train_step() {
    Batch batch = sample_batch(step);
    TrainTraceRow row;
    row.step = step;

    // Phase 1: discriminator on covers vs fresh stego.
    for (std::size_t rep = 0; rep < cfg.d_per_step; ++rep) {
      Tensor<float> stego =
          bundle->generator.forward(nullptr, batch.gen_in, false, true);
      Tape<float> tape;
      auto d_real =
          bundle->discriminator.forward(&tape, batch.covers, true, true);
      auto d_fake = bundle->discriminator.forward(&tape, stego, true, true);
      auto adv = adversarial_loss(d_real, d_fake);
      row.l_adv = adv.item();
      check_finite(row.l_adv, "discriminator");
      auto loss_d = neg(adv);
      opt_d->zero_grad();
      tape.backward(loss_d);
      opt_d->step();

      std::size_t correct = 0;
      for (float v : d_real.data()) correct += v > 0.5f;
      for (float v : d_fake.data()) correct += v <= 0.5f;
      row.d_acc = static_cast<double>(correct) /
                  static_cast<double>(d_real.size() + d_fake.size());
    }

    // Phase 2: generator against frozen D and E under the combined loss.
    for (std::size_t rep = 0; rep < cfg.g_per_step; ++rep) {
      Tape<float> tape;
      auto stego = bundle->generator.forward(&tape, batch.gen_in, true, true);
      auto d_fake = bundle->discriminator.forward(&tape, stego, false, true);
      auto logits = bundle->extractor.forward(&tape, stego, false, true);
      auto l_gadv = generator_adversarial_loss(d_fake);
      auto l_rec = reconstruction_loss(batch.targets, logits);
      auto l_perc = perceptual_loss(bundle->features, batch.covers, stego);
      row.l_rec = l_rec.item();
      row.l_perc = l_perc.item();
      check_finite(l_gadv.item(), "generator");
      check_finite(row.l_rec, "generator");
      check_finite(row.l_perc, "generator");
      auto loss_g = total_loss(l_gadv, l_rec, l_perc, cfg.weights);
      opt_g->zero_grad();
      tape.backward(loss_g);
      opt_g->step();
    }

    // Phase 3: extractor on fresh stego from the frozen generator.
    for (std::size_t rep = 0; rep < cfg.e_per_step; ++rep) {
      Tensor<float> stego =
          bundle->generator.forward(nullptr, batch.gen_in, false, true);
      Tape<float> tape;
      auto logits = bundle->extractor.forward(&tape, stego, true, true);
      auto l_e = reconstruction_loss(batch.targets, logits);
      check_finite(l_e.item(), "extractor");
      opt_e->zero_grad();
      tape.backward(l_e);
      opt_e->step();

      std::size_t hits = 0;
      const auto& lg = logits.data();
      for (std::size_t i = 0; i < batch.bits.size(); ++i)
        hits += (lg[i] > 0.0f ? 1 : 0) == batch.bits[i];
      row.e_bitacc =
          static_cast<double>(hits) / static_cast<double>(batch.bits.size());
    }

    row.total = total_loss(row.l_adv, row.l_rec, row.l_perc, cfg.weights);
    ++step;
    return row;
  }

  CheckpointData checkpoint() {
    CheckpointData ck;
    ck.version = 1;
    ck.config_hash = cfg.hash();
    ck.step = step;
    ck.rng_state = master.state();
    for (auto* p : checkpoint_params(*bundle))
      ck.params.push_back({p->name, p->shape, p->value});
    for (auto* opt : {opt_g.get(), opt_d.get(), opt_e.get()}) {
      auto& states = opt->states();
      for (std::size_t i = 0; i < states.size(); ++i)
        ck.opt_states.push_back({opt->params()[i]->name, states[i].t,
                                 states[i].m, states[i].v});
    }
    return ck;
  }
};

Trainer::Trainer(const TrainConfig& config) : impl_(new Impl(config)) {}

Trainer::Trainer(const TrainConfig& config, const std::string& resume_path)
    : impl_(new Impl(config)) {
  CheckpointData ck = load_checkpoint_file(resume_path);
  auto expect = config.hash();
  if (ck.config_hash != expect)
    throw ConfigError("resume: config hash mismatch (checkpoint " +
                      to_hex(ck.config_hash) + ", config " + to_hex(expect) +
                      ")");
  apply_checkpoint(*impl_->bundle,
                   {impl_->opt_g.get(), impl_->opt_d.get(), impl_->opt_e.get()},
                   ck);
  impl_->step = ck.step;
}

Trainer::~Trainer() = default;

TrainTraceRow Trainer::train_step() { return impl_->train_step(); }

TrainTrace Trainer::run() {
  namespace fs = std::filesystem;
  fs::create_directories(impl_->cfg.out_dir);
  TrainTrace trace;
  const auto& cfg = impl_->cfg;

  std::vector<double> bitacc_hist;
  while (impl_->step < cfg.steps) {
    TrainTraceRow row = impl_->train_step();
    trace.rows.push_back(row);
    bitacc_hist.push_back(row.e_bitacc);

    if (impl_->step % cfg.checkpoint_interval == 0 && impl_->step < cfg.steps)
      save_checkpoint_file(impl_->checkpoint(),
                           (fs::path(cfg.out_dir) /
                            ("ckpt-" + std::to_string(impl_->step) + ".sgf1"))
                               .string());

    auto window_mean = [&](std::size_t window, std::size_t back) {
      if (bitacc_hist.size() < back + window) return -1.0;
      double s = 0;
      for (std::size_t i = bitacc_hist.size() - back - window;
           i < bitacc_hist.size() - back; ++i)
        s += bitacc_hist[i];
      return s / static_cast<double>(window);
    };

    if (cfg.target_bitacc > 0) {
      double recent = window_mean(std::min<std::size_t>(100, cfg.steps), 0);
      if (recent >= cfg.target_bitacc) break;
    }
    if (cfg.early_stop) {
      double recent = window_mean(cfg.early_stop_window, 0);
      double before = window_mean(cfg.early_stop_window, cfg.early_stop_window);
      if (recent >= 0 && before >= 0 && recent - before < cfg.early_stop_tol)
        break;
    }
  }

  save_checkpoint_file(impl_->checkpoint(),
                       (fs::path(cfg.out_dir) / "ckpt-final.sgf1").string());
  trace.write_csv((fs::path(cfg.out_dir) / "trace.csv").string());
  return trace;
}

CheckpointData Trainer::checkpoint() const { return impl_->checkpoint(); }
std::uint64_t Trainer::step() const { return impl_->step; }
const TrainConfig& Trainer::config() const { return impl_->cfg; }
ModelBundle<float>& Trainer::bundle() { return *impl_->bundle; }
std::size_t Trainer::dataset_size() const { return impl_->covers.size(); }

// --- inference codec ----------------------------------------------------------

struct GanCodec::Impl {
  NetTopology topo;
  std::unique_ptr<ModelBundle<float>> bundle;

  explicit Impl(const CheckpointData& ck) : topo(topology_from_checkpoint(ck)) {
    bundle = std::make_unique<ModelBundle<float>>(topo, Rng(0));
    apply_checkpoint(*bundle, {}, ck);
  }
};

GanCodec::GanCodec(const CheckpointData& ck) : impl_(new Impl(ck)) {}
GanCodec::GanCodec(const std::string& path)
    : impl_(new Impl(load_checkpoint_file(path))) {}
GanCodec::~GanCodec() = default;
GanCodec::GanCodec(GanCodec&&) noexcept = default;
GanCodec& GanCodec::operator=(GanCodec&&) noexcept = default;

std::size_t GanCodec::bits_per_pixel() const {
  return impl_->topo.secret_planes;
}
std::size_t GanCodec::cover_channels() const {
  return impl_->topo.cover_channels;
}

std::size_t GanCodec::capacity_bits(const Image& cover) const {
  return impl_->topo.secret_planes * cover.width * cover.height;
}

Image GanCodec::embed(const Image& cover,
                      std::span<const std::uint8_t> payload_bits) const {
  if (cover.channels != impl_->topo.cover_channels)
    throw ShapeError("gan embed: model expects " +
                     std::to_string(impl_->topo.cover_channels) +
                     " channel(s), cover has " +
                     std::to_string(cover.channels));
  const std::size_t mult = GeneratorNet<float>::required_multiple();
  if (cover.width % mult != 0 || cover.height % mult != 0)
    throw ShapeError("gan embed: cover extents must be multiples of " +
                     std::to_string(mult) + ", got " +
                     std::to_string(cover.width) + "x" +
                     std::to_string(cover.height));
  const std::size_t capacity = capacity_bits(cover);
  Bits frame = frame_bits(payload_bits);
  if (frame.size() > capacity) throw CapacityExceeded(frame.size(), capacity);

  SecretPlane plane = bits_to_plane(frame, cover.height, cover.width,
                                    impl_->topo.secret_planes);
  Tensor<float> cov = normalize<float>(cover);
  Tensor<float> stego =
      generator_forward(impl_->bundle->generator, cov, plane);
  return denormalize(stego);
}

Bits GanCodec::extract_raw(const Image& stego) const {
  if (stego.channels != impl_->topo.cover_channels)
    throw ShapeError("gan extract: model expects " +
                     std::to_string(impl_->topo.cover_channels) +
                     " channel(s), stego has " +
                     std::to_string(stego.channels));
  Tensor<float> st = normalize<float>(stego);
  Tensor<float> logits = extractor_forward(impl_->bundle->extractor, st);
  return logits_to_bits(logits, capacity_bits(stego));
}

Bits GanCodec::extract(const Image& stego) const {
  return unframe_bits(extract_raw(stego), capacity_bits(stego));
}

}  // namespace stegkit
