// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include "json.hpp"
#include <sstream>
#include <thread>

#include "chord/error.hpp"

namespace chord {

Tensor image_to_tensor(const LayoutImage& image) {
  Tensor t(3, image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const size_t i = image.index(x, y);
      for (int c = 0; c < 3; ++c) t.at(c, y, x) = image.pixels[i + c] * 2.0f - 1.0f;
    }
  }
  return t;
}

LayoutImage tensor_to_image(const Tensor& t, const WorldTransform& transform) {
  if (t.c != 3) fail(ErrorKind::kTensor, "image tensors need 3 channels");
  LayoutImage img(t.w, t.h);
  img.transform = transform;
  for (int y = 0; y < t.h; ++y) {
    for (int x = 0; x < t.w; ++x) {
      const size_t i = img.index(x, y);
      for (int c = 0; c < 3; ++c) {
        img.pixels[i + c] = std::clamp((t.at(c, y, x) + 1.0f) * 0.5f, 0.0f, 1.0f);
      }
    }
  }
  return img;
}

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end,
                            const std::string& kind) {
  if (kind != "linear") fail(ErrorKind::kArgument, "unknown noise schedule '" + kind + "'");
  if (steps < 1) fail(ErrorKind::kArgument, "schedule needs at least one step");
  if (!(beta_start > 0) || !(beta_start <= beta_end) || !(beta_end < 1)) {
    fail(ErrorKind::kArgument, "schedule needs 0 < beta_start <= beta_end < 1");
  }
  NoiseSchedule s;
  s.kind = kind;
  s.steps = steps;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  double abar = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double b =
        steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * i / (steps - 1);
    s.betas.push_back(b);
    s.alphas.push_back(1.0 - b);
    abar *= 1.0 - b;
    s.alpha_bars.push_back(abar);
  }
  return s;
}

Tensor forward_diffuse(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& schedule) {
  if (!x0.same_shape(eps)) fail(ErrorKind::kTensor, "x0 and eps shapes differ");
  if (t < 0 || t > schedule.steps) {
    fail(ErrorKind::kArgument, "timestep " + std::to_string(t) + " outside 0.." +
                                   std::to_string(schedule.steps));
  }
  const double ab = schedule.alpha_bar(t);
  const float a = static_cast<float>(std::sqrt(ab));
  const float b = static_cast<float>(std::sqrt(1.0 - ab));
  Tensor out(x0.c, x0.h, x0.w);
  for (size_t i = 0; i < out.size(); ++i) out.data[i] = a * x0.data[i] + b * eps.data[i];
  return out;
}

Tensor gaussian_like(int c, int h, int w, Rng& rng) {
  Tensor t(c, h, w);
  for (float& v : t.data) v = static_cast<float>(rng.normal());
  return t;
}

namespace {

double mse(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) fail(ErrorKind::kTensor, "denoiser output shape differs from its input");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    acc += d * d;
  }
  const double m = acc / static_cast<double>(a.size());
  if (!std::isfinite(m)) fail(ErrorKind::kNumeric, "denoiser produced non-finite output");
  return m;
}

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double training_loss(const Denoiser& denoiser, const Tensor& x0, const Tensor& cond,
                     const NoiseSchedule& schedule, Rng& rng) {
  const int t = static_cast<int>(rng.uniform_int(1, schedule.steps));
  const Tensor eps = gaussian_like(x0.c, x0.h, x0.w, rng);
  const Tensor xt = forward_diffuse(x0, t, eps, schedule);
  return mse(denoiser.predict(xt, cond, t), eps);
}

std::string TrainResult::loss_csv() const {
  std::ostringstream o;
  o.precision(9);
  o << "epoch,mean_loss\n";
  for (size_t i = 0; i < epoch_loss.size(); ++i) o << i + 1 << "," << epoch_loss[i] << "\n";
  return o.str();
}

TrainResult train(TinyUNetDenoiser& model, const std::vector<TrainingPair>& data,
                  const NoiseSchedule& schedule, const TrainConfig& config,
                  const std::function<void(int, double)>& on_epoch) {
  if (data.empty()) fail(ErrorKind::kArgument, "training set is empty");
  if (!(config.learning_rate > 0)) fail(ErrorKind::kArgument, "learning rate must be positive");
  if (config.batch_size < 1) fail(ErrorKind::kArgument, "batch size must be >= 1");
  if (config.epochs < 1) fail(ErrorKind::kArgument, "epochs must be >= 1");
  const UNetConfig& uc = model.net().config();
  for (size_t i = 0; i < data.size(); ++i) {
    const TrainingPair& p = data[i];
    if (p.layout.c + p.cond.c != uc.in_channels || p.layout.c != uc.out_channels ||
        !p.layout.same_shape(data[0].layout) || p.cond.h != p.layout.h ||
        p.cond.w != p.layout.w) {
      fail(ErrorKind::kArgument, "training pair " + std::to_string(i) + " has a mismatched shape");
    }
  }

  TinyUNet<float>& net = model.net();
  std::vector<float>& params = net.parameters();
  const size_t np = params.size();
  std::vector<float> m(np, 0.0f), v(np, 0.0f);
  const int batch = std::min<int>(config.batch_size, static_cast<int>(data.size()));
  std::vector<std::vector<float>> grads(batch, std::vector<float>(np));
  std::vector<double> losses(batch);
  const int threads = std::max(1, std::min(config.threads, batch));

  TrainResult result;
  double lr = config.learning_rate;
  int step = 0;
  std::vector<size_t> order(data.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (std::count(config.milestones.begin(), config.milestones.end(), epoch) && epoch > 0) {
      lr *= config.decay_factor;
    }
    Rng shuffle_rng(mix(config.seed, 0xE90C0000ULL + static_cast<uint64_t>(epoch)));
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<size_t>(shuffle_rng.uniform_int(0, i - 1))]);
    }

    double epoch_sum = 0.0;
    int epoch_steps = 0;
    for (size_t start = 0; start < order.size(); start += batch) {
      if (config.max_steps > 0 && step >= config.max_steps) break;
      const int nb = static_cast<int>(std::min<size_t>(batch, order.size() - start));

      auto work = [&](int b) {
        const TrainingPair& p = data[order[start + b]];
        Rng rng(mix(config.seed, (static_cast<uint64_t>(step) << 16) + static_cast<uint64_t>(b)));
        const int t = static_cast<int>(rng.uniform_int(1, schedule.steps));
        const Tensor eps = gaussian_like(p.layout.c, p.layout.h, p.layout.w, rng);
        const Tensor xt = forward_diffuse(p.layout, t, eps, schedule);
        auto cache = net.make_cache();
        const Tensor out = net.forward(xt, p.cond, t, *cache);
        Tensor gout(out.c, out.h, out.w);
        double acc = 0.0;
        const float scale = 2.0f / static_cast<float>(out.size());
        for (size_t i = 0; i < out.size(); ++i) {
          const float d = out.data[i] - eps.data[i];
          acc += static_cast<double>(d) * d;
          gout.data[i] = scale * d;
        }
        losses[b] = acc / static_cast<double>(out.size());
        std::fill(grads[b].begin(), grads[b].end(), 0.0f);
        net.backward(*cache, gout, grads[b]);
      };
      if (threads == 1) {
        for (int b = 0; b < nb; ++b) work(b);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
          pool.emplace_back([&, w] {
            for (int b = w; b < nb; b += threads) work(b);
          });
        }
        for (auto& th : pool) th.join();
      }

      // Fixed-order reduction keeps results independent of the thread count.
      double loss = 0.0;
      for (int b = 0; b < nb; ++b) loss += losses[b];
      loss /= nb;
      if (!std::isfinite(loss)) {
        fail(ErrorKind::kNumeric, "training diverged at epoch " + std::to_string(epoch + 1));
      }
      ++step;
      const double bc1 = 1.0 - std::pow(config.adam_beta1, step);
      const double bc2 = 1.0 - std::pow(config.adam_beta2, step);
      const float b1 = static_cast<float>(config.adam_beta1);
      const float b2 = static_cast<float>(config.adam_beta2);
      const float step_size = static_cast<float>(lr / bc1);
      const float inv_bc2 = static_cast<float>(1.0 / bc2);
      const float eps = static_cast<float>(config.adam_eps);
      const float inv_nb = 1.0f / static_cast<float>(nb);
      std::vector<float>& g_sum = grads[0];
      double sq = 0.0;
      for (size_t i = 0; i < np; ++i) {
        float g = g_sum[i];
        for (int b = 1; b < nb; ++b) g += grads[b][i];
        g *= inv_nb;
        g_sum[i] = g;
        sq += static_cast<double>(g) * g;
      }
      float clip = 1.0f;
      const double gnorm = std::sqrt(sq);
      if (config.grad_clip > 0 && gnorm > config.grad_clip) {
        clip = static_cast<float>(config.grad_clip / gnorm);
      }
      for (size_t i = 0; i < np; ++i) {
        const float g = g_sum[i] * clip;
        m[i] = b1 * m[i] + (1.0f - b1) * g;
        v[i] = b2 * v[i] + (1.0f - b2) * g * g;
        params[i] -= step_size * m[i] / (std::sqrt(v[i] * inv_bc2) + eps);
      }
      result.step_loss.push_back(loss);
      epoch_sum += loss;
      ++epoch_steps;
    }
    if (epoch_steps == 0) break;
    result.epoch_loss.push_back(epoch_sum / epoch_steps);
    if (on_epoch) on_epoch(epoch + 1, result.epoch_loss.back());
  }
  result.steps = step;
  return result;
}

Tensor sample(const Denoiser& denoiser, const Tensor& cond, const NoiseSchedule& schedule,
              Rng& rng, const SampleOptions& options) {
  Tensor x = gaussian_like(3, cond.h, cond.w, rng);
  for (int t = schedule.steps; t >= 1; --t) {
    const Tensor eps = denoiser.predict(x, cond, t);
    if (!eps.same_shape(x)) fail(ErrorKind::kTensor, "denoiser output shape differs from its input");
    const double beta = schedule.beta(t);
    const float inv_sqrt_alpha = static_cast<float>(1.0 / std::sqrt(schedule.alpha(t)));
    const float coef = static_cast<float>(beta / std::sqrt(1.0 - schedule.alpha_bar(t)));
    const float sigma = static_cast<float>(std::sqrt(beta));
    // Posterior mean coefficients for the clamped-x0 form.
    const double ab = schedule.alpha_bar(t), ab_prev = schedule.alpha_bar(t - 1);
    const float x0_from_xt = static_cast<float>(1.0 / std::sqrt(ab));
    const float x0_from_eps = static_cast<float>(std::sqrt(1.0 - ab) / std::sqrt(ab));
    const float mean_x0 = static_cast<float>(std::sqrt(ab_prev) * beta / (1.0 - ab));
    const float mean_xt = static_cast<float>(std::sqrt(schedule.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab));
    for (size_t i = 0; i < x.size(); ++i) {
      float next;
      if (options.clip_x0) {
        const float x0 = std::clamp(x0_from_xt * x.data[i] - x0_from_eps * eps.data[i], -1.0f, 1.0f);
        next = mean_x0 * x0 + mean_xt * x.data[i];
      } else {
        next = inv_sqrt_alpha * (x.data[i] - coef * eps.data[i]);
      }
      if (t > 1) next += sigma * static_cast<float>(rng.normal());
      if (!std::isfinite(next)) {
        fail(ErrorKind::kNumeric, "sampling produced a non-finite value at step " + std::to_string(t));
      }
      x.data[i] = next;
    }
  }
  for (float& v : x.data) v = std::clamp(v, -1.0f, 1.0f);
  return x;
}

double ood_score(const Denoiser& denoiser, const Tensor& x0, const Tensor& cond,
                 const NoiseSchedule& schedule, Rng& rng, int t_lo, int t_hi, int iters) {
  if (t_lo < 1 || t_hi > schedule.steps || t_lo > t_hi) {
    fail(ErrorKind::kArgument, "ood timestep range must satisfy 1 <= t_lo <= t_hi <= T");
  }
  if (iters < 1) fail(ErrorKind::kArgument, "ood iterations must be >= 1");
  double acc = 0.0;
  for (int i = 0; i < iters; ++i) {
    const int t = static_cast<int>(rng.uniform_int(t_lo, t_hi));
    const Tensor eps = gaussian_like(x0.c, x0.h, x0.w, rng);
    const Tensor xt = forward_diffuse(x0, t, eps, schedule);
    acc += mse(denoiser.predict(xt, cond, t), eps);
  }
  return acc / iters;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'H', 'R', 'D', 'C', 'K', 'P', 'T'};
constexpr uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& o, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    o.write(b, sizeof(T));
  } else {
    o.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get(std::istream& in, const std::string& path) {
  T v;
  char b[sizeof(T)];
  if (!in.read(b, sizeof(T))) fail(ErrorKind::kIo, path + ": truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

TinyUNetDenoiser Checkpoint::make_model() const {
  TinyUNetDenoiser model(unet, 0);
  if (model.net().parameter_count() != parameters.size()) {
    fail(ErrorKind::kIo, "checkpoint parameter count does not match its network shape");
  }
  model.net().parameters() = parameters;
  return model;
}

void Checkpoint::require_palette(uint64_t hash) const {
  if (hash != palette_hash) {
    fail(ErrorKind::kPalette, "checkpoint was trained with palette " + hex64(palette_hash) +
                                  ", got " + hex64(hash));
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  nlohmann::json h;
  h["format"] = "chord-checkpoint";
  h["unet"] = {{"widths", ck.unet.widths},
               {"time_dim", ck.unet.time_dim},
               {"in_channels", ck.unet.in_channels},
               {"out_channels", ck.unet.out_channels}};
  h["schedule"] = {{"kind", ck.schedule.kind},
                   {"steps", ck.schedule.steps},
                   {"beta_start", ck.schedule.beta_start},
                   {"beta_end", ck.schedule.beta_end}};
  h["palette_hash"] = hex64(ck.palette_hash);
  h["image"] = {ck.image_height, ck.image_width};
  h["seed"] = ck.seed;
  h["parameter_count"] = ck.parameters.size();
  try {
    h["metadata"] = nlohmann::json::parse(ck.metadata);
  } catch (const nlohmann::json::parse_error&) {
    fail(ErrorKind::kArgument, "checkpoint metadata must be JSON");
  }
  const std::string header = h.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, path + ": cannot open for writing");
  out.write(kMagic, sizeof kMagic);
  put<uint32_t>(out, kFormatVersion);
  put<uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (float v : ck.parameters) put<float>(out, v);
  if (!out) fail(ErrorKind::kIo, path + ": write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, path + ": cannot open");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    fail(ErrorKind::kIo, path + ": not a checkpoint file");
  }
  const uint32_t version = get<uint32_t>(in, path);
  if (version != kFormatVersion) {
    fail(ErrorKind::kIo, path + ": unsupported checkpoint version " + std::to_string(version));
  }
  const uint64_t hlen = get<uint64_t>(in, path);
  if (hlen > (64u << 20)) fail(ErrorKind::kIo, path + ": corrupt checkpoint header");
  std::string header(hlen, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(hlen))) {
    fail(ErrorKind::kIo, path + ": truncated checkpoint");
  }
  Checkpoint ck;
  try {
    const nlohmann::json h = nlohmann::json::parse(header);
    const auto& u = h.at("unet");
    ck.unet.widths = u.at("widths").get<std::array<int, 3>>();
    ck.unet.time_dim = u.at("time_dim").get<int>();
    ck.unet.in_channels = u.at("in_channels").get<int>();
    ck.unet.out_channels = u.at("out_channels").get<int>();
    const auto& s = h.at("schedule");
    ck.schedule = make_schedule(s.at("steps").get<int>(), s.at("beta_start").get<double>(),
                                s.at("beta_end").get<double>(), s.at("kind").get<std::string>());
    ck.palette_hash = std::stoull(h.at("palette_hash").get<std::string>(), nullptr, 16);
    ck.image_height = h.at("image").at(0).get<int>();
    ck.image_width = h.at("image").at(1).get<int>();
    ck.seed = h.at("seed").get<uint64_t>();
    ck.metadata = h.value("metadata", nlohmann::json::object()).dump();
    const size_t n = h.at("parameter_count").get<size_t>();
    ck.parameters.resize(n);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, path + ": bad checkpoint header: " + e.what());
  }
  for (float& v : ck.parameters) v = get<float>(in, path);
  return ck;
}

}  // namespace chord
