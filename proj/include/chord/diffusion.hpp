// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "chord/rng.hpp"
#include "chord/tensor.hpp"

namespace chord {

// ---------------------------------------------------------------------------
// Noise schedule
// ---------------------------------------------------------------------------

struct NoiseSchedule {
  std::string kind = "linear";
  int steps = 0;
  double beta_start = 0.0;
  double beta_end = 0.0;
  std::vector<double> betas;       // betas[t - 1] for t in 1..T
  std::vector<double> alphas;
  std::vector<double> alpha_bars;

  double beta(int t) const { return betas[t - 1]; }
  double alpha(int t) const { return alphas[t - 1]; }
  /// alpha_bar(0) is 1 so that t = 0 is the clean sample.
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars[t - 1]; }
};

/// Linear betas from beta_start to beta_end inclusive. Throws kArgument for
/// an invalid range or an unknown kind.
NoiseSchedule make_schedule(int steps = 1000, double beta_start = 1e-4, double beta_end = 0.02,
                            const std::string& kind = "linear");

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps. t = 0 returns x0.
Tensor forward_diffuse(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& schedule);

Tensor gaussian_like(int c, int h, int w, Rng& rng);

// ---------------------------------------------------------------------------
// Denoisers
// ---------------------------------------------------------------------------

class Denoiser {
 public:
  virtual ~Denoiser() = default;
  /// Predicted noise, same shape as x_t.
  virtual Tensor predict(const Tensor& x_t, const Tensor& cond, int t) const = 0;
};

struct UNetConfig {
  std::array<int, 3> widths{16, 32, 64};
  int time_dim = 32;
  int in_channels = 6;  // noisy layout + condition
  int out_channels = 3;
};

/// Three-level convolutional encoder-decoder with skip connections and a
/// sinusoidal timestep embedding added as a per-channel bias inside every
/// residual block. Inputs must have height and width divisible by 4.
template <class S>
class TinyUNet {
 public:
  struct Cache;

  TinyUNet(const UNetConfig& config, uint64_t seed);
  ~TinyUNet();
  TinyUNet(const TinyUNet&);
  TinyUNet& operator=(const TinyUNet&);

  const UNetConfig& config() const { return config_; }
  size_t parameter_count() const { return params_.size(); }
  std::vector<S>& parameters() { return params_; }
  const std::vector<S>& parameters() const { return params_; }

  TensorT<S> forward(const TensorT<S>& x_t, const TensorT<S>& cond, int t) const;
  /// Forward pass keeping activations in `cache` for backward().
  TensorT<S> forward(const TensorT<S>& x_t, const TensorT<S>& cond, int t, Cache& cache) const;
  /// Adds d(loss)/d(params) to `grad` given d(loss)/d(output).
  void backward(const Cache& cache, const TensorT<S>& grad_out, std::vector<S>& grad) const;

  std::shared_ptr<Cache> make_cache() const;

 private:
  struct Layout;
  UNetConfig config_;
  std::unique_ptr<Layout> layout_;
  std::vector<S> params_;
};

extern template class TinyUNet<float>;
extern template class TinyUNet<double>;

/// The reference denoiser used by training, sampling and scoring.
class TinyUNetDenoiser : public Denoiser {
 public:
  explicit TinyUNetDenoiser(const UNetConfig& config = {}, uint64_t seed = 0) : net_(config, seed) {}
  Tensor predict(const Tensor& x_t, const Tensor& cond, int t) const override {
    return net_.forward(x_t, cond, t);
  }
  TinyUNet<float>& net() { return net_; }
  const TinyUNet<float>& net() const { return net_; }

 private:
  TinyUNet<float> net_;
};

// ---------------------------------------------------------------------------
// Training, sampling, scoring
// ---------------------------------------------------------------------------

/// One training example: clean layout and its condition, both in [-1, 1].
struct TrainingPair {
  Tensor layout;
  Tensor cond;
};

/// Mean squared error between predicted and drawn noise, t ~ U{1..T}.
double training_loss(const Denoiser& denoiser, const Tensor& x0, const Tensor& cond,
                     const NoiseSchedule& schedule, Rng& rng);

struct TrainConfig {
  double learning_rate = 1e-4;
  double decay_factor = 0.1;
  std::vector<int> milestones;  // epochs at which the rate is multiplied by decay_factor
  int batch_size = 4;
  int epochs = 10;
  /// Stop after this many optimizer steps (0: no cap).
  int max_steps = 0;
  uint64_t seed = 0;
  int threads = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Rescale the batch gradient when its L2 norm exceeds this (0: off).
  double grad_clip = 1.0;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean loss per epoch
  std::vector<double> step_loss;
  int steps = 0;

  /// "epoch,mean_loss" rows.
  std::string loss_csv() const;
};

/// Adam on the epsilon-prediction loss. Results depend only on the seed, not
/// on the thread count. Throws kNumeric when the loss becomes non-finite and
/// kArgument for an empty or inconsistent dataset.
TrainResult train(TinyUNetDenoiser& model, const std::vector<TrainingPair>& data,
                  const NoiseSchedule& schedule, const TrainConfig& config,
                  const std::function<void(int epoch, double loss)>& on_epoch = {});

struct SampleOptions {
  /// Clamp the implied x0 estimate to [-1, 1] at every step and take the
  /// posterior mean from it. Without clamping this is the same update.
  bool clip_x0 = false;
};

/// Ancestral sampling from x_T ~ N(0, I):
/// x_{t-1} = (x_t - beta_t / sqrt(1 - abar_t) * eps_hat) / sqrt(alpha_t) + sqrt(beta_t) z,
/// with z = 0 at t = 1. Returns a tensor clamped to [-1, 1].
Tensor sample(const Denoiser& denoiser, const Tensor& cond, const NoiseSchedule& schedule,
              Rng& rng, const SampleOptions& options = {});

/// Average noise-prediction error over `iters` draws of t ~ U{t_lo..t_hi}
/// (inclusive) and eps ~ N(0, I).
double ood_score(const Denoiser& denoiser, const Tensor& x0, const Tensor& cond,
                 const NoiseSchedule& schedule, Rng& rng, int t_lo = 900, int t_hi = 1000,
                 int iters = 100);

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct Checkpoint {
  UNetConfig unet;
  NoiseSchedule schedule;
  uint64_t palette_hash = 0;
  int image_height = 0;
  int image_width = 0;
  uint64_t seed = 0;
  std::string metadata = "{}";  // free-form JSON object (train config, version)
  std::vector<float> parameters;

  TinyUNetDenoiser make_model() const;
  /// Throws kPalette when `hash` differs from the stored palette hash.
  void require_palette(uint64_t hash) const;
};

/// Binary file: magic, format version, JSON header, float32 parameters.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace chord
