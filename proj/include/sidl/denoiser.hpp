#pragma once

#include <cstdint>
#include <vector>

#include "sidl/mlp.hpp"
#include "sidl/schedule.hpp"
#include "sidl/toyworld.hpp"

namespace sidl {

// Conditional noise predictor: MLP over (flattened z_t, sinusoidal
// timestep features, conditioning vector).
struct Denoiser {
  Mlp net;
  std::size_t latent_size = 0;  // H*W
  std::size_t time_dim = 32;
  std::size_t cond_dim = 0;
  bool frozen = false;

  // Batched: Z is B x latent, cond is B x cond_dim, one timestep per row.
  Tensor denoise_batch(const Tensor& z_t, const std::vector<int>& t,
                       const Tensor& cond, const Schedule& s) const;
  // Single sample: z_t any shape with latent_size elements, cond 1-D.
  Tensor denoise(const Tensor& z_t, int t, const Tensor& cond,
                 const Schedule& s) const;

  std::uint64_t checksum() const { return net.checksum(); }
};

Denoiser make_denoiser(std::size_t latent_size, std::size_t cond_dim,
                       std::size_t hidden, int hidden_layers, Rng& rng);

std::vector<double> timestep_features(int t, std::size_t dim);

struct PretrainConfig {
  int steps = 20000;
  int batch = 32;
  double lr = 1e-3;
  double cond_dropout = 0.1;
};

struct PretrainResult {
  double loss_start = 0.0;  // averaged over the first 50 steps
  double loss_end = 0.0;    // averaged over the last 50 steps
  double heldout_loss_initial = 0.0;
  double heldout_loss_final = 0.0;
};

// Trains the denoiser, token embeddings and mixer weights jointly with
// the noise-prediction objective, with unconditional dropout for CFG.
// All three are frozen on return.
PretrainResult pretrain_denoiser(Denoiser& model, TokenDict& dict,
                                 ContextMixer& mixer, const WorldConfig& world,
                                 const Schedule& s, const PretrainConfig& cfg,
                                 Rng& rng);

// Conditioning vector for prompt "[first][last] ctx" of a training identity.
Tensor identity_condition(const TokenDict& dict, const ContextMixer& mixer,
                          int identity_id, int context_id);

}  // namespace sidl
