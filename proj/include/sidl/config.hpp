#pragma once

#include <cstdint>
#include <string>

#include "sidl/customizer.hpp"
#include "sidl/toyworld.hpp"

namespace sidl {

enum class EncoderMode { IdentityExtractor, GenericFeatures };

// Fully resolved experiment configuration. Every key has a default;
// unknown keys in a config file are errors.
struct ExperimentConfig {
  std::uint64_t seed = 1234;
  std::string out_dir = "out";

  // schedule
  int timesteps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;

  // world
  int identities = 64;        // pretraining identities
  int eval_identities = 5;    // held-out, starting right after the last trained
  int contexts = 8;
  int embed_dim = 16;
  int image_size = 16;
  std::uint64_t world_seed = 7;

  // pretraining
  int pretrain_steps = 20000;
  int pretrain_batch = 32;
  double pretrain_lr = 1e-3;
  double cond_dropout = 0.1;
  int denoiser_hidden = 256;
  int denoiser_layers = 3;
  int extractor_steps = 1500;
  int extractor_batch = 32;
  double extractor_lr = 1e-3;
  int probe_steps = 1200;
  int probe_batch = 32;
  double probe_lr = 1e-3;

  // customization
  double alpha = 0.6;
  double beta_hair = 0.1;
  int steps = 450;
  double learning_rate = 5e-5;
  int batch = 1;
  double guidance_scale = 8.5;
  std::string optimizer = "sgd";             // sgd | adam
  std::string loss_mode = "two_phase";       // two_phase | noise_only | rec_only
  std::string prompt_mode = "context";       // context | bare
  std::string prior_mode = "shared";         // shared | slot
  std::string encoder_mode = "identity_extractor";  // identity_extractor | generic_features
  bool use_adain = true;
  bool use_mask = true;
  bool mask_normalized = false;

  // sampling / evaluation
  int ddim_steps = 50;
  int sample_count = 8;
  int eval_seeds = 5;

  TrainConfig train_config() const;
  WorldConfig world_config() const;
  EncoderMode encoder() const;
  PriorMode prior() const;
};

// Flat key=value file, '#' comments, every key optional, unknown keys
// are errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical serialization of the resolved config (sorted keys).
std::string dump_config(const ExperimentConfig& c);

}  // namespace sidl
