#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sidl/denoiser.hpp"
#include "sidl/mlp.hpp"
#include "sidl/priorspace.hpp"
#include "sidl/schedule.hpp"
#include "sidl/toyworld.hpp"

namespace sidl {

// Frozen identity feature extractor plus the trainable projection to the
// two word embeddings.
struct IdentityHead {
  Mlp extractor;   // image -> feature vector I, frozen
  Mlp projector;   // I -> [v'1, v'2] (2*d outputs), trainable
  std::size_t feature_dim = 64;
  std::size_t embed_dim = 16;

  std::uint64_t extractor_checksum() const { return extractor.checksum(); }
  std::uint64_t projector_checksum() const { return projector.checksum(); }
};

enum class LossBranch { Noise, Reconstruction };
enum class LossMode { TwoPhase, NoiseOnly, RecOnly };
enum class OptimizerKind { Sgd, Adam };
enum class PromptMode { Context, Bare };

struct TrainConfig {
  double alpha = 0.6;       // phase divider
  double beta_hair = 0.1;   // hair-mask weight
  int steps = 450;
  double learning_rate = 5e-5;
  int batch = 1;
  double guidance_scale = 8.5;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  LossMode loss_mode = LossMode::TwoPhase;
  PromptMode prompt_mode = PromptMode::Context;
  bool use_adain = true;
  bool use_mask = true;
  bool mask_normalized = false;
};

Tensor encode_identity(const Tensor& image, const IdentityHead& head);

// v*_i = adain_land(projector(I)_i, prior); fully differentiable through
// the projector. With use_adain=false returns the raw projector slices.
std::pair<Tensor, Tensor> project_and_land(const Tensor& I,
                                           const IdentityHead& head,
                                           const std::vector<PriorSpace>& priors,
                                           bool use_adain = true);

LossBranch select_loss_branch(int t, double alpha, int T);

// Per-element squared-error map (noise or reconstruction branch by
// t >= alpha*T), masked: mean(Mf .* map) + beta * mean(Mh .* map).
Tensor masked_two_phase_loss(const ToySample& sample, const Tensor& g,
                             int t, const Tensor& eps, const Denoiser& model,
                             const ContextMixer& mixer, const Schedule& s,
                             const TrainConfig& cfg);

struct AugmentResult {
  Tensor image;
  std::vector<std::uint8_t> mask_face;
  std::vector<std::uint8_t> mask_hair;
};

struct AugmentParams {
  double value_scale = 1.0;  // in [0.9, 1.1]
  double value_offset = 0.0; // in [-0.1, 0.1]
  int dx = 0, dy = 0;        // integer shift, each in [-2, 2]
  int crop = 0;              // pixels removed, in {0,1,2}
  int ox = 0, oy = 0;        // crop origin, in [0, crop]
};

AugmentResult augment_apply(const Tensor& image,
                            const std::vector<std::uint8_t>& mask_face,
                            const std::vector<std::uint8_t>& mask_hair,
                            const AugmentParams& p);

// Value jitter, integer shift, crop-and-resize; masks co-transform.
AugmentResult augment(const Tensor& image,
                      const std::vector<std::uint8_t>& mask_face,
                      const std::vector<std::uint8_t>& mask_hair, Rng& rng);

struct TraceRow {
  int step;
  int t;
  LossBranch branch;
  double loss;
};

struct CustomizeResult {
  std::vector<TraceRow> trace;
  std::vector<double> v_star_1;  // landed embeddings after training
  std::vector<double> v_star_2;
};

IdentityHead make_identity_head(std::size_t latent_size, std::size_t feature_dim,
                                std::size_t embed_dim, Rng& rng);

// One-shot optimization of the projector against the frozen backbone.
CustomizeResult train_customizer(const ToySample& input, const Denoiser& model,
                                 const std::vector<PriorSpace>& priors,
                                 TokenDict& dict, const ContextMixer& mixer,
                                 const Schedule& s, IdentityHead& head,
                                 const TrainConfig& cfg);

const char* branch_name(LossBranch b);

}  // namespace sidl
