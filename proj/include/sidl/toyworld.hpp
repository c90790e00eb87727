#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sidl/rng.hpp"
#include "sidl/tensor.hpp"

namespace sidl {

struct WorldConfig {
  int width = 16;
  int height = 16;
  int num_identities = 72;      // generable identities
  int train_identities = 64;    // identities with dictionary tokens
  int num_contexts = 8;
  int embed_dim = 16;
  std::uint64_t world_seed = 7;  // fixes identity/context parameters
};

// One latent "portrait": an identity blob (face) ringed by a hair band
// over a context-dependent background. Masks are exact and disjoint.
struct ToySample {
  Tensor z0;  // shape {1, H, W}, values in [-1, 1]
  int identity_id = 0;
  int context_id = 0;
  std::vector<std::uint8_t> mask_face;  // H*W, {0,1}
  std::vector<std::uint8_t> mask_hair;  // H*W, {0,1}
};

// Analytic geometry of an identity's face/hair regions; gen_sample paints
// exactly these regions.
struct FaceGeometry {
  double cx, cy;    // ellipse center
  double rx, ry;    // face radii
  double hrx, hry;  // outer hair radii
  bool in_face(int x, int y) const;
  bool in_hair(int x, int y) const;
};

FaceGeometry face_geometry(const WorldConfig& cfg, int identity_id);

// Deterministic given (identity, context, rng seed); face pixels depend
// on identity only, background on context plus a small rng dither.
ToySample gen_sample(const WorldConfig& cfg, int identity_id, int context_id,
                     Rng& rng);

// Token dictionary standing in for the text encoder's embedding layer.
// Each training identity owns a first/last token pair; contexts own one
// token each; two placeholder ids resolve to the current learned
// embeddings set via set_placeholders.
struct TokenDict {
  std::vector<std::string> vocab;
  Tensor embeddings;  // V x d, trainable during pretraining then frozen
  int placeholder1 = -1;
  int placeholder2 = -1;
  int first_context_token = 0;
  int first_identity_token = 0;
  int num_identities = 0;
  int num_contexts = 0;

  Tensor current_v1;  // learned embedding bound to placeholder1
  Tensor current_v2;

  int context_token(int c) const;
  int id_token_first(int i) const;
  int id_token_last(int i) const;
  void set_placeholders(Tensor v1, Tensor v2);
  std::uint64_t checksum() const;
};

TokenDict build_dict(const WorldConfig& cfg, Rng& rng);

// Row i is the embedding of token i; placeholders resolve to the current
// learned vectors (differentiable).
Tensor compose_prompt(const std::vector<int>& tokens, const TokenDict& dict);

// Frozen linear positional mixer standing in for the text transformer:
// cond = sum_i w_i * g_i.
struct ContextMixer {
  Tensor pos_weights;  // length max_len
  std::uint64_t checksum() const;
};

ContextMixer make_mixer(int max_len, Rng& rng);

Tensor context_condition(const Tensor& g, const ContextMixer& mixer);

}  // namespace sidl
