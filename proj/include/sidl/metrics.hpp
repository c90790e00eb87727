#pragma once

#include <functional>
#include <vector>

#include "sidl/customizer.hpp"
#include "sidl/mlp.hpp"
#include "sidl/tensor.hpp"
#include "sidl/toyworld.hpp"

namespace sidl {

struct EvalReport {
  double clip_i_analog = 0.0;
  double prompt_alignment = 0.0;   // in [0,1]
  double identity_similarity = 0.0;  // in [-1,1]
  double diversity = 0.0;            // >= 0
  double trusted_diversity = 0.0;
  double frechet = 0.0;              // >= 0 (clamped at -1e-8)
  std::size_t sample_count = 0;
};

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

// Extractor features of the face region (pixels under mask, others zeroed).
std::vector<double> face_features(const Tensor& image,
                                  const std::vector<std::uint8_t>& mask_face,
                                  const IdentityHead& head);

std::vector<double> image_features(const Tensor& image,
                                   const IdentityHead& head);

// Mean cosine similarity between face-region features of each generated
// image and of the reference.
double identity_similarity(const std::vector<Tensor>& generated,
                           const ToySample& reference,
                           const IdentityHead& head);

using FeatureFn = std::function<std::vector<double>(const Tensor&)>;

// Mean cosine distance (1 - cos) over unordered pairs.
double pairwise_diversity(const std::vector<Tensor>& generated,
                          const FeatureFn& feature_fn);

// Mean over unordered pairs of s_ij * d_ij where s_ij is the mean of the
// two identity similarities to the reference and d_ij the pair distance.
double trusted_diversity(const std::vector<Tensor>& generated,
                         const ToySample& reference, const IdentityHead& head);

// |mu_a-mu_b|^2 + Tr(Sa + Sb - 2 (Sa Sb)^(1/2)); population covariances,
// matrix square root via eigendecomposition; small negative round-off
// (relative to the covariance magnitude) clamps to 0.
double frechet_distance(const Tensor& feats_a, const Tensor& feats_b);

// Mean probe probability of the requested context.
double prompt_alignment(const std::vector<Tensor>& generated, int context_id,
                        const Mlp& probe);

}  // namespace sidl
