#pragma once

#include <vector>

#include "sidl/priorspace.hpp"
#include "sidl/tensor.hpp"

namespace sidl {

struct EmbeddingStats {
  double max = 0.0;
  double min = 0.0;
  std::vector<double> per_dim_max;
  std::vector<double> per_dim_min;
  double frechet_to_prior = 0.0;
  double training_time_s = 0.0;
};

EmbeddingStats embedding_stats(const Tensor& embs, const PriorSpace& prior,
                               double elapsed_s);

// Deterministic 2-D PCA projection: center, top-2 eigenvectors of the
// covariance, sign fixed so each component's largest-magnitude loading
// is positive. Errors on rank < 2 input.
Tensor project_2d(const Tensor& embs);

}  // namespace sidl
