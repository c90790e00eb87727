#include "sidl/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "sidl/linalg.hpp"
#include "sidl/metrics.hpp"

namespace sidl {

EmbeddingStats embedding_stats(const Tensor& embs, const PriorSpace& prior,
                               double elapsed_s) {
  if (embs.shape().size() != 2 || embs.shape()[0] < 1)
    throw std::invalid_argument("embedding_stats: expects non-empty n x d");
  std::size_t n = embs.shape()[0], d = embs.shape()[1];
  if (d != prior.mu.size())
    throw std::invalid_argument("embedding_stats: dimension mismatch");
  EmbeddingStats st;
  st.per_dim_max.assign(d, 0.0);
  st.per_dim_min.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mn = embs.values()[j], mx = embs.values()[j];
    for (std::size_t i = 1; i < n; ++i) {
      double v = embs.values()[i * d + j];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    st.per_dim_min[j] = mn;
    st.per_dim_max[j] = mx;
  }
  st.min = st.per_dim_min[0];
  st.max = st.per_dim_max[0];
  for (std::size_t j = 1; j < d; ++j) {
    st.min = std::min(st.min, st.per_dim_min[j]);
    st.max = std::max(st.max, st.per_dim_max[j]);
  }
  st.frechet_to_prior = frechet_distance(embs, prior.C);
  st.training_time_s = elapsed_s;
  return st;
}

Tensor project_2d(const Tensor& embs) {
  if (embs.shape().size() != 2)
    throw std::invalid_argument("project_2d: expects n x d");
  std::size_t n = embs.shape()[0], d = embs.shape()[1];
  if (n < 3) throw std::invalid_argument("project_2d: need n >= 3");
  std::vector<double> mean, cov;
  mean_cov(embs.values(), n, d, mean, cov);
  EigResult e = jacobi_eigh(cov, d);
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) total += std::max(e.values[j], 0.0);
  if (d < 2 || e.values[1] <= 1e-12 * (total + 1e-300))
    throw std::invalid_argument("project_2d: input rank < 2");

  // Sign convention: largest-magnitude loading positive.
  std::vector<double> dirs(2 * d);
  for (int c = 0; c < 2; ++c) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double v = std::abs(e.vectors[i * d + c]);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    double sgn = e.vectors[arg * d + c] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < d; ++i)
      dirs[c * d + i] = sgn * e.vectors[i * d + c];
  }

  std::vector<double> out(n * 2);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        acc += (embs.values()[i * d + j] - mean[j]) * dirs[c * d + j];
      out[i * 2 + c] = acc;
    }
  return Tensor::from({n, 2}, std::move(out));
}

}  // namespace sidl
