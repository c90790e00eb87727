#include "sidl/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "sidl/linalg.hpp"

namespace sidl {

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("cosine_similarity: size mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> face_features(const Tensor& image,
                                  const std::vector<std::uint8_t>& mask_face,
                                  const IdentityHead& head) {
  if (image.size() != mask_face.size())
    throw std::invalid_argument("face_features: mask size mismatch");
  std::vector<double> masked(image.size());
  for (std::size_t i = 0; i < masked.size(); ++i)
    masked[i] = mask_face[i] ? image.values()[i] : 0.0;
  Tensor m = Tensor::from(image.shape(), std::move(masked));
  return encode_identity(m, head).values();
}

std::vector<double> image_features(const Tensor& image,
                                   const IdentityHead& head) {
  return encode_identity(image, head).values();
}

double identity_similarity(const std::vector<Tensor>& generated,
                           const ToySample& reference,
                           const IdentityHead& head) {
  if (generated.empty())
    throw std::invalid_argument("identity_similarity: empty sample set");
  auto ref = face_features(reference.z0, reference.mask_face, head);
  double acc = 0.0;
  for (const auto& g : generated)
    acc += cosine_similarity(face_features(g, reference.mask_face, head), ref);
  return acc / static_cast<double>(generated.size());
}

double pairwise_diversity(const std::vector<Tensor>& generated,
                          const FeatureFn& feature_fn) {
  if (generated.size() < 2)
    throw std::invalid_argument("pairwise_diversity: need >= 2 samples");
  std::vector<std::vector<double>> feats;
  feats.reserve(generated.size());
  for (const auto& g : generated) feats.push_back(feature_fn(g));
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < feats.size(); ++i)
    for (std::size_t j = i + 1; j < feats.size(); ++j) {
      acc += 1.0 - cosine_similarity(feats[i], feats[j]);
      ++pairs;
    }
  return acc / static_cast<double>(pairs);
}

double trusted_diversity(const std::vector<Tensor>& generated,
                         const ToySample& reference, const IdentityHead& head) {
  if (generated.size() < 2)
    throw std::invalid_argument("trusted_diversity: need >= 2 samples");
  auto ref = face_features(reference.z0, reference.mask_face, head);
  std::vector<std::vector<double>> feats;
  std::vector<double> sims;
  for (const auto& g : generated) {
    feats.push_back(face_features(g, reference.mask_face, head));
    sims.push_back(cosine_similarity(feats.back(), ref));
  }
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < feats.size(); ++i)
    for (std::size_t j = i + 1; j < feats.size(); ++j) {
      double s = 0.5 * (sims[i] + sims[j]);
      double d = 1.0 - cosine_similarity(feats[i], feats[j]);
      acc += s * d;
      ++pairs;
    }
  return acc / static_cast<double>(pairs);
}

double frechet_distance(const Tensor& feats_a, const Tensor& feats_b) {
  if (feats_a.shape().size() != 2 || feats_b.shape().size() != 2 ||
      feats_a.shape()[1] != feats_b.shape()[1])
    throw std::invalid_argument("frechet_distance: expects n x k and m x k");
  std::size_t k = feats_a.shape()[1];
  std::vector<double> mu_a, mu_b, cov_a, cov_b;
  mean_cov(feats_a.values(), feats_a.shape()[0], k, mu_a, cov_a);
  mean_cov(feats_b.values(), feats_b.shape()[0], k, mu_b, cov_b);

  double mean_term = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double d = mu_a[j] - mu_b[j];
    mean_term += d * d;
  }

  // sqrt(Sa) via eigendecomposition, then Tr((Sa Sb)^(1/2)) as the trace
  // square root of the symmetric product sqrt(Sa) Sb sqrt(Sa).
  // Rank-deficient covariances (fewer samples than feature dims) carry
  // eigenvalues that are zero up to round-off; taking sqrt of that noise
  // would inflate the trace, so eigenvalues far below the spectrum top are
  // treated as exact zeros.
  auto cutoff = [](const std::vector<double>& evs) {
    double top = 0.0;
    for (double v : evs) top = std::max(top, v);
    return top * 1e-12;
  };

  EigResult ea = jacobi_eigh(cov_a, k);
  double cut_a = cutoff(ea.values);
  std::vector<double> sqrt_a(k * k, 0.0);
  for (std::size_t l = 0; l < k; ++l) {
    double ev = ea.values[l] > cut_a ? ea.values[l] : 0.0;
    double sv = std::sqrt(ev);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        sqrt_a[i * k + j] += sv * ea.vectors[i * k + l] * ea.vectors[j * k + l];
  }
  std::vector<double> inner =
      matmul_raw(matmul_raw(sqrt_a, cov_b, k, k, k), sqrt_a, k, k, k);
  // Symmetrize against round-off before the second eigendecomposition.
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      double v = 0.5 * (inner[i * k + j] + inner[j * k + i]);
      inner[i * k + j] = v;
      inner[j * k + i] = v;
    }
  EigResult em = jacobi_eigh(inner, k);
  double cut_m = cutoff(em.values);
  double tr_sqrt = 0.0;
  for (double ev : em.values)
    if (ev > cut_m) tr_sqrt += std::sqrt(ev);

  double tr_a = 0.0, tr_b = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    tr_a += cov_a[i * k + i];
    tr_b += cov_b[i * k + i];
  }
  double fd = mean_term + tr_a + tr_b - 2.0 * tr_sqrt;
  // Round-off in the eigendecompositions scales with the covariance
  // magnitude, so the negativity guard must be relative.
  double tol = 1e-9 * std::max(1.0, mean_term + tr_a + tr_b);
  if (fd < -tol)
    throw std::runtime_error("frechet_distance: negative beyond tolerance");
  return std::max(fd, 0.0);
}

double prompt_alignment(const std::vector<Tensor>& generated, int context_id,
                        const Mlp& probe) {
  if (generated.empty())
    throw std::invalid_argument("prompt_alignment: empty sample set");
  std::size_t K = probe.out_dim();
  if (context_id < 0 || static_cast<std::size_t>(context_id) >= K)
    throw std::invalid_argument("prompt_alignment: unknown context");
  double acc = 0.0;
  for (const auto& g : generated) {
    Tensor logits = probe.forward(reshape(g, {1, g.size()}));
    auto p = softmax_row(logits.values());
    acc += p[static_cast<std::size_t>(context_id)];
  }
  return acc / static_cast<double>(generated.size());
}

}  // namespace sidl
