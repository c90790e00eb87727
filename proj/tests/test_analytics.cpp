#include <doctest.h>

#include <cmath>

#include "sidl/analytics.hpp"
#include "sidl/rng.hpp"

using namespace sidl;

TEST_CASE("embedding_stats against the prior's own rows") {
  Rng r(3);
  std::vector<double> rows(16 * 4);
  for (auto& v : rows) v = r.uniform(-1, 1);
  Tensor C = Tensor::from({16, 4}, rows);
  PriorSpace prior = build_prior(C);
  EmbeddingStats st = embedding_stats(C, prior, 2.5);
  CHECK(st.frechet_to_prior == doctest::Approx(0.0).epsilon(1e-8));
  double mx = *std::max_element(rows.begin(), rows.end());
  double mn = *std::min_element(rows.begin(), rows.end());
  CHECK(st.max == mx);
  CHECK(st.min == mn);
  CHECK(st.training_time_s == 2.5);
  for (int j = 0; j < 4; ++j) {
    CHECK(st.per_dim_max[j] == prior.vmax[j]);
    CHECK(st.per_dim_min[j] == prior.vmin[j]);
  }
}

TEST_CASE("embedding_stats reads a single embedding's extrema") {
  Rng r(4);
  std::vector<double> rows(8 * 2);
  for (auto& v : rows) v = r.uniform(-1, 1);
  PriorSpace prior = build_prior(Tensor::from({8, 2}, rows));
  EmbeddingStats st =
      embedding_stats(Tensor::from({1, 2}, {0.2, -0.3}), prior, 0.0);
  CHECK(st.max == 0.2);
  CHECK(st.min == -0.3);
}

TEST_CASE("scaling embeddings away from the prior raises the distance") {
  Rng r(5);
  std::vector<double> rows(16 * 4), scaled(16 * 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = r.uniform(-1, 1);
    scaled[i] = 10.0 * rows[i];
  }
  Tensor C = Tensor::from({16, 4}, rows);
  PriorSpace prior = build_prior(C);
  double near = embedding_stats(C, prior, 0).frechet_to_prior;
  double far =
      embedding_stats(Tensor::from({16, 4}, scaled), prior, 0).frechet_to_prior;
  CHECK(far > near);
}

namespace {
double dist2(const std::vector<double>& v, std::size_t d, std::size_t i,
             std::size_t j) {
  double acc = 0;
  for (std::size_t k = 0; k < d; ++k) {
    double dd = v[i * d + k] - v[j * d + k];
    acc += dd * dd;
  }
  return std::sqrt(acc);
}
}  // namespace

TEST_CASE("project_2d preserves distances for planar data") {
  // points on a plane spanned by two fixed directions in 5-D
  Rng r(6);
  std::vector<double> u = {1, 0, 1, 0, 1}, w = {0, 1, 0, -1, 0};
  std::vector<double> pts(6 * 5);
  for (int i = 0; i < 6; ++i) {
    double a = r.uniform(-2, 2), b = r.uniform(-2, 2);
    for (int k = 0; k < 5; ++k) pts[i * 5 + k] = a * u[k] + b * w[k];
  }
  Tensor proj = project_2d(Tensor::from({6, 5}, pts));
  REQUIRE(proj.shape() == Shape{6, 2});
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      CHECK(dist2(proj.values(), 2, i, j) ==
            doctest::Approx(dist2(pts, 5, i, j)).epsilon(1e-8));
}

TEST_CASE("project_2d rejects rank-deficient input") {
  std::vector<double> same(5 * 3, 0.4);
  CHECK_THROWS(project_2d(Tensor::from({5, 3}, same)));
}

TEST_CASE("project_2d recovers a triangle embedded in 5-D") {
  // vertices with known side lengths 3, 4, 5
  std::vector<double> pts = {
      0, 0, 0, 0, 0,  //
      3, 0, 0, 0, 0,  //
      0, 4, 0, 0, 0,  //
  };
  // embed via two orthonormal directions so side lengths are preserved
  std::vector<double> e1 = {0.6, 0, 0.8, 0, 0}, e2 = {0, 1, 0, 0, 0};
  std::vector<double> mixed(3 * 5);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 5; ++k)
      mixed[i * 5 + k] = pts[i * 5 + 0] * e1[k] + pts[i * 5 + 1] * e2[k];
  Tensor proj = project_2d(Tensor::from({3, 5}, mixed));
  double d01 = dist2(proj.values(), 2, 0, 1);
  double d02 = dist2(proj.values(), 2, 0, 2);
  double d12 = dist2(proj.values(), 2, 1, 2);
  CHECK(d01 == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(d02 == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(d12 == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("project_2d is deterministic with a fixed sign convention") {
  Rng r(9);
  std::vector<double> pts(10 * 4);
  for (auto& v : pts) v = r.uniform(-1, 1);
  Tensor a = project_2d(Tensor::from({10, 4}, pts));
  Tensor b = project_2d(Tensor::from({10, 4}, pts));
  CHECK(a.values() == b.values());
}
