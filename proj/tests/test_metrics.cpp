#include <doctest.h>

#include <cmath>

#include "sidl/metrics.hpp"
#include "sidl/rng.hpp"

using namespace sidl;

namespace {
IdentityHead test_head(std::uint64_t seed = 7) {
  Rng r(seed);
  return make_identity_head(256, 16, 16, r);
}

ToySample test_sample(int id = 2, int ctx = 1, std::uint64_t seed = 4) {
  WorldConfig w;
  w.num_identities = 6;
  w.train_identities = 4;
  Rng r(seed);
  return gen_sample(w, id, ctx, r);
}
}  // namespace

TEST_CASE("cosine_similarity hand cases") {
  CHECK(cosine_similarity({1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
  double inv = 1.0 / std::sqrt(2.0);
  CHECK(cosine_similarity({1, 0}, {inv, inv}) ==
        doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(cosine_similarity({0, 0}, {1, 1}) == 0.0);
}

TEST_CASE("identity_similarity of the reference against itself is 1") {
  IdentityHead head = test_head();
  ToySample ref = test_sample();
  double s = identity_similarity({ref.z0}, ref, head);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pairwise_diversity degenerate and hand-enumerated cases") {
  IdentityHead head = test_head();
  ToySample ref = test_sample();
  auto feat = [&](const Tensor& img) {
    return face_features(img, ref.mask_face, head);
  };
  CHECK(pairwise_diversity({ref.z0, ref.z0, ref.z0}, feat) ==
        doctest::Approx(0.0));

  // orthogonal features: bypass the extractor with a projection stub
  FeatureFn axis = [](const Tensor& img) {
    return img.values()[0] > 0 ? std::vector<double>{1, 0}
                               : std::vector<double>{0, 1};
  };
  Tensor a = Tensor::from({1}, {1.0});
  Tensor b = Tensor::from({1}, {-1.0});
  CHECK(pairwise_diversity({a, b}, axis) == doctest::Approx(1.0));

  // three samples: mean over the three pairs
  ToySample s1 = test_sample(0, 0, 1), s2 = test_sample(1, 1, 2),
            s3 = test_sample(3, 2, 3);
  auto f1 = feat(s1.z0), f2 = feat(s2.z0), f3 = feat(s3.z0);
  double expect = ((1 - cosine_similarity(f1, f2)) +
                   (1 - cosine_similarity(f1, f3)) +
                   (1 - cosine_similarity(f2, f3))) /
                  3.0;
  CHECK(pairwise_diversity({s1.z0, s2.z0, s3.z0}, feat) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("trusted_diversity vanishing cases and pair oracle") {
  IdentityHead head = test_head();
  ToySample ref = test_sample();
  CHECK(trusted_diversity({ref.z0, ref.z0}, ref, head) ==
        doctest::Approx(0.0).epsilon(1e-9));

  ToySample s1 = test_sample(0, 0, 11), s2 = test_sample(3, 3, 12);
  double got = trusted_diversity({s1.z0, s2.z0}, ref, head);
  auto rf = face_features(ref.z0, ref.mask_face, head);
  auto f1 = face_features(s1.z0, ref.mask_face, head);
  auto f2 = face_features(s2.z0, ref.mask_face, head);
  double s_pair =
      0.5 * (cosine_similarity(f1, rf) + cosine_similarity(f2, rf));
  double d_pair = 1 - cosine_similarity(f1, f2);
  CHECK(got == doctest::Approx(s_pair * d_pair).epsilon(1e-12));
  // the arithmetic pattern: s=(1.0,0.8), d=0.5 -> 0.45
  CHECK(0.5 * (1.0 + 0.8) * 0.5 == doctest::Approx(0.45));
}

TEST_CASE("frechet_distance of identical feature sets is zero") {
  Rng r(5);
  std::vector<double> f(20 * 6);
  for (auto& v : f) v = r.normal();
  Tensor a = Tensor::from({20, 6}, f);
  CHECK(frechet_distance(a, a) < 1e-8);
}

TEST_CASE("frechet_distance reduces to 1-D moment arithmetic") {
  // exact moments: a has mu 0 sigma 1, b has mu 3 sigma 1
  Tensor a = Tensor::from({2, 1}, {-1, 1});
  Tensor b = Tensor::from({2, 1}, {2, 4});
  CHECK(frechet_distance(a, b) == doctest::Approx(9.0).epsilon(1e-8));
  // sigma 2 vs sigma 1, equal means
  Tensor c = Tensor::from({2, 1}, {-2, 2});
  Tensor d = Tensor::from({2, 1}, {-1, 1});
  CHECK(frechet_distance(c, d) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("frechet_distance is symmetric and positive on shifted data") {
  Rng r(6);
  std::vector<double> fa(30 * 4), fb(30 * 4);
  for (auto& v : fa) v = r.normal();
  for (std::size_t i = 0; i < fb.size(); ++i) fb[i] = r.normal() + 0.5;
  Tensor a = Tensor::from({30, 4}, fa);
  Tensor b = Tensor::from({30, 4}, fb);
  double ab = frechet_distance(a, b);
  double ba = frechet_distance(b, a);
  CHECK(ab > 0.1);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-6));
}

TEST_CASE("prompt_alignment requires samples") {
  Rng r(7);
  Mlp probe = Mlp::create({256, 16, 4}, r);
  CHECK_THROWS(prompt_alignment({}, 0, probe));
}

TEST_CASE("prompt_alignment averages the requested-context probability") {
  Rng r(8);
  Mlp probe = Mlp::create({256, 16, 4}, r);
  ToySample s = test_sample();
  double p = prompt_alignment({s.z0}, 1, probe);
  Tensor logits = probe.forward(reshape(s.z0, {1, 256}));
  auto sm = softmax_row(logits.values());
  CHECK(p == doctest::Approx(sm[1]).epsilon(1e-12));
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}
