#include <doctest.h>

#include "sidl/toyworld.hpp"

using namespace sidl;

namespace {
WorldConfig small_world() {
  WorldConfig w;
  w.num_identities = 12;
  w.train_identities = 8;
  return w;
}
}  // namespace

TEST_CASE("gen_sample is bit-identical for identical seeds") {
  WorldConfig w = small_world();
  Rng r1(42), r2(42);
  ToySample a = gen_sample(w, 3, 2, r1);
  ToySample b = gen_sample(w, 3, 2, r2);
  CHECK(a.z0.values() == b.z0.values());
  CHECK(a.mask_face == b.mask_face);
  CHECK(a.mask_hair == b.mask_hair);
}

TEST_CASE("face pixels are context invariant, backgrounds differ") {
  WorldConfig w = small_world();
  Rng r1(1), r2(2);
  ToySample a = gen_sample(w, 5, 0, r1);
  ToySample b = gen_sample(w, 5, 3, r2);
  CHECK(a.mask_face == b.mask_face);
  bool bg_differs = false;
  for (std::size_t i = 0; i < a.z0.size(); ++i) {
    if (a.mask_face[i]) CHECK(a.z0.values()[i] == b.z0.values()[i]);
    if (!a.mask_face[i] && !a.mask_hair[i] &&
        a.z0.values()[i] != b.z0.values()[i])
      bg_differs = true;
  }
  CHECK(bg_differs);
}

TEST_CASE("mask areas match the analytic geometry") {
  WorldConfig w = small_world();
  for (int id = 0; id < w.num_identities; ++id) {
    FaceGeometry g = face_geometry(w, id);
    Rng r(id);
    ToySample s = gen_sample(w, id, 1, r);
    std::size_t face_count = 0, hair_count = 0;
    std::size_t face_expected = 0, hair_expected = 0;
    for (int y = 0; y < w.height; ++y)
      for (int x = 0; x < w.width; ++x) {
        std::size_t i = static_cast<std::size_t>(y) * w.width + x;
        face_count += s.mask_face[i];
        hair_count += s.mask_hair[i];
        face_expected += g.in_face(x, y);
        hair_expected += g.in_hair(x, y) && !g.in_face(x, y);
        CHECK_FALSE((s.mask_face[i] && s.mask_hair[i]));  // disjoint
      }
    CHECK(face_count == face_expected);
    CHECK(hair_count == hair_expected);
    CHECK(face_count > 0);
    CHECK(hair_count > 0);
  }
}

TEST_CASE("compose_prompt looks up frozen tokens verbatim") {
  WorldConfig w = small_world();
  Rng r(5);
  TokenDict dict = build_dict(w, r);
  int tok = dict.context_token(2);
  Tensor g = compose_prompt({tok}, dict);
  REQUIRE(g.shape() == Shape{1, static_cast<std::size_t>(w.embed_dim)});
  for (int j = 0; j < w.embed_dim; ++j)
    CHECK(g.values()[j] ==
          dict.embeddings.values()[tok * w.embed_dim + j]);
}

TEST_CASE("compose_prompt substitutes current placeholder embeddings") {
  WorldConfig w = small_world();
  Rng r(5);
  TokenDict dict = build_dict(w, r);
  std::vector<double> v1(w.embed_dim, 0.25), v2(w.embed_dim, -0.5);
  dict.set_placeholders(Tensor::from({(std::size_t)w.embed_dim}, v1),
                        Tensor::from({(std::size_t)w.embed_dim}, v2));
  Tensor g = compose_prompt(
      {dict.placeholder1, dict.placeholder2, dict.context_token(0)}, dict);
  for (int j = 0; j < w.embed_dim; ++j) {
    CHECK(g.values()[j] == 0.25);
    CHECK(g.values()[w.embed_dim + j] == -0.5);
  }
}

TEST_CASE("compose_prompt permutes rows with the token list") {
  WorldConfig w = small_world();
  Rng r(5);
  TokenDict dict = build_dict(w, r);
  int a = dict.context_token(0), b = dict.id_token_first(1);
  Tensor ab = compose_prompt({a, b}, dict);
  Tensor ba = compose_prompt({b, a}, dict);
  for (int j = 0; j < w.embed_dim; ++j) {
    CHECK(ab.values()[j] == ba.values()[w.embed_dim + j]);
    CHECK(ab.values()[w.embed_dim + j] == ba.values()[j]);
  }
}

TEST_CASE("context_condition single row scales by the first weight") {
  Rng r(9);
  ContextMixer m = make_mixer(4, r);
  Tensor g = Tensor::from({1, 3}, {1.0, -2.0, 0.5});
  Tensor c = context_condition(g, m);
  double w0 = m.pos_weights.values()[0];
  CHECK(c.values()[0] == doctest::Approx(w0 * 1.0));
  CHECK(c.values()[1] == doctest::Approx(w0 * -2.0));
  CHECK(c.values()[2] == doctest::Approx(w0 * 0.5));
}

TEST_CASE("context_condition of zero rows is zero") {
  Rng r(9);
  ContextMixer m = make_mixer(4, r);
  Tensor c = context_condition(Tensor::zeros({3, 5}), m);
  for (double v : c.values()) CHECK(v == 0.0);
}

TEST_CASE("context_condition matches an independent recomputation") {
  Rng r(17);
  ContextMixer m = make_mixer(6, r);
  std::vector<double> gv(3 * 4);
  for (auto& v : gv) v = r.uniform(-1, 1);
  Tensor g = Tensor::from({3, 4}, gv);
  Tensor c = context_condition(g, m);
  for (int j = 0; j < 4; ++j) {
    double expect = 0;
    for (int i = 0; i < 3; ++i)
      expect += m.pos_weights.values()[i] * gv[i * 4 + j];
    CHECK(c.values()[j] == doctest::Approx(expect).epsilon(1e-12));
  }
}
