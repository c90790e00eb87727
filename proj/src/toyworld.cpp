#include "sidl/toyworld.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sidl/checksum.hpp"

namespace sidl {

namespace {
double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }
}  // namespace

bool FaceGeometry::in_face(int x, int y) const {
  double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

bool FaceGeometry::in_hair(int x, int y) const {
  if (in_face(x, y)) return false;
  double dx = (x - cx) / hrx, dy = (y - cy) / hry;
  return dx * dx + dy * dy <= 1.0;
}

FaceGeometry face_geometry(const WorldConfig& cfg, int identity_id) {
  if (identity_id < 0 || identity_id >= cfg.num_identities)
    throw std::invalid_argument("face_geometry: identity out of range");
  Rng r(mix_seed(cfg.world_seed, 1000 + static_cast<std::uint64_t>(identity_id)));
  FaceGeometry g;
  g.rx = 3.0 + static_cast<double>(r.uniform_int(0, 3));
  g.ry = 3.0 + static_cast<double>(r.uniform_int(0, 3));
  g.cx = cfg.width / 2.0 - 0.5 + static_cast<double>(r.uniform_int(-1, 2));
  g.cy = cfg.height / 2.0 - 0.5 + static_cast<double>(r.uniform_int(-1, 2));
  g.hrx = g.rx + 2.0;
  g.hry = g.ry + 2.0;
  return g;
}

ToySample gen_sample(const WorldConfig& cfg, int identity_id, int context_id,
                     Rng& rng) {
  if (identity_id < 0 || identity_id >= cfg.num_identities)
    throw std::invalid_argument("gen_sample: identity out of range");
  if (context_id < 0 || context_id >= cfg.num_contexts)
    throw std::invalid_argument("gen_sample: context out of range");

  FaceGeometry geo = face_geometry(cfg, identity_id);

  // Identity appearance: continuous shading parameters, unique per id.
  Rng ir(mix_seed(cfg.world_seed, 2000 + static_cast<std::uint64_t>(identity_id)));
  double base = ir.uniform(0.25, 0.85);
  double gx = ir.uniform(-0.06, 0.06);
  double gy = ir.uniform(-0.06, 0.06);
  double amp = ir.uniform(0.1, 0.3);
  double fx = ir.uniform(0.6, 1.8);
  double fy = ir.uniform(0.6, 1.8);
  double phase = ir.uniform(0.0, 6.28318530717958647692);
  double hair_base = -ir.uniform(0.35, 0.9);
  double hair_gx = ir.uniform(-0.04, 0.04);

  // Context appearance: a fixed grating per context.
  Rng cr(mix_seed(cfg.world_seed, 3000 + static_cast<std::uint64_t>(context_id)));
  double bamp = cr.uniform(0.25, 0.6);
  double bfx = cr.uniform(0.4, 2.2);
  double bfy = cr.uniform(0.4, 2.2);
  double bphase = cr.uniform(0.0, 6.28318530717958647692);
  double bbias = cr.uniform(-0.3, 0.3);

  int H = cfg.height, W = cfg.width;
  std::vector<double> z(static_cast<std::size_t>(H) * W, 0.0);
  ToySample s;
  s.identity_id = identity_id;
  s.context_id = context_id;
  s.mask_face.assign(z.size(), 0);
  s.mask_hair.assign(z.size(), 0);

  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * W + x;
      double dx = x - geo.cx, dy = y - geo.cy;
      if (geo.in_face(x, y)) {
        s.mask_face[i] = 1;
        z[i] = clamp1(base + gx * dx + gy * dy +
                      amp * std::sin(fx * dx + fy * dy + phase));
      } else if (geo.in_hair(x, y)) {
        s.mask_hair[i] = 1;
        z[i] = clamp1(hair_base + hair_gx * dx);
      } else {
        double dither = rng.uniform(-0.02, 0.02);
        z[i] = clamp1(bbias + bamp * std::sin(bfx * x + bfy * y + bphase) +
                      dither);
      }
    }
  }
  s.z0 = Tensor::from({1, static_cast<std::size_t>(H), static_cast<std::size_t>(W)},
                      std::move(z));
  return s;
}

int TokenDict::context_token(int c) const {
  if (c < 0 || c >= num_contexts)
    throw std::invalid_argument("context_token: out of range");
  return first_context_token + c;
}

int TokenDict::id_token_first(int i) const {
  if (i < 0 || i >= num_identities)
    throw std::invalid_argument("id_token_first: out of range");
  return first_identity_token + 2 * i;
}

int TokenDict::id_token_last(int i) const { return id_token_first(i) + 1; }

void TokenDict::set_placeholders(Tensor v1, Tensor v2) {
  std::size_t d = embeddings.shape()[1];
  if (v1.size() != d || v2.size() != d)
    throw std::invalid_argument("set_placeholders: dimension mismatch");
  current_v1 = std::move(v1);
  current_v2 = std::move(v2);
}

std::uint64_t TokenDict::checksum() const {
  return fnv1a_doubles(embeddings.values());
}

TokenDict build_dict(const WorldConfig& cfg, Rng& rng) {
  TokenDict d;
  d.num_identities = cfg.train_identities;
  d.num_contexts = cfg.num_contexts;
  d.first_context_token = 0;
  for (int c = 0; c < cfg.num_contexts; ++c)
    d.vocab.push_back("ctx" + std::to_string(c));
  d.first_identity_token = static_cast<int>(d.vocab.size());
  for (int i = 0; i < cfg.train_identities; ++i) {
    d.vocab.push_back("id" + std::to_string(i) + "_first");
    d.vocab.push_back("id" + std::to_string(i) + "_last");
  }
  d.placeholder1 = static_cast<int>(d.vocab.size());
  d.vocab.push_back("<v*1>");
  d.placeholder2 = static_cast<int>(d.vocab.size());
  d.vocab.push_back("<v*2>");

  std::size_t V = d.vocab.size();
  std::size_t dim = static_cast<std::size_t>(cfg.embed_dim);
  std::vector<double> emb(V * dim);
  for (auto& x : emb) x = 0.1 * rng.normal();
  // Placeholder rows are never read from the table; keep them zero.
  for (std::size_t j = 0; j < dim; ++j) {
    emb[static_cast<std::size_t>(d.placeholder1) * dim + j] = 0.0;
    emb[static_cast<std::size_t>(d.placeholder2) * dim + j] = 0.0;
  }
  d.embeddings = Tensor::from({V, dim}, std::move(emb));
  d.current_v1 = Tensor::zeros({dim});
  d.current_v2 = Tensor::zeros({dim});
  return d;
}

Tensor compose_prompt(const std::vector<int>& tokens, const TokenDict& dict) {
  if (tokens.empty()) throw std::invalid_argument("compose_prompt: empty");
  std::vector<Tensor> rows;
  rows.reserve(tokens.size());
  int V = static_cast<int>(dict.vocab.size());
  for (int id : tokens) {
    if (id < 0 || id >= V)
      throw std::invalid_argument("compose_prompt: unknown token id");
    if (id == dict.placeholder1)
      rows.push_back(dict.current_v1);
    else if (id == dict.placeholder2)
      rows.push_back(dict.current_v2);
    else
      rows.push_back(row(dict.embeddings, static_cast<std::size_t>(id)));
  }
  return stack_rows(rows);
}

std::uint64_t ContextMixer::checksum() const {
  return fnv1a_doubles(pos_weights.values());
}

ContextMixer make_mixer(int max_len, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(max_len));
  for (auto& x : w) x = 0.5 + 0.5 * rng.uniform();
  ContextMixer m;
  std::size_t n = w.size();
  m.pos_weights = Tensor::from({n}, std::move(w));
  return m;
}

Tensor context_condition(const Tensor& g, const ContextMixer& mixer) {
  if (g.shape().size() != 2 || g.shape()[0] == 0)
    throw std::invalid_argument("context_condition: g must be non-empty l x d");
  std::size_t l = g.shape()[0];
  if (l > mixer.pos_weights.size())
    throw std::invalid_argument("context_condition: prompt too long");
  Tensor cond;
  for (std::size_t i = 0; i < l; ++i) {
    Tensor term = mul(row(g, i), elem(mixer.pos_weights, i));
    cond = i == 0 ? term : add(cond, term);
  }
  return cond;
}

}  // namespace sidl
