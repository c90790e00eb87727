#include "sidl/customizer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace sidl {

const char* branch_name(LossBranch b) {
  return b == LossBranch::Noise ? "noise" : "reconstruction";
}

IdentityHead make_identity_head(std::size_t latent_size,
                                std::size_t feature_dim, std::size_t embed_dim,
                                Rng& rng) {
  IdentityHead h;
  h.feature_dim = feature_dim;
  h.embed_dim = embed_dim;
  h.extractor = Mlp::create({latent_size, 128, feature_dim}, rng);
  h.extractor.set_trainable(false);
  h.projector = Mlp::create({feature_dim, 64, 64, 2 * embed_dim}, rng);
  return h;
}

Tensor encode_identity(const Tensor& image, const IdentityHead& head) {
  if (image.size() != head.extractor.in_dim())
    throw std::invalid_argument("encode_identity: image size mismatch");
  Tensor x = reshape(image, {1, image.size()});
  return reshape(head.extractor.forward(x), {head.feature_dim});
}

std::pair<Tensor, Tensor> project_and_land(
    const Tensor& I, const IdentityHead& head,
    const std::vector<PriorSpace>& priors, bool use_adain) {
  Tensor out = head.projector.forward(reshape(I, {1, I.size()}));
  Tensor flat = reshape(out, {2 * head.embed_dim});
  Tensor v1 = slice1d(flat, 0, head.embed_dim);
  Tensor v2 = slice1d(flat, head.embed_dim, head.embed_dim);
  if (!use_adain) return {v1, v2};
  if (priors.empty())
    throw std::invalid_argument("project_and_land: no prior supplied");
  const PriorSpace& p1 = priors[0];
  const PriorSpace& p2 = priors.size() > 1 ? priors[1] : priors[0];
  return {adain_land(v1, p1), adain_land(v2, p2)};
}

LossBranch select_loss_branch(int t, double alpha, int T) {
  return static_cast<double>(t) >= alpha * static_cast<double>(T)
             ? LossBranch::Noise
             : LossBranch::Reconstruction;
}

namespace {

Tensor mask_tensor(const std::vector<std::uint8_t>& m) {
  std::vector<double> d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = m[i] ? 1.0 : 0.0;
  return Tensor::from({m.size()}, std::move(d));
}

double mask_count(const std::vector<std::uint8_t>& m) {
  double c = 0.0;
  for (auto v : m) c += v ? 1.0 : 0.0;
  return c;
}

}  // namespace

Tensor masked_two_phase_loss(const ToySample& sample, const Tensor& g, int t,
                             const Tensor& eps, const Denoiser& model,
                             const ContextMixer& mixer, const Schedule& s,
                             const TrainConfig& cfg) {
  std::size_t L = model.latent_size;
  Tensor z0 = reshape(sample.z0, {L});
  Tensor eps_flat = reshape(eps, {L});
  if (eps_flat.size() != L)
    throw std::invalid_argument("masked_two_phase_loss: eps shape mismatch");

  Tensor z_t = forward_noise(z0, t, eps_flat, s);
  Tensor cond = context_condition(g, mixer);
  // The backbone is frozen; its input carries no gradient so the loss map
  // stays elementwise-local in the latent.
  Tensor eps_hat = model.denoise(z_t.detach(), t, cond, s);

  LossBranch branch;
  switch (cfg.loss_mode) {
    case LossMode::NoiseOnly:
      branch = LossBranch::Noise;
      break;
    case LossMode::RecOnly:
      branch = LossBranch::Reconstruction;
      break;
    default:
      branch = select_loss_branch(t, cfg.alpha, s.T);
  }

  Tensor map;
  if (branch == LossBranch::Noise) {
    Tensor d = sub(eps_flat, eps_hat);
    map = mul(d, d);
  } else {
    Tensor z0_hat = predict_z0(z_t, eps_hat, t, s);
    Tensor d = sub(z0_hat, z0);
    map = mul(d, d);
  }

  if (!cfg.use_mask) return mean_all(map);

  Tensor mf = mask_tensor(sample.mask_face);
  Tensor mh = mask_tensor(sample.mask_hair);
  if (cfg.mask_normalized) {
    double nf = mask_count(sample.mask_face);
    double nh = mask_count(sample.mask_hair);
    Tensor face = nf > 0 ? scale(sum_all(mul(mf, map)), 1.0 / nf)
                         : Tensor::scalar(0.0);
    Tensor hair = nh > 0 ? scale(sum_all(mul(mh, map)), cfg.beta_hair / nh)
                         : Tensor::scalar(0.0);
    return add(face, hair);
  }
  return add(mean_all(mul(mf, map)), scale(mean_all(mul(mh, map)), cfg.beta_hair));
}

AugmentResult augment_apply(const Tensor& image,
                            const std::vector<std::uint8_t>& mask_face,
                            const std::vector<std::uint8_t>& mask_hair,
                            const AugmentParams& p) {
  if (image.shape().size() != 3)
    throw std::invalid_argument("augment: image must be C x H x W");
  int H = static_cast<int>(image.shape()[1]);
  int W = static_cast<int>(image.shape()[2]);
  std::size_t L = static_cast<std::size_t>(H) * W;

  std::vector<double> img(L);
  for (std::size_t i = 0; i < L; ++i)
    img[i] = std::clamp(image.values()[i] * p.value_scale + p.value_offset,
                        -1.0, 1.0);

  auto shifted = [&](const std::vector<double>& src, double fill) {
    std::vector<double> out(L, fill);
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        int sx = x - p.dx, sy = y - p.dy;
        if (sx >= 0 && sx < W && sy >= 0 && sy < H)
          out[static_cast<std::size_t>(y) * W + x] =
              src[static_cast<std::size_t>(sy) * W + sx];
      }
    return out;
  };

  std::vector<double> mf(L), mh(L);
  for (std::size_t i = 0; i < L; ++i) {
    mf[i] = mask_face[i] ? 1.0 : 0.0;
    mh[i] = mask_hair[i] ? 1.0 : 0.0;
  }
  img = shifted(img, 0.0);
  mf = shifted(mf, 0.0);
  mh = shifted(mh, 0.0);

  int cw = W - p.crop, ch = H - p.crop;
  if (cw < 1 || ch < 1 || p.ox + cw > W || p.oy + ch > H)
    throw std::invalid_argument("augment: crop out of bounds");
  auto resized = [&](const std::vector<double>& src) {
    std::vector<double> out(L);
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        int sx = p.ox + x * cw / W;
        int sy = p.oy + y * ch / H;
        out[static_cast<std::size_t>(y) * W + x] =
            src[static_cast<std::size_t>(sy) * W + sx];
      }
    return out;
  };
  img = resized(img);
  mf = resized(mf);
  mh = resized(mh);

  AugmentResult r;
  r.image = Tensor::from(image.shape(), std::move(img));
  r.mask_face.resize(L);
  r.mask_hair.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    r.mask_face[i] = mf[i] > 0.5 ? 1 : 0;
    // Keep the regions disjoint if resampling ever overlaps them.
    r.mask_hair[i] = (mh[i] > 0.5 && !r.mask_face[i]) ? 1 : 0;
  }
  return r;
}

AugmentResult augment(const Tensor& image,
                      const std::vector<std::uint8_t>& mask_face,
                      const std::vector<std::uint8_t>& mask_hair, Rng& rng) {
  AugmentParams p;
  p.value_scale = 1.0 + rng.uniform(-0.1, 0.1);
  p.value_offset = rng.uniform(-0.1, 0.1);
  p.dx = static_cast<int>(rng.uniform_int(-2, 3));
  p.dy = static_cast<int>(rng.uniform_int(-2, 3));
  p.crop = static_cast<int>(rng.uniform_int(0, 3));
  p.ox = p.crop > 0 ? static_cast<int>(rng.uniform_int(0, p.crop + 1)) : 0;
  p.oy = p.crop > 0 ? static_cast<int>(rng.uniform_int(0, p.crop + 1)) : 0;
  return augment_apply(image, mask_face, mask_hair, p);
}

CustomizeResult train_customizer(const ToySample& input, const Denoiser& model,
                                 const std::vector<PriorSpace>& priors,
                                 TokenDict& dict, const ContextMixer& mixer,
                                 const Schedule& s, IdentityHead& head,
                                 const TrainConfig& cfg) {
  if (!model.frozen)
    throw std::invalid_argument("train_customizer: backbone must be frozen");
  if (cfg.steps < 1)
    throw std::invalid_argument("train_customizer: steps must be >= 1");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
    throw std::invalid_argument("train_customizer: alpha out of [0,1]");
  if (cfg.beta_hair < 0.0)
    throw std::invalid_argument("train_customizer: beta_hair must be >= 0");

  head.extractor.set_trainable(false);
  head.projector.set_trainable(true);
  std::vector<Tensor> params = head.projector.params();

  std::unique_ptr<SgdOptimizer> sgd;
  std::unique_ptr<AdamOptimizer> adam;
  if (cfg.optimizer == OptimizerKind::Sgd)
    sgd = std::make_unique<SgdOptimizer>(cfg.learning_rate);
  else
    adam = std::make_unique<AdamOptimizer>(cfg.learning_rate);

  Rng rng(cfg.seed);
  std::size_t L = model.latent_size;
  CustomizeResult res;

  for (int step = 0; step < cfg.steps; ++step) {
    Tensor loss;
    int trace_t = 0;
    LossBranch trace_branch = LossBranch::Noise;
    for (int b = 0; b < cfg.batch; ++b) {
      AugmentResult aug =
          augment(input.z0, input.mask_face, input.mask_hair, rng);
      ToySample aug_sample;
      aug_sample.z0 = aug.image;
      aug_sample.identity_id = input.identity_id;
      aug_sample.context_id = input.context_id;
      aug_sample.mask_face = aug.mask_face;
      aug_sample.mask_hair = aug.mask_hair;

      Tensor I = encode_identity(aug.image, head);
      auto [v1, v2] = project_and_land(I, head, priors, cfg.use_adain);
      dict.set_placeholders(v1, v2);

      std::vector<int> tokens = {dict.placeholder1, dict.placeholder2};
      if (cfg.prompt_mode == PromptMode::Context)
        tokens.push_back(dict.context_token(step % dict.num_contexts));
      Tensor g = compose_prompt(tokens, dict);

      int t = static_cast<int>(rng.uniform_int(1, s.T));
      std::vector<double> eps_data(L);
      for (auto& e : eps_data) e = rng.normal();
      Tensor eps = Tensor::from({L}, std::move(eps_data));

      Tensor item =
          masked_two_phase_loss(aug_sample, g, t, eps, model, mixer, s, cfg);
      loss = b == 0 ? item : add(loss, item);
      trace_t = t;
      trace_branch = cfg.loss_mode == LossMode::NoiseOnly
                         ? LossBranch::Noise
                     : cfg.loss_mode == LossMode::RecOnly
                         ? LossBranch::Reconstruction
                         : select_loss_branch(t, cfg.alpha, s.T);
    }
    if (cfg.batch > 1) loss = scale(loss, 1.0 / cfg.batch);

    double lv = loss.value();
    if (!std::isfinite(lv))
      throw std::runtime_error("train_customizer: NaN loss at step " +
                               std::to_string(step));
    backward(loss);
    if (sgd)
      sgd->step(params);
    else
      adam->step(params);
    zero_grads(params);

    res.trace.push_back({step, trace_t, trace_branch, lv});
  }

  Tensor I = encode_identity(input.z0, head);
  auto [v1, v2] = project_and_land(I, head, priors, cfg.use_adain);
  dict.set_placeholders(v1.detach(), v2.detach());
  res.v_star_1 = v1.values();
  res.v_star_2 = v2.values();
  return res;
}

}  // namespace sidl
