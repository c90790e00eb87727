#include "sidl/denoiser.hpp"

#include <cmath>
#include <stdexcept>

namespace sidl {

std::vector<double> timestep_features(int t, std::size_t dim) {
  std::vector<double> f(dim);
  std::size_t half = dim / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) /
                                        static_cast<double>(dim));
    f[2 * i] = std::sin(t * freq);
    f[2 * i + 1] = std::cos(t * freq);
  }
  return f;
}

Tensor Denoiser::denoise_batch(const Tensor& z_t, const std::vector<int>& t,
                               const Tensor& cond, const Schedule& s) const {
  if (z_t.shape().size() != 2 || z_t.shape()[1] != latent_size)
    throw std::invalid_argument("denoise: latent shape mismatch");
  std::size_t B = z_t.shape()[0];
  if (t.size() != B)
    throw std::invalid_argument("denoise: one timestep per row required");
  if (cond.shape().size() != 2 || cond.shape()[0] != B ||
      cond.shape()[1] != cond_dim)
    throw std::invalid_argument("denoise: cond shape mismatch");
  for (int ti : t)
    if (!s.valid_t(ti))
      throw std::invalid_argument("denoise: t out of range");

  std::vector<double> tf(B * time_dim);
  for (std::size_t i = 0; i < B; ++i) {
    auto f = timestep_features(t[i], time_dim);
    std::copy(f.begin(), f.end(), tf.begin() + i * time_dim);
  }
  Tensor tfe = Tensor::from({B, time_dim}, std::move(tf));
  Tensor x = concat_cols({z_t, tfe, cond});
  return net.forward(x);
}

Tensor Denoiser::denoise(const Tensor& z_t, int t, const Tensor& cond,
                         const Schedule& s) const {
  if (z_t.size() != latent_size)
    throw std::invalid_argument("denoise: latent size mismatch");
  Tensor z2 = reshape(z_t, {1, latent_size});
  Tensor c2 = cond.shape().size() == 2 ? cond : reshape(cond, {1, cond_dim});
  Tensor out = denoise_batch(z2, {t}, c2, s);
  return reshape(out, z_t.shape());
}

Denoiser make_denoiser(std::size_t latent_size, std::size_t cond_dim,
                       std::size_t hidden, int hidden_layers, Rng& rng) {
  Denoiser d;
  d.latent_size = latent_size;
  d.cond_dim = cond_dim;
  std::vector<std::size_t> dims;
  dims.push_back(latent_size + d.time_dim + cond_dim);
  for (int i = 0; i < hidden_layers; ++i) dims.push_back(hidden);
  dims.push_back(latent_size);
  d.net = Mlp::create(dims, rng);
  return d;
}

Tensor identity_condition(const TokenDict& dict, const ContextMixer& mixer,
                          int identity_id, int context_id) {
  std::vector<int> tokens = {dict.id_token_first(identity_id),
                             dict.id_token_last(identity_id),
                             dict.context_token(context_id)};
  return context_condition(compose_prompt(tokens, dict), mixer);
}

PretrainResult pretrain_denoiser(Denoiser& model, TokenDict& dict,
                                 ContextMixer& mixer, const WorldConfig& world,
                                 const Schedule& s, const PretrainConfig& cfg,
                                 Rng& rng) {
  if (cfg.steps < 1)
    throw std::invalid_argument("pretrain_denoiser: steps must be >= 1");

  model.frozen = false;
  model.net.set_trainable(true);
  dict.embeddings.set_requires_grad(true);
  mixer.pos_weights.set_requires_grad(true);

  std::vector<Tensor> params = model.net.params();
  params.push_back(dict.embeddings);
  params.push_back(mixer.pos_weights);
  AdamOptimizer opt(cfg.lr);

  std::size_t L = model.latent_size;
  std::size_t B = static_cast<std::size_t>(cfg.batch);

  // Fixed held-out batch for the before/after quality gate.
  Rng held_rng(mix_seed(world.world_seed, 0x48454c44));
  struct HeldCase {
    std::vector<double> z0;
    int id, ctx, t;
    std::vector<double> eps;
  };
  std::vector<HeldCase> held;
  for (int i = 0; i < 64; ++i) {
    HeldCase h;
    h.id = static_cast<int>(held_rng.uniform_int(0, world.train_identities));
    h.ctx = static_cast<int>(held_rng.uniform_int(0, world.num_contexts));
    ToySample smp = gen_sample(world, h.id, h.ctx, held_rng);
    h.z0 = smp.z0.values();
    h.t = static_cast<int>(held_rng.uniform_int(1, s.T));
    h.eps.resize(L);
    for (auto& e : h.eps) e = held_rng.normal();
    held.push_back(std::move(h));
  }

  auto heldout_loss = [&]() {
    double total = 0.0;
    for (const auto& h : held) {
      double ab = s.alpha_bar_at(h.t);
      std::vector<double> zt(L);
      for (std::size_t i = 0; i < L; ++i)
        zt[i] = std::sqrt(ab) * h.z0[i] + std::sqrt(1.0 - ab) * h.eps[i];
      Tensor cond = identity_condition(dict, mixer, h.id, h.ctx);
      Tensor eh = model.denoise(Tensor::from({L}, zt), h.t, cond.detach(), s);
      double l = 0.0;
      for (std::size_t i = 0; i < L; ++i) {
        double dlt = h.eps[i] - eh.values()[i];
        l += dlt * dlt;
      }
      total += l / static_cast<double>(L);
    }
    return total / static_cast<double>(held.size());
  };

  PretrainResult res;
  res.heldout_loss_initial = heldout_loss();

  double start_acc = 0.0, end_acc = 0.0;
  int window = std::min(50, cfg.steps);

  const double pi = 3.14159265358979323846;
  for (int step = 0; step < cfg.steps; ++step) {
    // Cosine decay to 5% of the base rate; a flat rate leaves the loss at
    // a gradient-noise floor well above what the net can reach.
    double frac = static_cast<double>(step) / static_cast<double>(cfg.steps);
    opt.lr = cfg.lr * (0.05 + 0.95 * 0.5 * (1.0 + std::cos(pi * frac)));
    std::vector<double> zt_data(B * L);
    std::vector<double> eps_data(B * L);
    std::vector<int> ts(B);
    std::vector<Tensor> cond_rows;
    cond_rows.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
      int id = static_cast<int>(rng.uniform_int(0, world.train_identities));
      int ctx = static_cast<int>(rng.uniform_int(0, world.num_contexts));
      ToySample smp = gen_sample(world, id, ctx, rng);
      ts[b] = static_cast<int>(rng.uniform_int(1, s.T));
      double ab = s.alpha_bar_at(ts[b]);
      for (std::size_t i = 0; i < L; ++i) {
        double e = rng.normal();
        eps_data[b * L + i] = e;
        zt_data[b * L + i] =
            std::sqrt(ab) * smp.z0.values()[i] + std::sqrt(1.0 - ab) * e;
      }
      if (rng.uniform() < cfg.cond_dropout)
        cond_rows.push_back(Tensor::zeros({model.cond_dim}));
      else
        cond_rows.push_back(identity_condition(dict, mixer, id, ctx));
    }
    Tensor zt = Tensor::from({B, L}, std::move(zt_data));
    Tensor eps = Tensor::from({B, L}, std::move(eps_data));
    Tensor cond = stack_rows(cond_rows);
    Tensor eps_hat = model.denoise_batch(zt, ts, cond, s);
    Tensor diff = sub(eps, eps_hat);
    Tensor loss = mean_all(mul(diff, diff));

    double lv = loss.value();
    if (!std::isfinite(lv))
      throw std::runtime_error("pretrain_denoiser: loss diverged (NaN)");
    if (step < window) start_acc += lv;
    if (step >= cfg.steps - window) end_acc += lv;

    backward(loss);
    opt.step(params);
    zero_grads(params);
  }

  res.loss_start = start_acc / window;
  res.loss_end = end_acc / window;

  model.net.set_trainable(false);
  dict.embeddings.set_requires_grad(false);
  mixer.pos_weights.set_requires_grad(false);
  model.frozen = true;

  res.heldout_loss_final = heldout_loss();
  return res;
}

}  // namespace sidl
