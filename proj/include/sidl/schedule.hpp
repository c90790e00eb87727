#pragma once

#include <cstddef>
#include <vector>

#include "sidl/tensor.hpp"

namespace sidl {

// Diffusion noise schedule. Timesteps are 1-based over [1, T); index t
// maps to beta[t-1] / alpha_bar[t-1]. alpha_bar_at(0) == 1 so the final
// DDIM hop can land on the fully denoised estimate.
struct Schedule {
  int T = 1000;
  std::vector<double> beta;       // length T
  std::vector<double> alpha_bar;  // length T, cumulative product of (1-beta)

  double alpha_bar_at(int t) const;
  bool valid_t(int t) const { return t >= 1 && t < T; }
};

Schedule make_schedule(int T, double beta_start, double beta_end);

// z_t = sqrt(abar_t) z0 + sqrt(1-abar_t) eps
Tensor forward_noise(const Tensor& z0, int t, const Tensor& eps,
                     const Schedule& s);

// z0_hat = (z_t - sqrt(1-abar_t) eps_hat) / sqrt(abar_t)
Tensor predict_z0(const Tensor& z_t, const Tensor& eps_hat, int t,
                  const Schedule& s);

// Deterministic DDIM hop (eta = 0): t_prev <= t, t_prev may be 0.
Tensor ddim_step(const Tensor& z_t, const Tensor& eps_hat, int t, int t_prev,
                 const Schedule& s);

// eps_uncond + scale * (eps_cond - eps_uncond)
Tensor cfg_combine(const Tensor& eps_uncond, const Tensor& eps_cond,
                   double scale);

// Evenly spaced descending sampling ladder over [1, T), ending at 0.
std::vector<int> ddim_timesteps(const Schedule& s, int steps);

}  // namespace sidl
