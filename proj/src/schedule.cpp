#include "sidl/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sidl {

double Schedule::alpha_bar_at(int t) const {
  if (t == 0) return 1.0;
  if (t < 1 || t > T) throw std::invalid_argument("schedule: t out of range");
  return alpha_bar[static_cast<std::size_t>(t) - 1];
}

Schedule make_schedule(int T, double beta_start, double beta_end) {
  if (T < 2) throw std::invalid_argument("make_schedule: T must be >= 2");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
    throw std::invalid_argument("make_schedule: betas out of range");
  Schedule s;
  s.T = T;
  s.beta.resize(T);
  s.alpha_bar.resize(T);
  double prod = 1.0;
  for (int i = 0; i < T; ++i) {
    s.beta[i] = beta_start + (beta_end - beta_start) *
                                 (T == 1 ? 0.0 : static_cast<double>(i) /
                                                     static_cast<double>(T - 1));
    prod *= 1.0 - s.beta[i];
    s.alpha_bar[i] = prod;
  }
  return s;
}

namespace {
void check_t(int t, const Schedule& s, const char* what) {
  if (!s.valid_t(t))
    throw std::invalid_argument(std::string(what) + ": t out of range");
}
}  // namespace

Tensor forward_noise(const Tensor& z0, int t, const Tensor& eps,
                     const Schedule& s) {
  check_t(t, s, "forward_noise");
  if (z0.shape() != eps.shape())
    throw std::invalid_argument("forward_noise: eps shape mismatch");
  double ab = s.alpha_bar_at(t);
  return add(scale(z0, std::sqrt(ab)), scale(eps, std::sqrt(1.0 - ab)));
}

Tensor predict_z0(const Tensor& z_t, const Tensor& eps_hat, int t,
                  const Schedule& s) {
  check_t(t, s, "predict_z0");
  if (z_t.shape() != eps_hat.shape())
    throw std::invalid_argument("predict_z0: shape mismatch");
  double ab = s.alpha_bar_at(t);
  return scale(sub(z_t, scale(eps_hat, std::sqrt(1.0 - ab))),
               1.0 / std::sqrt(ab));
}

Tensor ddim_step(const Tensor& z_t, const Tensor& eps_hat, int t, int t_prev,
                 const Schedule& s) {
  check_t(t, s, "ddim_step");
  if (t_prev > t || t_prev < 0)
    throw std::invalid_argument("ddim_step: timesteps must be non-increasing");
  if (t_prev == t) return z_t;
  Tensor z0_hat = predict_z0(z_t, eps_hat, t, s);
  double ab_prev = s.alpha_bar_at(t_prev);
  return add(scale(z0_hat, std::sqrt(ab_prev)),
             scale(eps_hat, std::sqrt(1.0 - ab_prev)));
}

Tensor cfg_combine(const Tensor& eps_uncond, const Tensor& eps_cond,
                   double scale_) {
  if (eps_uncond.shape() != eps_cond.shape())
    throw std::invalid_argument("cfg_combine: shape mismatch");
  if (scale_ < 1.0)
    throw std::invalid_argument("cfg_combine: scale must be >= 1");
  return add(eps_uncond, scale(sub(eps_cond, eps_uncond), scale_));
}

std::vector<int> ddim_timesteps(const Schedule& s, int steps) {
  if (steps < 1) throw std::invalid_argument("ddim_timesteps: steps >= 1");
  std::vector<int> ts;
  ts.reserve(static_cast<std::size_t>(steps) + 1);
  int hi = s.T - 1;
  for (int k = 0; k < steps; ++k) {
    double frac = steps == 1 ? 0.0
                             : static_cast<double>(k) /
                                   static_cast<double>(steps - 1);
    int t = static_cast<int>(std::lround(hi - frac * (hi - 1)));
    if (!ts.empty() && t >= ts.back()) t = ts.back() - 1;
    if (t < 1) break;
    ts.push_back(t);
  }
  ts.push_back(0);
  return ts;
}

}  // namespace sidl
