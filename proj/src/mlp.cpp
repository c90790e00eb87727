#include "sidl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sidl/checksum.hpp"

namespace sidl {

Mlp Mlp::create(const std::vector<std::size_t>& dims, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need >= 2 dims");
  Mlp m;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::size_t in = dims[l], out = dims[l + 1];
    double s = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(in * out);
    for (auto& x : w) x = s * rng.uniform(-1.0, 1.0);
    m.weights.push_back(Tensor::from({in, out}, std::move(w), true));
    m.biases.push_back(Tensor::zeros({out}, true));
  }
  return m;
}

Tensor Mlp::forward(const Tensor& x) const {
  if (x.shape().size() != 2 || x.shape()[1] != in_dim())
    throw std::invalid_argument("Mlp::forward: input shape mismatch");
  Tensor h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = add(matmul(h, weights[l]), biases[l]);
    if (l + 1 < weights.size()) h = tanh_t(h);
  }
  return h;
}

void Mlp::set_trainable(bool trainable) {
  for (auto& w : weights) w.set_requires_grad(trainable);
  for (auto& b : biases) b.set_requires_grad(trainable);
}

std::vector<Tensor> Mlp::params() const {
  std::vector<Tensor> p;
  for (const auto& w : weights) p.push_back(w);
  for (const auto& b : biases) p.push_back(b);
  return p;
}

std::uint64_t Mlp::checksum() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& w : weights) h = fnv1a_doubles(w.values(), h);
  for (const auto& b : biases) h = fnv1a_doubles(b.values(), h);
  return h;
}

Tensor cross_entropy(const Tensor& logits,
                     const std::vector<std::size_t>& labels) {
  if (logits.shape().size() != 2)
    throw std::invalid_argument("cross_entropy: logits must be 2-D");
  std::size_t rows = logits.shape()[0], cols = logits.shape()[1];
  if (labels.size() != rows)
    throw std::invalid_argument("cross_entropy: label count mismatch");
  std::vector<double> rowmax(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double mx = logits.values()[i * cols];
    for (std::size_t j = 1; j < cols; ++j)
      mx = std::max(mx, logits.values()[i * cols + j]);
    rowmax[i] = mx;
  }
  Tensor shifted = sub_rowconst(logits, rowmax);
  Tensor lse = log_t(sum_axis(exp_t(shifted), 1));  // length rows
  Tensor picked = gather_rows(shifted, labels);
  return scale(sum_all(sub(lse, picked)), 1.0 / static_cast<double>(rows));
}

std::vector<double> softmax_row(const std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (auto& x : out) x /= z;
  return out;
}

void SgdOptimizer::step(std::vector<Tensor>& params) {
  for (auto& p : params) {
    const auto& g = p.grad();
    auto& v = p.values_mut();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
  }
}

void AdamOptimizer::step(std::vector<Tensor>& params) {
  if (m.empty()) {
    for (const auto& p : params) {
      m.emplace_back(p.size(), 0.0);
      v.emplace_back(p.size(), 0.0);
    }
  }
  ++t;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& g = params[k].grad();
    auto& val = params[k].values_mut();
    for (std::size_t i = 0; i < val.size(); ++i) {
      m[k][i] = beta1 * m[k][i] + (1.0 - beta1) * g[i];
      v[k][i] = beta2 * v[k][i] + (1.0 - beta2) * g[i] * g[i];
      val[i] -= lr * (m[k][i] / bc1) / (std::sqrt(v[k][i] / bc2) + eps);
    }
  }
}

void zero_grads(std::vector<Tensor>& params) {
  for (auto& p : params) p.zero_grad();
}

}  // namespace sidl
