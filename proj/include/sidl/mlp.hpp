#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sidl/rng.hpp"
#include "sidl/tensor.hpp"

namespace sidl {

// Plain feed-forward network: tanh hidden layers, linear output.
struct Mlp {
  std::vector<Tensor> weights;  // layer i: in_i x out_i
  std::vector<Tensor> biases;   // layer i: out_i

  static Mlp create(const std::vector<std::size_t>& dims, Rng& rng);

  Tensor forward(const Tensor& x) const;  // x: B x in
  void set_trainable(bool trainable);
  std::vector<Tensor> params() const;
  std::uint64_t checksum() const;
  std::size_t in_dim() const { return weights.front().shape()[0]; }
  std::size_t out_dim() const { return weights.back().shape()[1]; }
};

// Mean cross-entropy of row-wise logits against integer labels.
Tensor cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels);

// Row-wise softmax on plain values (no tape).
std::vector<double> softmax_row(const std::vector<double>& logits);

struct SgdOptimizer {
  double lr;
  explicit SgdOptimizer(double lr_) : lr(lr_) {}
  void step(std::vector<Tensor>& params);
};

struct AdamOptimizer {
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<std::vector<double>> m, v;
  std::int64_t t = 0;
  explicit AdamOptimizer(double lr_) : lr(lr_) {}
  void step(std::vector<Tensor>& params);
};

void zero_grads(std::vector<Tensor>& params);

}  // namespace sidl
