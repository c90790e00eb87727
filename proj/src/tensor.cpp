#include "sidl/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace sidl {

namespace {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (auto e : s) {
    if (e == 0) throw std::invalid_argument("tensor: zero extent");
    n *= e;
  }
  return n;
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x))
      throw std::runtime_error(std::string("tensor: non-finite value in ") +
                               what);
  }
}

NodePtr make_node(Shape shape, std::vector<double> value,
                  std::vector<NodePtr> parents, const char* what) {
  check_finite(value, what);
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->parents = std::move(parents);
  for (const auto& p : n->parents)
    if (p->requires_grad) n->requires_grad = true;
  return n;
}

// Broadcast classification for elementwise binary ops.
enum class Bcast { Same, AScalar, BScalar, BRow };

Bcast classify(const Node& a, const Node& b, const char* what) {
  if (a.shape == b.shape) return Bcast::Same;
  if (b.size() == 1) return Bcast::BScalar;
  if (a.size() == 1) return Bcast::AScalar;
  if (a.shape.size() == 2 && b.shape.size() == 1 && b.shape[0] == a.shape[1])
    return Bcast::BRow;
  throw std::invalid_argument(std::string("tensor: shape mismatch in ") + what);
}

double bval(const Node& b, Bcast m, std::size_t i, std::size_t cols) {
  switch (m) {
    case Bcast::Same:
      return b.value[i];
    case Bcast::BScalar:
      return b.value[0];
    case Bcast::BRow:
      return b.value[i % cols];
    default:
      return 0.0;  // unreachable for b
  }
}

void push_a(Node& self, Node& a, Bcast m, std::size_t i, double g) {
  if (m == Bcast::AScalar)
    a.grad[0] += g;
  else
    a.grad[i] += g;
  (void)self;
}

void push_b(Node& b, Bcast m, std::size_t i, std::size_t cols, double g) {
  switch (m) {
    case Bcast::Same:
      b.grad[i] += g;
      break;
    case Bcast::BScalar:
      b.grad[0] += g;
      break;
    case Bcast::BRow:
      b.grad[i % cols] += g;
      break;
    default:
      break;
  }
}

}  // namespace

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != data.size())
    throw std::invalid_argument("tensor: shape/data size mismatch");
  check_finite(data, "leaf");
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  Tensor t;
  t.n_ = std::move(n);
  return t;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> d(shape_numel(shape), 0.0);
  return from(std::move(shape), std::move(d), requires_grad);
}

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
  std::vector<double> d(shape_numel(shape), v);
  return from(std::move(shape), std::move(d), requires_grad);
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

double Tensor::value() const {
  if (size() != 1) throw std::invalid_argument("tensor: value() on non-scalar");
  return n_->value[0];
}

const std::vector<double>& Tensor::grad() const {
  n_->ensure_grad();
  return n_->grad;
}

void Tensor::zero_grad() { n_->grad.assign(n_->value.size(), 0.0); }

void Tensor::set_requires_grad(bool rg) {
  if (!n_->parents.empty())
    throw std::invalid_argument("tensor: set_requires_grad on non-leaf");
  n_->requires_grad = rg;
}

Tensor Tensor::detach() const {
  auto n = std::make_shared<Node>();
  n->shape = n_->shape;
  n->value = n_->value;
  n->requires_grad = false;
  return wrap(std::move(n));
}

namespace {

template <typename FwdFn, typename BwdFn>
Tensor binary_op(const Tensor& a, const Tensor& b, const char* what, FwdFn fwd,
                 BwdFn bwd) {
  const Node& an = *a.impl();
  const Node& bn = *b.impl();
  Bcast m = classify(an, bn, what);
  const Node& big = (m == Bcast::AScalar) ? bn : an;
  std::size_t cols =
      big.shape.size() == 2 ? big.shape[1] : big.size();
  std::vector<double> out(big.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double av = (m == Bcast::AScalar) ? an.value[0] : an.value[i];
    double bv2 = (m == Bcast::AScalar) ? bn.value[i] : bval(bn, m, i, cols);
    out[i] = fwd(av, bv2);
  }
  auto n = make_node(big.shape, std::move(out), {a.impl(), b.impl()}, what);
  if (n->requires_grad) {
    n->backprop = [m, cols, bwd](Node& self) {
      Node& pa = *self.parents[0];
      Node& pb = *self.parents[1];
      bool ga = pa.requires_grad, gb = pb.requires_grad;
      if (ga) pa.ensure_grad();
      if (gb) pb.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i) {
        double av = (m == Bcast::AScalar) ? pa.value[0] : pa.value[i];
        double bv2 =
            (m == Bcast::AScalar) ? pb.value[i] : bval(pb, m, i, cols);
        double da = 0.0, db = 0.0;
        bwd(av, bv2, self.grad[i], da, db);
        if (ga) {
          if (m == Bcast::AScalar)
            pa.grad[0] += da;
          else
            pa.grad[i] += da;
        }
        if (gb) {
          if (m == Bcast::AScalar)
            pb.grad[i] += db;
          else
            push_b(pb, m, i, cols, db);
        }
      }
    };
  }
  return Tensor::wrap(std::move(n));
}

template <typename FwdFn, typename BwdFn>
Tensor unary_op(const Tensor& t, const char* what, FwdFn fwd, BwdFn bwd) {
  const Node& tn = *t.impl();
  std::vector<double> out(tn.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(tn.value[i]);
  auto n = make_node(tn.shape, std::move(out), {t.impl()}, what);
  if (n->requires_grad) {
    n->backprop = [bwd](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        p.grad[i] += bwd(p.value[i], self.value[i]) * self.grad[i];
    };
  }
  return Tensor::wrap(std::move(n));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double, double g, double& da, double& db) {
        da = g;
        db = g;
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double, double g, double& da, double& db) {
        da = g;
        db = -g;
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double x, double y, double g, double& da, double& db) {
        da = g * y;
        db = g * x;
      });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double x, double y, double g, double& da, double& db) {
        da = g / y;
        db = -g * x / (y * y);
      });
}

Tensor scale(const Tensor& t, double c) {
  return unary_op(
      t, "scale", [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Tensor shift(const Tensor& t, double c) {
  return unary_op(
      t, "shift", [c](double x) { return x + c; },
      [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& t) { return scale(t, -1.0); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Node& an = *a.impl();
  const Node& bn = *b.impl();
  if (an.shape.size() != 2 || bn.shape.size() != 2)
    throw std::invalid_argument("matmul: operands must be 2-D");
  std::size_t m = an.shape[0], k = an.shape[1], k2 = bn.shape[0],
              n2 = bn.shape[1];
  if (k != k2) throw std::invalid_argument("matmul: inner extents disagree");
  std::vector<double> out(m * n2, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = an.value.data() + i * k;
    double* orow = out.data() + i * n2;
    for (std::size_t p = 0; p < k; ++p) {
      double av = arow[p];
      const double* brow = bn.value.data() + p * n2;
      for (std::size_t j = 0; j < n2; ++j) orow[j] += av * brow[j];
    }
  }
  auto node =
      make_node({m, n2}, std::move(out), {a.impl(), b.impl()}, "matmul");
  if (node->requires_grad) {
    node->backprop = [m, k, n2](Node& self) {
      Node& pa = *self.parents[0];
      Node& pb = *self.parents[1];
      if (pa.requires_grad) {
        pa.ensure_grad();
        // dA = dC * B^T
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = self.grad.data() + i * n2;
          double* arow = pa.grad.data() + i * k;
          for (std::size_t p = 0; p < k; ++p) {
            const double* brow = pb.value.data() + p * n2;
            double acc = 0.0;
            for (std::size_t j = 0; j < n2; ++j) acc += grow[j] * brow[j];
            arow[p] += acc;
          }
        }
      }
      if (pb.requires_grad) {
        pb.ensure_grad();
        // dB = A^T * dC
        for (std::size_t i = 0; i < m; ++i) {
          const double* arow = pa.value.data() + i * k;
          const double* grow = self.grad.data() + i * n2;
          for (std::size_t p = 0; p < k; ++p) {
            double av = arow[p];
            double* brow = pb.grad.data() + p * n2;
            for (std::size_t j = 0; j < n2; ++j) brow[j] += av * grow[j];
          }
        }
      }
    };
  }
  return Tensor::wrap(std::move(node));
}

Tensor tanh_t(const Tensor& t) {
  return unary_op(
      t, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor exp_t(const Tensor& t) {
  return unary_op(
      t, "exp", [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor log_t(const Tensor& t) {
  return unary_op(
      t, "log", [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor sqrt_t(const Tensor& t) {
  const Node& tn = *t.impl();
  std::vector<double> out(tn.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (tn.value[i] < 0.0)
      throw std::invalid_argument("sqrt: negative input");
    out[i] = std::sqrt(tn.value[i]);
  }
  auto n = make_node(tn.shape, std::move(out), {t.impl()}, "sqrt");
  if (n->requires_grad) {
    n->backprop = [](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i) {
        if (self.grad[i] == 0.0) continue;
        if (self.value[i] == 0.0)
          throw std::runtime_error("sqrt: gradient at zero");
        p.grad[i] += 0.5 / self.value[i] * self.grad[i];
      }
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor sum_all(const Tensor& t) {
  const Node& tn = *t.impl();
  double s = 0.0;
  for (double x : tn.value) s += x;
  auto n = make_node({1}, {s}, {t.impl()}, "sum");
  if (n->requires_grad) {
    n->backprop = [](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < p.grad.size(); ++i)
        p.grad[i] += self.grad[0];
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor mean_all(const Tensor& t) {
  return scale(sum_all(t), 1.0 / static_cast<double>(t.size()));
}

Tensor sum_axis(const Tensor& t, int axis) {
  const Node& tn = *t.impl();
  if (tn.shape.size() != 2)
    throw std::invalid_argument("sum_axis: expects 2-D tensor");
  std::size_t rows = tn.shape[0], cols = tn.shape[1];
  if (axis != 0 && axis != 1)
    throw std::invalid_argument("sum_axis: axis must be 0 or 1");
  std::size_t outn = axis == 0 ? cols : rows;
  std::vector<double> out(outn, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out[axis == 0 ? j : i] += tn.value[i * cols + j];
  auto n = make_node({outn}, std::move(out), {t.impl()}, "sum_axis");
  if (n->requires_grad) {
    n->backprop = [rows, cols, axis](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          p.grad[i * cols + j] += self.grad[axis == 0 ? j : i];
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor reshape(const Tensor& t, Shape shape) {
  const Node& tn = *t.impl();
  if (shape_numel(shape) != tn.size())
    throw std::invalid_argument("reshape: element count mismatch");
  auto n = make_node(std::move(shape), tn.value, {t.impl()}, "reshape");
  if (n->requires_grad) {
    n->backprop = [](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        p.grad[i] += self.grad[i];
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty list");
  std::size_t rows = parts[0].shape().size() == 2 ? parts[0].shape()[0] : 0;
  if (rows == 0) throw std::invalid_argument("concat_cols: expects 2-D parts");
  std::size_t total = 0;
  std::vector<NodePtr> parents;
  for (const auto& p : parts) {
    if (p.shape().size() != 2 || p.shape()[0] != rows)
      throw std::invalid_argument("concat_cols: row counts disagree");
    total += p.shape()[1];
    parents.push_back(p.impl());
  }
  std::vector<double> out(rows * total);
  std::size_t off = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    std::size_t w = p.shape()[1];
    widths.push_back(w);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < w; ++j)
        out[i * total + off + j] = p.values()[i * w + j];
    off += w;
  }
  auto n = make_node({rows, total}, std::move(out), std::move(parents),
                     "concat_cols");
  if (n->requires_grad) {
    n->backprop = [rows, total, widths](Node& self) {
      std::size_t off2 = 0;
      for (std::size_t k = 0; k < self.parents.size(); ++k) {
        Node& p = *self.parents[k];
        std::size_t w = widths[k];
        if (p.requires_grad) {
          p.ensure_grad();
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < w; ++j)
              p.grad[i * w + j] += self.grad[i * total + off2 + j];
        }
        off2 += w;
      }
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: empty list");
  std::size_t d = rows[0].size();
  std::vector<double> out;
  std::vector<NodePtr> parents;
  for (const auto& r : rows) {
    if (r.shape().size() != 1 || r.size() != d)
      throw std::invalid_argument("stack_rows: rows must be 1-D, equal length");
    out.insert(out.end(), r.values().begin(), r.values().end());
    parents.push_back(r.impl());
  }
  auto n = make_node({rows.size(), d}, std::move(out), std::move(parents),
                     "stack_rows");
  if (n->requires_grad) {
    n->backprop = [d](Node& self) {
      for (std::size_t k = 0; k < self.parents.size(); ++k) {
        Node& p = *self.parents[k];
        if (!p.requires_grad) continue;
        p.ensure_grad();
        for (std::size_t j = 0; j < d; ++j)
          p.grad[j] += self.grad[k * d + j];
      }
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor row(const Tensor& t, std::size_t i) {
  const Node& tn = *t.impl();
  if (tn.shape.size() != 2) throw std::invalid_argument("row: expects 2-D");
  std::size_t cols = tn.shape[1];
  if (i >= tn.shape[0]) throw std::invalid_argument("row: index out of range");
  std::vector<double> out(tn.value.begin() + i * cols,
                          tn.value.begin() + (i + 1) * cols);
  auto n = make_node({cols}, std::move(out), {t.impl()}, "row");
  if (n->requires_grad) {
    n->backprop = [i, cols](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t j = 0; j < cols; ++j)
        p.grad[i * cols + j] += self.grad[j];
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor slice1d(const Tensor& t, std::size_t start, std::size_t len) {
  const Node& tn = *t.impl();
  if (tn.shape.size() != 1)
    throw std::invalid_argument("slice1d: expects 1-D");
  if (start + len > tn.size() || len == 0)
    throw std::invalid_argument("slice1d: range out of bounds");
  std::vector<double> out(tn.value.begin() + start,
                          tn.value.begin() + start + len);
  auto n = make_node({len}, std::move(out), {t.impl()}, "slice1d");
  if (n->requires_grad) {
    n->backprop = [start, len](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t j = 0; j < len; ++j)
        p.grad[start + j] += self.grad[j];
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor elem(const Tensor& t, std::size_t i) {
  Tensor flat = t.shape().size() == 1 ? t : reshape(t, {t.size()});
  return slice1d(flat, i, 1);
}

Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& idx) {
  const Node& tn = *t.impl();
  if (tn.shape.size() != 2)
    throw std::invalid_argument("gather_rows: expects 2-D");
  std::size_t rows = tn.shape[0], cols = tn.shape[1];
  if (idx.size() != rows)
    throw std::invalid_argument("gather_rows: one index per row required");
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (idx[i] >= cols)
      throw std::invalid_argument("gather_rows: index out of range");
    out[i] = tn.value[i * cols + idx[i]];
  }
  auto n = make_node({rows}, std::move(out), {t.impl()}, "gather_rows");
  if (n->requires_grad) {
    auto ix = idx;
    n->backprop = [ix, cols](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        p.grad[i * cols + ix[i]] += self.grad[i];
    };
  }
  return Tensor::wrap(std::move(n));
}

Tensor sub_rowconst(const Tensor& t, const std::vector<double>& c) {
  const Node& tn = *t.impl();
  if (tn.shape.size() != 2)
    throw std::invalid_argument("sub_rowconst: expects 2-D");
  std::size_t rows = tn.shape[0], cols = tn.shape[1];
  if (c.size() != rows)
    throw std::invalid_argument("sub_rowconst: one constant per row");
  std::vector<double> out(tn.value);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] -= c[i];
  auto n = make_node(tn.shape, std::move(out), {t.impl()}, "sub_rowconst");
  if (n->requires_grad) {
    n->backprop = [](Node& self) {
      Node& p = *self.parents[0];
      p.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i)
        p.grad[i] += self.grad[i];
    };
  }
  return Tensor::wrap(std::move(n));
}

std::pair<Tensor, Tensor> reduce_stats(const Tensor& t, StatsAxis axis) {
  if (t.size() == 0) throw std::invalid_argument("reduce_stats: empty tensor");
  if (axis == StatsAxis::All) {
    double inv = 1.0 / static_cast<double>(t.size());
    Tensor m = scale(sum_all(t), inv);
    Tensor c = sub(t, m);
    Tensor v = scale(sum_all(mul(c, c)), inv);
    return {m, sqrt_t(v)};
  }
  if (t.shape().size() != 2)
    throw std::invalid_argument("reduce_stats: Rows axis expects 2-D");
  double inv = 1.0 / static_cast<double>(t.shape()[0]);
  Tensor m = scale(sum_axis(t, 0), inv);
  Tensor c = sub(t, m);  // row-vector broadcast
  Tensor v = scale(sum_axis(mul(c, c), 0), inv);
  return {m, sqrt_t(v)};
}

void backward(const Tensor& loss) {
  if (loss.size() != 1)
    throw std::invalid_argument("backward: loss must be scalar");
  Node* root = loss.impl().get();
  if (!root->requires_grad) return;

  // Iterative post-order DFS for topological order.
  std::vector<Node*> topo;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      topo.push_back(node);
      stack.pop_back();
    }
  }

  // Interior grads are per-sweep scratch; only leaves accumulate across calls.
  for (Node* node : topo)
    if (!node->parents.empty()) node->grad.assign(node->value.size(), 0.0);

  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Node* node = *it;
    if (node->backprop) {
      node->ensure_grad();
      node->backprop(*node);
    }
  }
}

}  // namespace sidl
