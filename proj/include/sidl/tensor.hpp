#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace sidl {

using Shape = std::vector<std::size_t>;

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, persists across backward calls
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // pushes this node's grad to parents

  std::size_t size() const { return value.size(); }
  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

}  // namespace detail

// Dense row-major 64-bit float tensor recorded on an implicit tape.
// Handles share the underlying node; values are immutable once recorded
// except for leaf parameters mutated between graphs (values_mut).
class Tensor {
 public:
  Tensor() = default;

  static Tensor from(Shape shape, std::vector<double> data,
                     bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double v, bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return n_ != nullptr; }
  const Shape& shape() const { return n_->shape; }
  std::size_t size() const { return n_->value.size(); }
  const std::vector<double>& values() const { return n_->value; }
  std::vector<double>& values_mut() { return n_->value; }
  double value() const;  // scalar tensors only
  bool requires_grad() const { return n_->requires_grad; }
  const std::vector<double>& grad() const;
  void zero_grad();
  void set_requires_grad(bool rg);  // leaves only
  Tensor detach() const;            // constant copy, cuts the tape

  // Internal: node access for op implementations.
  const std::shared_ptr<detail::Node>& impl() const { return n_; }
  static Tensor wrap(std::shared_ptr<detail::Node> n) {
    Tensor t;
    t.n_ = std::move(n);
    return t;
  }

 private:
  std::shared_ptr<detail::Node> n_;
};

// Elementwise binary ops. Shapes must match, or one operand may be a
// scalar (single element), or b may be a length-n vector broadcast over
// the rows of a 2-D m-by-n tensor.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& t, double c);
Tensor shift(const Tensor& t, double c);
Tensor neg(const Tensor& t);

Tensor matmul(const Tensor& a, const Tensor& b);

Tensor tanh_t(const Tensor& t);
Tensor exp_t(const Tensor& t);
Tensor log_t(const Tensor& t);
Tensor sqrt_t(const Tensor& t);

Tensor sum_all(const Tensor& t);
Tensor mean_all(const Tensor& t);
// axis 0: reduce over rows (per-column sums); axis 1: reduce over columns.
Tensor sum_axis(const Tensor& t, int axis);

Tensor reshape(const Tensor& t, Shape shape);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor stack_rows(const std::vector<Tensor>& rows);
Tensor row(const Tensor& t, std::size_t i);          // 2-D -> 1-D
Tensor slice1d(const Tensor& t, std::size_t start, std::size_t len);
Tensor elem(const Tensor& t, std::size_t i);          // -> scalar tensor
Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& idx);
// out[i,j] = t[i,j] - c[i]
Tensor sub_rowconst(const Tensor& t, const std::vector<double>& c);

enum class StatsAxis { All, Rows };  // Rows: statistics per column over rows

// Mean and population std (divide by N). Differentiable composition.
std::pair<Tensor, Tensor> reduce_stats(const Tensor& t, StatsAxis axis);

// Reverse-mode sweep from a scalar loss. Grads accumulate until zero_grad.
void backward(const Tensor& loss);

}  // namespace sidl
