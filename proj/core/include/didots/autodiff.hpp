#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "didots/matrix.hpp"

namespace didots {

// Named trainable tensor with persistent gradient and Adam state.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool trainable = true;
  Matrix adam_m;
  Matrix adam_v;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)) {
    grad = Matrix::zeros(value.rows, value.cols);
  }
  void zero_grad() { grad = Matrix::zeros(value.rows, value.cols); }
};

namespace ad {

// Reverse-mode tape over Matrix values. Each op allocates a node holding the
// forward value and a closure that pulls the node's gradient into its
// parents. backward(root) runs one depth-first topological sweep; gradients
// of nodes bound to a Parameter accumulate into Parameter::grad.
struct Node {
  Matrix value;
  Matrix grad;
  bool needs_grad = false;
  Parameter* bound = nullptr;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> pull;

  void ensure_grad() {
    if (grad.rows != value.rows || grad.cols != value.cols) {
      grad = Matrix::zeros(value.rows, value.cols);
    }
  }
};

using Var = std::shared_ptr<Node>;

Var constant(Matrix value);
Var leaf(Parameter& p);

Var matmul(const Var& a, const Var& b);
Var matmul_nt(const Var& a, const Var& b);  // a * b^T
Var add(const Var& a, const Var& b);
Var add_scaled(const Var& a, const Var& b, double s);  // a + s*b
Var scale(const Var& a, double s);
Var add_rowvec(const Var& a, const Var& v);   // broadcast 1 x k over rows
Var mul_rowvec(const Var& a, const Var& v);   // elementwise scale by 1 x k
Var tanh_op(const Var& a);
Var softmax_rows(const Var& a);
Var layer_norm(const Var& a, const Var& gain, const Var& bias, double eps = 1e-5);
Var gather_rows(const Var& table, const std::vector<int>& ids);

// Mean token-level cross-entropy of `targets` under row-wise softmax of
// `logits`; rows whose target equals ignore_index do not contribute.
// Returns a 1x1 node.
Var cross_entropy(const Var& logits, const std::vector<int>& targets, int ignore_index);

void backward(const Var& root);

}  // namespace ad

// One Adam update over `params` using accumulated gradients; `step` counts
// from 1 for bias correction. Gradients are left untouched (callers zero
// them per batch).
void adam_step(std::vector<Parameter*>& params, double lr, std::size_t step,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
               double clip_norm = 0.0);

}  // namespace didots
