#include "didots/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace didots {
namespace ad {

namespace {

Var make_node(Matrix value, std::vector<Var> parents, std::function<void(Node&)> pull) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->parents = std::move(parents);
  node->pull = std::move(pull);
  for (const auto& p : node->parents) {
    if (p->needs_grad) {
      node->needs_grad = true;
      break;
    }
  }
  if (!node->needs_grad) node->pull = nullptr;
  return node;
}

}  // namespace

Var constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return node;
}

Var leaf(Parameter& p) {
  auto node = std::make_shared<Node>();
  node->value = p.value;
  node->needs_grad = p.trainable;
  node->bound = p.trainable ? &p : nullptr;
  return node;
}

Var matmul(const Var& a, const Var& b) {
  return make_node(didots::matmul(a->value, b->value), {a, b}, [a, b](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      add_in_place(a->grad, didots::matmul_nt(n.grad, b->value));
    }
    if (b->needs_grad) {
      b->ensure_grad();
      add_in_place(b->grad, didots::matmul_tn(a->value, n.grad));
    }
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  return make_node(didots::matmul_nt(a->value, b->value), {a, b}, [a, b](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      add_in_place(a->grad, didots::matmul(n.grad, b->value));
    }
    if (b->needs_grad) {
      b->ensure_grad();
      add_in_place(b->grad, didots::matmul_tn(n.grad, a->value));
    }
  });
}

Var add(const Var& a, const Var& b) {
  return make_node(didots::add(a->value, b->value), {a, b}, [a, b](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      add_in_place(a->grad, n.grad);
    }
    if (b->needs_grad) {
      b->ensure_grad();
      add_in_place(b->grad, n.grad);
    }
  });
}

Var add_scaled(const Var& a, const Var& b, double s) {
  Matrix out = a->value;
  add_scaled_in_place(out, b->value, s);
  return make_node(std::move(out), {a, b}, [a, b, s](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      add_in_place(a->grad, n.grad);
    }
    if (b->needs_grad) {
      b->ensure_grad();
      add_scaled_in_place(b->grad, n.grad, s);
    }
  });
}

Var scale(const Var& a, double s) {
  return make_node(didots::scale(a->value, s), {a}, [a, s](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      add_scaled_in_place(a->grad, n.grad, s);
    }
  });
}

Var add_rowvec(const Var& a, const Var& v) {
  Matrix out = a->value;
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) out.at(r, c) += v->value.at(0, c);
  }
  return make_node(std::move(out), {a, v}, [a, v](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      add_in_place(a->grad, n.grad);
    }
    if (v->needs_grad) {
      v->ensure_grad();
      for (int r = 0; r < n.grad.rows; ++r) {
        for (int c = 0; c < n.grad.cols; ++c) v->grad.at(0, c) += n.grad.at(r, c);
      }
    }
  });
}

Var mul_rowvec(const Var& a, const Var& v) {
  Matrix out = a->value;
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) out.at(r, c) *= v->value.at(0, c);
  }
  return make_node(std::move(out), {a, v}, [a, v](Node& n) {
    if (a->needs_grad) {
      a->ensure_grad();
      for (int r = 0; r < n.grad.rows; ++r) {
        for (int c = 0; c < n.grad.cols; ++c) {
          a->grad.at(r, c) += n.grad.at(r, c) * v->value.at(0, c);
        }
      }
    }
    if (v->needs_grad) {
      v->ensure_grad();
      for (int r = 0; r < n.grad.rows; ++r) {
        for (int c = 0; c < n.grad.cols; ++c) {
          v->grad.at(0, c) += n.grad.at(r, c) * a->value.at(r, c);
        }
      }
    }
  });
}

Var tanh_op(const Var& a) {
  Matrix out = a->value;
  for (double& x : out.data) x = std::tanh(x);
  return make_node(std::move(out), {a}, [a](Node& n) {
    if (!a->needs_grad) return;
    a->ensure_grad();
    for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
      double y = n.value.data[i];
      a->grad.data[i] += n.grad.data[i] * (1.0 - y * y);
    }
  });
}

Var softmax_rows(const Var& a) {
  Matrix out = a->value;
  for (int r = 0; r < out.rows; ++r) {
    double mx = -1e300;
    for (int c = 0; c < out.cols; ++c) mx = std::max(mx, out.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < out.cols; ++c) {
      double e = std::exp(out.at(r, c) - mx);
      out.at(r, c) = e;
      sum += e;
    }
    for (int c = 0; c < out.cols; ++c) out.at(r, c) /= sum;
  }
  return make_node(std::move(out), {a}, [a](Node& n) {
    if (!a->needs_grad) return;
    a->ensure_grad();
    // dx = y * (g - sum_j g_j y_j) per row
    for (int r = 0; r < n.value.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < n.value.cols; ++c) dot += n.grad.at(r, c) * n.value.at(r, c);
      for (int c = 0; c < n.value.cols; ++c) {
        a->grad.at(r, c) += n.value.at(r, c) * (n.grad.at(r, c) - dot);
      }
    }
  });
}

Var layer_norm(const Var& a, const Var& gain, const Var& bias, double eps) {
  int rows = a->value.rows, cols = a->value.cols;
  Matrix xhat(rows, cols);
  Matrix inv_sigma(rows, 1);
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) mean += a->value.at(r, c);
    mean /= cols;
    double var = 0.0;
    for (int c = 0; c < cols; ++c) {
      double d = a->value.at(r, c) - mean;
      var += d * d;
    }
    var /= cols;
    double is = 1.0 / std::sqrt(var + eps);
    inv_sigma.at(r, 0) = is;
    for (int c = 0; c < cols; ++c) {
      double xh = (a->value.at(r, c) - mean) * is;
      xhat.at(r, c) = xh;
      out.at(r, c) = xh * gain->value.at(0, c) + bias->value.at(0, c);
    }
  }
  auto xhat_p = std::make_shared<Matrix>(std::move(xhat));
  auto is_p = std::make_shared<Matrix>(std::move(inv_sigma));
  return make_node(std::move(out), {a, gain, bias},
                   [a, gain, bias, xhat_p, is_p](Node& n) {
    int rows = n.value.rows, cols = n.value.cols;
    if (gain->needs_grad) {
      gain->ensure_grad();
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          gain->grad.at(0, c) += n.grad.at(r, c) * xhat_p->at(r, c);
        }
      }
    }
    if (bias->needs_grad) {
      bias->ensure_grad();
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) bias->grad.at(0, c) += n.grad.at(r, c);
      }
    }
    if (a->needs_grad) {
      a->ensure_grad();
      // dx = (1/sigma) * (dy_hat - mean(dy_hat) - xhat * mean(dy_hat * xhat))
      for (int r = 0; r < rows; ++r) {
        double mean_dyh = 0.0, mean_dyh_xh = 0.0;
        for (int c = 0; c < cols; ++c) {
          double dyh = n.grad.at(r, c) * gain->value.at(0, c);
          mean_dyh += dyh;
          mean_dyh_xh += dyh * xhat_p->at(r, c);
        }
        mean_dyh /= cols;
        mean_dyh_xh /= cols;
        for (int c = 0; c < cols; ++c) {
          double dyh = n.grad.at(r, c) * gain->value.at(0, c);
          a->grad.at(r, c) +=
              is_p->at(r, 0) * (dyh - mean_dyh - xhat_p->at(r, c) * mean_dyh_xh);
        }
      }
    }
  });
}

Var gather_rows(const Var& table, const std::vector<int>& ids) {
  Matrix out(static_cast<int>(ids.size()), table->value.cols);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    for (int c = 0; c < table->value.cols; ++c) {
      out.at(static_cast<int>(r), c) = table->value.at(ids[r], c);
    }
  }
  return make_node(std::move(out), {table}, [table, ids](Node& n) {
    if (!table->needs_grad) return;
    table->ensure_grad();
    for (std::size_t r = 0; r < ids.size(); ++r) {
      for (int c = 0; c < n.grad.cols; ++c) {
        table->grad.at(ids[r], c) += n.grad.at(static_cast<int>(r), c);
      }
    }
  });
}

Var cross_entropy(const Var& logits, const std::vector<int>& targets, int ignore_index) {
  int rows = logits->value.rows, cols = logits->value.cols;
  auto probs = std::make_shared<Matrix>(rows, cols);
  double loss = 0.0;
  int counted = 0;
  for (int r = 0; r < rows; ++r) {
    double mx = -1e300;
    for (int c = 0; c < cols; ++c) mx = std::max(mx, logits->value.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      double e = std::exp(logits->value.at(r, c) - mx);
      probs->at(r, c) = e;
      sum += e;
    }
    for (int c = 0; c < cols; ++c) probs->at(r, c) /= sum;
    int t = targets[static_cast<std::size_t>(r)];
    if (t == ignore_index) continue;
    loss += -(logits->value.at(r, t) - mx - std::log(sum));
    ++counted;
  }
  if (counted > 0) loss /= counted;
  Matrix out(1, 1);
  out.at(0, 0) = loss;
  return make_node(std::move(out), {logits},
                   [logits, probs, targets, ignore_index, counted](Node& n) {
    if (!logits->needs_grad || counted == 0) return;
    logits->ensure_grad();
    double g = n.grad.at(0, 0) / counted;
    for (int r = 0; r < probs->rows; ++r) {
      int t = targets[static_cast<std::size_t>(r)];
      if (t == ignore_index) continue;
      for (int c = 0; c < probs->cols; ++c) {
        double delta = (c == t) ? 1.0 : 0.0;
        logits->grad.at(r, c) += g * (probs->at(r, c) - delta);
      }
    }
  });
}

void backward(const Var& root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < node->parents.size()) {
      Node* child = node->parents[next_child].get();
      ++next_child;
      if (child->needs_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->ensure_grad();
  for (double& g : root->grad.data) g = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    node->ensure_grad();
    if (node->pull) node->pull(*node);
    if (node->bound) add_in_place(node->bound->grad, node->grad);
  }
}

}  // namespace ad

void adam_step(std::vector<Parameter*>& params, double lr, std::size_t step,
               double beta1, double beta2, double eps, double clip_norm) {
  if (clip_norm > 0.0) {
    double sq = 0.0;
    for (Parameter* p : params) {
      for (double g : p->grad.data) sq += g * g;
    }
    double norm = std::sqrt(sq);
    if (norm > clip_norm) {
      double s = clip_norm / norm;
      for (Parameter* p : params) {
        for (double& g : p->grad.data) g *= s;
      }
    }
  }
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (Parameter* p : params) {
    if (!p->trainable) continue;
    if (p->adam_m.size() != p->value.size()) {
      p->adam_m = Matrix::zeros(p->value.rows, p->value.cols);
      p->adam_v = Matrix::zeros(p->value.rows, p->value.cols);
    }
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      double g = p->grad.data[i];
      p->adam_m.data[i] = beta1 * p->adam_m.data[i] + (1.0 - beta1) * g;
      p->adam_v.data[i] = beta2 * p->adam_v.data[i] + (1.0 - beta2) * g * g;
      double mhat = p->adam_m.data[i] / bc1;
      double vhat = p->adam_v.data[i] / bc2;
      p->value.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace didots
