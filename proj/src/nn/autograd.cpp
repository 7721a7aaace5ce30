// Copyright 2026 The QMLC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmlc/nn/autograd.hpp"

#include <cmath>
#include <unordered_set>
#include <utility>

#include "qmlc/common/errors.hpp"

namespace qmlc::nn {

namespace {

thread_local bool g_grad_enabled = true;

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

// Builds a result node; `make_backward` is only invoked when it is needed.
template <typename F>
Var make_node(Matrix value, std::vector<Var> inputs, F make_backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    for (const auto& in : inputs) {
      if (in.requires_grad()) {
        node->requires_grad = true;
        break;
      }
    }
  }
  if (node->requires_grad) {
    for (auto& in : inputs) node->parents.push_back(in.node());
    node->backward = make_backward();
  }
  return Var(std::move(node));
}

void push_grad(const std::shared_ptr<Node>& n, const Matrix& g) {
  if (n->requires_grad) n->accumulate(g);
}

template <typename Fn, typename Dfn>
Var unary(const Var& a, Fn f, Dfn df) {
  Matrix v = a.value().unaryExpr(f);
  return make_node(std::move(v), {a}, [a, df] {
    return [a, df](Node& self) {
      Matrix g = self.grad.cwiseProduct(a.value().unaryExpr(df));
      push_grad(a.node(), g);
    };
  });
}

}  // namespace

void Node::accumulate(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

void Var::zero_grad() {
  if (node_) node_->grad.setZero(node_->value.rows(), node_->value.cols());
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

Var constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var leaf(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  node->grad.setZero(node->value.rows(), node->value.cols());
  return Var(std::move(node));
}

void backward(const Var& root) {
  if (root.rows() != 1 || root.cols() != 1) throw DimensionError("backward needs a scalar root");
  if (!root.requires_grad()) return;
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    if (i < n->parents.size()) {
      Node* p = n->parents[i++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  root.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
  }
  // Free interior gradients so the graph can be reused by a second backward.
  for (Node* n : order) {
    if (n->backward) n->grad.resize(0, 0);
  }
}

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  Matrix v = a.value() * b.value();
  return make_node(std::move(v), {a, b}, [a, b] {
    return [a, b](Node& self) {
      if (a.requires_grad()) push_grad(a.node(), self.grad * b.value().transpose());
      if (b.requires_grad()) push_grad(b.node(), a.value().transpose() * self.grad);
    };
  });
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  Matrix v = a.value() + b.value();
  return make_node(std::move(v), {a, b}, [a, b] {
    return [a, b](Node& self) {
      push_grad(a.node(), self.grad);
      push_grad(b.node(), self.grad);
    };
  });
}

Var add_row(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw DimensionError("add_row: bad row shape");
  Matrix v = a.value().rowwise() + row.value().row(0);
  return make_node(std::move(v), {a, row}, [a, row] {
    return [a, row](Node& self) {
      push_grad(a.node(), self.grad);
      if (row.requires_grad()) push_grad(row.node(), self.grad.colwise().sum());
    };
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  Matrix v = a.value() - b.value();
  return make_node(std::move(v), {a, b}, [a, b] {
    return [a, b](Node& self) {
      push_grad(a.node(), self.grad);
      if (b.requires_grad()) push_grad(b.node(), -self.grad);
    };
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  Matrix v = a.value().cwiseProduct(b.value());
  return make_node(std::move(v), {a, b}, [a, b] {
    return [a, b](Node& self) {
      if (a.requires_grad()) push_grad(a.node(), self.grad.cwiseProduct(b.value()));
      if (b.requires_grad()) push_grad(b.node(), self.grad.cwiseProduct(a.value()));
    };
  });
}

Var scale(const Var& a, double s) {
  Matrix v = a.value() * s;
  return make_node(std::move(v), {a}, [a, s] {
    return [a, s](Node& self) { push_grad(a.node(), self.grad * s); };
  });
}

Var transpose(const Var& a) {
  Matrix v = a.value().transpose();
  return make_node(std::move(v), {a}, [a] {
    return [a](Node& self) { push_grad(a.node(), self.grad.transpose()); };
  });
}

Var gelu(const Var& a) {
  constexpr double c = 0.7978845608028654;  // sqrt(2/pi)
  return unary(
      a,
      [](double x) { return 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x))); },
      [](double x) {
        const double u = c * (x + 0.044715 * x * x * x);
        const double th = std::tanh(u);
        const double du = c * (1.0 + 3.0 * 0.044715 * x * x);
        return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
      });
}

Var silu(const Var& a) {
  return unary(
      a, [](double x) { return x / (1.0 + std::exp(-x)); },
      [](double x) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 + x * (1.0 - s));
      });
}

Var tanh(const Var& a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
      });
}

Var softplus(const Var& a) {
  return unary(
      a, [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
      [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var softmax_rows(const Var& a) {
  Matrix v = a.value();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double m = v.row(r).maxCoeff();
    if (!std::isfinite(m)) {
      v.row(r).setConstant(1.0 / static_cast<double>(v.cols()));
      continue;
    }
    v.row(r) = (v.row(r).array() - m).unaryExpr([](double x) { return std::exp(x); });
    v.row(r) /= v.row(r).sum();
  }
  return make_node(v, {a}, [a, v] {
    return [a, v](Node& self) {
      Matrix g(v.rows(), v.cols());
      for (Eigen::Index r = 0; r < v.rows(); ++r) {
        const double dot = self.grad.row(r).dot(v.row(r));
        g.row(r) = v.row(r).array() * (self.grad.row(r).array() - dot);
      }
      push_grad(a.node(), g);
    };
  });
}

Var log_softmax_rows(const Var& a) {
  Matrix v = a.value();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double m = v.row(r).maxCoeff();
    const double lse = m + std::log((v.row(r).array() - m).exp().sum());
    v.row(r).array() -= lse;
  }
  return make_node(v, {a}, [a, v] {
    return [a, v](Node& self) {
      Matrix g(v.rows(), v.cols());
      for (Eigen::Index r = 0; r < v.rows(); ++r) {
        const double s = self.grad.row(r).sum();
        g.row(r) = self.grad.row(r).array() - v.row(r).array().exp() * s;
      }
      push_grad(a.node(), g);
    };
  });
}

Var layer_norm_rows(const Var& a, const Var& gain, const Var& bias, double eps) {
  const Eigen::Index n = a.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n) {
    throw DimensionError("layer_norm_rows: gain/bias must be 1 x cols");
  }
  Matrix xhat(a.rows(), n);
  Eigen::VectorXd inv(a.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double mu = a.value().row(r).mean();
    const double var = (a.value().row(r).array() - mu).square().mean();
    inv(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (a.value().row(r).array() - mu) * inv(r);
  }
  Matrix v = (xhat.array().rowwise() * gain.value().row(0).array()).rowwise() +
             bias.value().row(0).array();
  return make_node(std::move(v), {a, gain, bias}, [a, gain, bias, xhat, inv] {
    return [a, gain, bias, xhat, inv](Node& self) {
      if (gain.requires_grad()) {
        push_grad(gain.node(), self.grad.cwiseProduct(xhat).colwise().sum());
      }
      if (bias.requires_grad()) push_grad(bias.node(), self.grad.colwise().sum());
      if (a.requires_grad()) {
        const double nn = static_cast<double>(xhat.cols());
        Matrix dxhat = self.grad.array().rowwise() * gain.value().row(0).array();
        Matrix g(xhat.rows(), xhat.cols());
        for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
          const double s1 = dxhat.row(r).sum();
          const double s2 = dxhat.row(r).dot(xhat.row(r));
          g.row(r) = (inv(r) / nn) * (nn * dxhat.row(r).array() - s1 - xhat.row(r).array() * s2);
        }
        push_grad(a.node(), g);
      }
    };
  });
}

Var sum(const Var& a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return make_node(std::move(v), {a}, [a] {
    return [a](Node& self) {
      push_grad(a.node(), Matrix::Constant(a.rows(), a.cols(), self.grad(0, 0)));
    };
  });
}

Var mean(const Var& a) {
  const double n = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / n);
}

Var sum_squares(const Var& a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().squaredNorm();
  return make_node(std::move(v), {a}, [a] {
    return [a](Node& self) { push_grad(a.node(), 2.0 * self.grad(0, 0) * a.value()); };
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts[0].cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw DimensionError("concat_rows: column mismatch");
    rows += p.rows();
  }
  Matrix v(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return make_node(std::move(v), parts, [parts] {
    return [parts](Node& self) {
      Eigen::Index off = 0;
      for (const auto& p : parts) {
        if (p.requires_grad()) push_grad(p.node(), self.grad.middleRows(off, p.rows()));
        off += p.rows();
      }
    };
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  Eigen::Index cols = 0;
  const Eigen::Index rows = parts[0].rows();
  for (const auto& p : parts) {
    if (p.rows() != rows) throw DimensionError("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix v(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return make_node(std::move(v), parts, [parts] {
    return [parts](Node& self) {
      Eigen::Index off = 0;
      for (const auto& p : parts) {
        if (p.requires_grad()) push_grad(p.node(), self.grad.middleCols(off, p.cols()));
        off += p.cols();
      }
    };
  });
}

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) throw DimensionError("slice_rows: out of range");
  Matrix v = a.value().middleRows(start, count);
  return make_node(std::move(v), {a}, [a, start, count] {
    return [a, start, count](Node& self) {
      Matrix g = Matrix::Zero(a.rows(), a.cols());
      g.middleRows(start, count) = self.grad;
      push_grad(a.node(), g);
    };
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw DimensionError("slice_cols: out of range");
  Matrix v = a.value().middleCols(start, count);
  return make_node(std::move(v), {a}, [a, start, count] {
    return [a, start, count](Node& self) {
      Matrix g = Matrix::Zero(a.rows(), a.cols());
      g.middleCols(start, count) = self.grad;
      push_grad(a.node(), g);
    };
  });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size()) throw DimensionError("reshape: size mismatch");
  Matrix v = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  return make_node(std::move(v), {a}, [a] {
    return [a](Node& self) {
      push_grad(a.node(), Eigen::Map<const Matrix>(self.grad.data(), a.rows(), a.cols()));
    };
  });
}

}  // namespace qmlc::nn
