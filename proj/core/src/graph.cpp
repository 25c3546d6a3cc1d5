#include "inrsep/graph.hpp"

#include <cmath>
#include <string>

namespace inrsep::ad {

namespace {

bool is_scalar(const Tensor& t) { return t.numel() == 1; }

// rhs may be same-shape, a [1,C] row, or a [1,1] scalar.
enum class Broadcast { kNone, kRow, kScalar };

Broadcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op_name) {
  if (a.same_shape(b)) return Broadcast::kNone;
  if (is_scalar(b)) return Broadcast::kScalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  throw ShapeError(std::string(op_name) + ": incompatible shapes");
}

}  // namespace

NodeId Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

const Graph::Node& Graph::node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }

Tensor& Graph::grad_buf(NodeId id) {
  Node& n = nodes_.at(static_cast<std::size_t>(id));
  if (n.grad.v.empty()) n.grad = Tensor::zeros(n.value.shape);
  return n.grad;
}

void Graph::check_finite(const Tensor& t, const char* op_name) const {
  for (double x : t.v) {
    if (!std::isfinite(x)) {
      throw NonFiniteError(std::string(op_name) + ": non-finite value in forward pass");
    }
  }
}

const Tensor& Graph::value(NodeId id) const { return node(id).value; }

const Tensor& Graph::grad(NodeId id) const {
  if (!backward_run_) throw std::logic_error("Graph::grad: backward has not run");
  const Node& n = node(id);
  if (n.grad.v.empty()) {
    throw std::logic_error("Graph::grad: node did not receive a gradient");
  }
  return n.grad;
}

NodeId Graph::input(Tensor t) {
  check_finite(t, "input");
  Node n;
  n.op = OpKind::kInput;
  n.value = std::move(t);
  n.value.requires_grad = false;
  return push(std::move(n));
}

NodeId Graph::param(Tensor t) {
  check_finite(t, "param");
  Node n;
  n.op = OpKind::kParam;
  n.value = std::move(t);
  n.value.requires_grad = true;
  return push(std::move(n));
}

NodeId Graph::affine(NodeId x, NodeId w, NodeId b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  const std::size_t B = xv.rows(), in = xv.cols(), out = wv.cols();
  if (wv.rows() != in) throw ShapeError("affine: weight rows must equal input cols");
  if (bv.rows() != 1 || bv.cols() != out) throw ShapeError("affine: bias must be [1,out]");

  Tensor y = Tensor::zeros({B, out});
  for (std::size_t i = 0; i < B; ++i) {
    double* yi = &y.v[i * out];
    for (std::size_t j = 0; j < out; ++j) yi[j] = bv.v[j];
    const double* xi = &xv.v[i * in];
    for (std::size_t k = 0; k < in; ++k) {
      const double xk = xi[k];
      const double* wk = &wv.v[k * out];
      for (std::size_t j = 0; j < out; ++j) yi[j] += xk * wk[j];
    }
  }
  check_finite(y, "affine");
  Node n;
  n.op = OpKind::kAffine;
  n.in = {x, w, b};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::sine(NodeId x, double freq) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.shape);
  for (std::size_t i = 0; i < xv.numel(); ++i) y.v[i] = std::sin(freq * xv.v[i]);
  check_finite(y, "sine");
  Node n;
  n.op = OpKind::kSine;
  n.in = {x, -1, -1};
  n.attr = freq;
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::relu(NodeId x) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.shape);
  for (std::size_t i = 0; i < xv.numel(); ++i) y.v[i] = xv.v[i] > 0.0 ? xv.v[i] : 0.0;
  Node n;
  n.op = OpKind::kRelu;
  n.in = {x, -1, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::softmax(NodeId x) {
  const Tensor& xv = value(x);
  const std::size_t B = xv.rows(), C = xv.cols();
  Tensor y = Tensor::zeros(xv.shape);
  for (std::size_t i = 0; i < B; ++i) {
    const double* xi = &xv.v[i * C];
    double* yi = &y.v[i * C];
    double m = xi[0];
    for (std::size_t j = 1; j < C; ++j) m = std::max(m, xi[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
      yi[j] = std::exp(xi[j] - m);
      z += yi[j];
    }
    for (std::size_t j = 0; j < C; ++j) yi[j] /= z;
  }
  check_finite(y, "softmax");
  Node n;
  n.op = OpKind::kSoftmax;
  n.in = {x, -1, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  const Broadcast bc = broadcast_kind(av, bv, "add");
  Tensor y = av;
  y.requires_grad = false;
  const std::size_t C = av.cols();
  for (std::size_t i = 0; i < av.numel(); ++i) {
    const double rhs = bc == Broadcast::kNone   ? bv.v[i]
                       : bc == Broadcast::kScalar ? bv.v[0]
                                                  : bv.v[i % C];
    y.v[i] += rhs;
  }
  check_finite(y, "add");
  Node n;
  n.op = OpKind::kAdd;
  n.in = {a, b, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  const Broadcast bc = broadcast_kind(av, bv, "mul");
  Tensor y = av;
  y.requires_grad = false;
  const std::size_t C = av.cols();
  for (std::size_t i = 0; i < av.numel(); ++i) {
    const double rhs = bc == Broadcast::kNone   ? bv.v[i]
                       : bc == Broadcast::kScalar ? bv.v[0]
                                                  : bv.v[i % C];
    y.v[i] *= rhs;
  }
  check_finite(y, "mul");
  Node n;
  n.op = OpKind::kMul;
  n.in = {a, b, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::row_dot(NodeId a, NodeId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (!av.same_shape(bv)) throw ShapeError("row_dot: operands must match");
  const std::size_t B = av.rows(), K = av.cols();
  Tensor y = Tensor::zeros({B, 1});
  for (std::size_t i = 0; i < B; ++i) {
    double acc = 0.0;
    const double* ai = &av.v[i * K];
    const double* bi = &bv.v[i * K];
    for (std::size_t k = 0; k < K; ++k) acc += ai[k] * bi[k];
    y.v[i] = acc;
  }
  check_finite(y, "row_dot");
  Node n;
  n.op = OpKind::kRowDot;
  n.in = {a, b, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::sum_all(NodeId x) {
  const Tensor& xv = value(x);
  double acc = 0.0;
  for (double v : xv.v) acc += v;
  check_finite(Tensor::scalar(acc), "sum_all");
  Node n;
  n.op = OpKind::kSumAll;
  n.in = {x, -1, -1};
  n.value = Tensor::scalar(acc);
  return push(std::move(n));
}

NodeId Graph::mean_all(NodeId x) {
  const Tensor& xv = value(x);
  if (xv.numel() == 0) throw ShapeError("mean_all: empty tensor");
  double acc = 0.0;
  for (double v : xv.v) acc += v;
  acc /= static_cast<double>(xv.numel());
  check_finite(Tensor::scalar(acc), "mean_all");
  Node n;
  n.op = OpKind::kMeanAll;
  n.in = {x, -1, -1};
  n.value = Tensor::scalar(acc);
  return push(std::move(n));
}

NodeId Graph::squared_error(NodeId a, NodeId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (!av.same_shape(bv)) throw ShapeError("squared_error: operands must match");
  Tensor y = Tensor::zeros(av.shape);
  for (std::size_t i = 0; i < av.numel(); ++i) {
    const double d = av.v[i] - bv.v[i];
    y.v[i] = d * d;
  }
  check_finite(y, "squared_error");
  Node n;
  n.op = OpKind::kSquaredError;
  n.in = {a, b, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::sqrt(NodeId x) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.shape);
  for (std::size_t i = 0; i < xv.numel(); ++i) y.v[i] = std::sqrt(xv.v[i]);
  check_finite(y, "sqrt");
  Node n;
  n.op = OpKind::kSqrt;
  n.in = {x, -1, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

NodeId Graph::log1p(NodeId x) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.shape);
  for (std::size_t i = 0; i < xv.numel(); ++i) y.v[i] = std::log1p(xv.v[i]);
  check_finite(y, "log1p");
  Node n;
  n.op = OpKind::kLog1p;
  n.in = {x, -1, -1};
  n.value = std::move(y);
  return push(std::move(n));
}

void Graph::backward(NodeId output) {
  const Tensor& out = value(output);
  backward(output, Tensor::full(out.shape, 1.0));
}

void Graph::backward(NodeId output, const Tensor& output_grad) {
  if (nodes_.empty()) throw std::logic_error("Graph::backward: empty graph");
  const Node& out = node(output);
  if (!out.value.same_shape(output_grad)) {
    throw ShapeError("backward: output_grad shape mismatch");
  }
  for (Node& n : nodes_) n.grad = Tensor();
  grad_buf(output) = output_grad;
  backward_run_ = true;

  for (NodeId id = output; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.v.empty()) continue;  // not on a path to the output
    const Tensor& g = n.grad;
    switch (n.op) {
      case OpKind::kInput:
      case OpKind::kParam:
        break;
      case OpKind::kAffine: {
        const Tensor& xv = value(n.in[0]);
        const Tensor& wv = value(n.in[1]);
        Tensor& gx = grad_buf(n.in[0]);
        Tensor& gw = grad_buf(n.in[1]);
        Tensor& gb = grad_buf(n.in[2]);
        const std::size_t B = xv.rows(), in = xv.cols(), out_c = wv.cols();
        for (std::size_t i = 0; i < B; ++i) {
          const double* gi = &g.v[i * out_c];
          const double* xi = &xv.v[i * in];
          double* gxi = &gx.v[i * in];
          for (std::size_t k = 0; k < in; ++k) {
            const double* wk = &wv.v[k * out_c];
            double* gwk = &gw.v[k * out_c];
            double acc = 0.0;
            const double xk = xi[k];
            for (std::size_t j = 0; j < out_c; ++j) {
              acc += gi[j] * wk[j];
              gwk[j] += xk * gi[j];
            }
            gxi[k] += acc;
          }
          for (std::size_t j = 0; j < out_c; ++j) gb.v[j] += gi[j];
        }
        break;
      }
      case OpKind::kSine: {
        const Tensor& xv = value(n.in[0]);
        Tensor& gx = grad_buf(n.in[0]);
        for (std::size_t i = 0; i < xv.numel(); ++i) {
          gx.v[i] += g.v[i] * n.attr * std::cos(n.attr * xv.v[i]);
        }
        break;
      }
      case OpKind::kRelu: {
        const Tensor& xv = value(n.in[0]);
        Tensor& gx = grad_buf(n.in[0]);
        for (std::size_t i = 0; i < xv.numel(); ++i) {
          if (xv.v[i] > 0.0) gx.v[i] += g.v[i];
        }
        break;
      }
      case OpKind::kSoftmax: {
        const Tensor& yv = n.value;
        Tensor& gx = grad_buf(n.in[0]);
        const std::size_t B = yv.rows(), C = yv.cols();
        for (std::size_t i = 0; i < B; ++i) {
          const double* yi = &yv.v[i * C];
          const double* gi = &g.v[i * C];
          double dot = 0.0;
          for (std::size_t j = 0; j < C; ++j) dot += gi[j] * yi[j];
          double* gxi = &gx.v[i * C];
          for (std::size_t j = 0; j < C; ++j) gxi[j] += yi[j] * (gi[j] - dot);
        }
        break;
      }
      case OpKind::kAdd: {
        const Tensor& av = value(n.in[0]);
        const Tensor& bv = value(n.in[1]);
        Tensor& ga = grad_buf(n.in[0]);
        Tensor& gb = grad_buf(n.in[1]);
        const Broadcast bc = broadcast_kind(av, bv, "add");
        const std::size_t C = av.cols();
        for (std::size_t i = 0; i < av.numel(); ++i) {
          ga.v[i] += g.v[i];
          if (bc == Broadcast::kNone) gb.v[i] += g.v[i];
          else if (bc == Broadcast::kScalar) gb.v[0] += g.v[i];
          else gb.v[i % C] += g.v[i];
        }
        break;
      }
      case OpKind::kMul: {
        const Tensor& av = value(n.in[0]);
        const Tensor& bv = value(n.in[1]);
        Tensor& ga = grad_buf(n.in[0]);
        Tensor& gb = grad_buf(n.in[1]);
        const Broadcast bc = broadcast_kind(av, bv, "mul");
        const std::size_t C = av.cols();
        for (std::size_t i = 0; i < av.numel(); ++i) {
          const std::size_t bi = bc == Broadcast::kNone   ? i
                                 : bc == Broadcast::kScalar ? 0
                                                            : i % C;
          ga.v[i] += g.v[i] * bv.v[bi];
          gb.v[bi] += g.v[i] * av.v[i];
        }
        break;
      }
      case OpKind::kRowDot: {
        const Tensor& av = value(n.in[0]);
        const Tensor& bv = value(n.in[1]);
        Tensor& ga = grad_buf(n.in[0]);
        Tensor& gb = grad_buf(n.in[1]);
        const std::size_t B = av.rows(), K = av.cols();
        for (std::size_t i = 0; i < B; ++i) {
          const double gi = g.v[i];
          const double* ai = &av.v[i * K];
          const double* bi = &bv.v[i * K];
          double* gai = &ga.v[i * K];
          double* gbi = &gb.v[i * K];
          for (std::size_t k = 0; k < K; ++k) {
            gai[k] += gi * bi[k];
            gbi[k] += gi * ai[k];
          }
        }
        break;
      }
      case OpKind::kSumAll: {
        Tensor& gx = grad_buf(n.in[0]);
        const double gi = g.v[0];
        for (double& x : gx.v) x += gi;
        break;
      }
      case OpKind::kMeanAll: {
        Tensor& gx = grad_buf(n.in[0]);
        const double gi = g.v[0] / static_cast<double>(gx.numel());
        for (double& x : gx.v) x += gi;
        break;
      }
      case OpKind::kSquaredError: {
        const Tensor& av = value(n.in[0]);
        const Tensor& bv = value(n.in[1]);
        Tensor& ga = grad_buf(n.in[0]);
        Tensor& gb = grad_buf(n.in[1]);
        for (std::size_t i = 0; i < av.numel(); ++i) {
          const double d = 2.0 * (av.v[i] - bv.v[i]) * g.v[i];
          ga.v[i] += d;
          gb.v[i] -= d;
        }
        break;
      }
      case OpKind::kSqrt: {
        const Tensor& yv = n.value;
        Tensor& gx = grad_buf(n.in[0]);
        for (std::size_t i = 0; i < yv.numel(); ++i) {
          gx.v[i] += g.v[i] * 0.5 / yv.v[i];
        }
        break;
      }
      case OpKind::kLog1p: {
        const Tensor& xv = value(n.in[0]);
        Tensor& gx = grad_buf(n.in[0]);
        for (std::size_t i = 0; i < xv.numel(); ++i) {
          gx.v[i] += g.v[i] / (1.0 + xv.v[i]);
        }
        break;
      }
    }
  }
}

}  // namespace inrsep::ad
