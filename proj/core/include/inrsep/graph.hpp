#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "inrsep/tensor.hpp"

namespace inrsep::ad {

using NodeId = std::int32_t;

enum class OpKind : std::uint8_t {
  kInput,
  kParam,
  kAffine,        // x[B,in] * w[in,out] + b[1,out]
  kSine,          // sin(freq * x), elementwise
  kRelu,
  kSoftmax,       // row-wise, numerically stable
  kAdd,           // same shape, or rhs broadcast from [1,C] / [1,1]
  kMul,           // same broadcast rules as kAdd
  kRowDot,        // [B,K]x[B,K] -> [B,1], per-row inner product
  kSumAll,        // -> [1,1]
  kMeanAll,       // -> [1,1]
  kSquaredError,  // (a-b)^2 elementwise
  kSqrt,
  kLog1p,
};

// Reverse-mode tape over tensor-granular operations. Built define-by-run:
// every builder both records the node and computes its forward value, so the
// graph is topologically ordered by construction and backward() is a single
// reverse sweep with additive gradient accumulation.
//
// A Graph instance is single-threaded; independent instances may run in
// parallel. forward values are validated to be finite after every op.
class Graph {
 public:
  // Leaf carrying constant data (no gradient).
  NodeId input(Tensor t);
  // Leaf carrying trainable values; its gradient is available after backward().
  NodeId param(Tensor t);

  NodeId affine(NodeId x, NodeId w, NodeId b);
  NodeId sine(NodeId x, double freq = 1.0);
  NodeId relu(NodeId x);
  NodeId softmax(NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId row_dot(NodeId a, NodeId b);
  NodeId sum_all(NodeId x);
  NodeId mean_all(NodeId x);
  NodeId squared_error(NodeId a, NodeId b);
  NodeId sqrt(NodeId x);
  NodeId log1p(NodeId x);

  const Tensor& value(NodeId id) const;
  const Tensor& grad(NodeId id) const;

  // Seeds d(out)/d(out) = 1 for a [1,1] output, then sweeps the tape.
  void backward(NodeId output);
  // Seeds with an explicit cotangent of the output's shape.
  void backward(NodeId output, const Tensor& output_grad);

  std::size_t size() const { return nodes_.size(); }
  bool backward_has_run() const { return backward_run_; }

 private:
  struct Node {
    OpKind op;
    std::array<NodeId, 3> in{-1, -1, -1};
    double attr = 0.0;  // sine frequency
    Tensor value;
    Tensor grad;  // allocated lazily at backward time
  };

  NodeId push(Node n);
  const Node& node(NodeId id) const;
  Tensor& grad_buf(NodeId id);
  void check_finite(const Tensor& t, const char* op_name) const;

  std::vector<Node> nodes_;
  bool backward_run_ = false;
};

}  // namespace inrsep::ad
