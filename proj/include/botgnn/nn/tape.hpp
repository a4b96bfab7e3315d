#pragma once

// Reverse-mode differentiation over a linear tape. Ops append a node with
// its forward value and a closure that pushes the node's gradient to its
// inputs. Nodes are appended in evaluation order, so walking the tape
// backwards is a valid topological order.

#include <cstddef>
#include <functional>
#include <vector>

#include "botgnn/errors.hpp"
#include "botgnn/graph/normalize.hpp"
#include "botgnn/nn/param.hpp"
#include "botgnn/tensor.hpp"

namespace botgnn::nn {

struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor2& grad_out)>;

  Var constant(Tensor2 value) { return push(std::move(value), false, nullptr); }

  Var push(Tensor2 value, bool requires_grad, Backward backward) {
    nodes_.push_back({std::move(value), Tensor2{}, requires_grad, std::move(backward)});
    return {nodes_.size() - 1};
  }

  const Tensor2& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Accumulates into the gradient slot of `v`, allocating it on first use.
  Tensor2& grad_slot(Var v) {
    Node& node = nodes_.at(v.id);
    if (node.grad.size() != node.value.size()) {
      node.grad = Tensor2(node.value.rows(), node.value.cols());
    }
    return node.grad;
  }

  // Seeds d(objective)/d(out) and propagates to every parameter reachable
  // from `out`. Parameter gradients accumulate into ParamTensor::grad.
  void backward(Var out, const Tensor2& seed) {
    if (!value(out).same_shape(seed)) {
      throw InputError("backward seed shape " + seed.shape_string() + " != output " +
                       value(out).shape_string());
    }
    grad_slot(out) = seed;
    for (std::size_t id = out.id + 1; id-- > 0;) {
      Node& node = nodes_[id];
      if (node.backward && node.grad.size() == node.value.size()) {
        Tensor2 g = std::move(node.grad);
        node.grad = Tensor2{};
        node.backward(*this, g);
      }
    }
  }

  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Tensor2 value;
    Tensor2 grad;
    bool requires_grad;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

// x w, no bias. w is a parameter.
inline Var linear(Tape& tape, Var x, ParamTensor& w) {
  const Tensor2& xv = tape.value(x);
  if (xv.cols() != w.rows()) {
    throw InputError("linear: x " + xv.shape_string() + " vs w " + w.value.shape_string());
  }
  return tape.push(matmul(xv, w.value), true, [x, &w](Tape& t, const Tensor2& g) {
    matmul_tn_accumulate(t.value(x), g, w.grad);
    if (t.requires_grad(x)) matmul_nt_accumulate(g, w.value, t.grad_slot(x));
  });
}

// x w + bias, bias broadcast over rows.
inline Var affine(Tape& tape, Var x, ParamTensor& w, ParamTensor& bias) {
  const Tensor2& xv = tape.value(x);
  if (xv.cols() != w.rows() || bias.rows() != 1 || bias.cols() != w.cols()) {
    throw InputError("affine: x " + xv.shape_string() + ", w " + w.value.shape_string() +
                     ", bias " + bias.value.shape_string());
  }
  Tensor2 out = matmul(xv, w.value);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < out.cols(); ++c) row[c] += bias.value(0, c);
  }
  return tape.push(std::move(out), true, [x, &w, &bias](Tape& t, const Tensor2& g) {
    matmul_tn_accumulate(t.value(x), g, w.grad);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      auto row = g.row(r);
      for (std::size_t c = 0; c < g.cols(); ++c) bias.grad(0, c) += row[c];
    }
    if (t.requires_grad(x)) matmul_nt_accumulate(g, w.value, t.grad_slot(x));
  });
}

// A x. Backward multiplies by A^T. `adj` must outlive the tape.
inline Var aggregate(Tape& tape, const NormalizedAdjacency& adj, Var x) {
  const Tensor2& xv = tape.value(x);
  if (xv.rows() != adj.n()) {
    throw InputError("aggregate: x has " + std::to_string(xv.rows()) + " rows, graph has " +
                     std::to_string(adj.n()) + " nodes");
  }
  return tape.push(spmm(adj, xv), tape.requires_grad(x), [x, &adj](Tape& t, const Tensor2& g) {
    if (!t.requires_grad(x)) return;
    Tensor2 back = spmm_transposed(adj, g);
    Tensor2& slot = t.grad_slot(x);
    for (std::size_t i = 0; i < back.size(); ++i) slot.values()[i] += back.values()[i];
  });
}

// max(0, x); the subgradient at 0 is 0.
inline Var relu(Tape& tape, Var x) {
  Tensor2 out = tape.value(x);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return tape.push(std::move(out), tape.requires_grad(x), [x](Tape& t, const Tensor2& g) {
    if (!t.requires_grad(x)) return;
    const auto in = t.value(x).values();
    auto slot = t.grad_slot(x).values();
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] > 0.0) slot[i] += g.values()[i];
    }
  });
}

inline Var add(Tape& tape, Var a, Var b) {
  const Tensor2& av = tape.value(a);
  const Tensor2& bv = tape.value(b);
  if (!av.same_shape(bv)) {
    throw InputError("add: " + av.shape_string() + " vs " + bv.shape_string());
  }
  Tensor2 out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += bv.values()[i];
  const bool rg = tape.requires_grad(a) || tape.requires_grad(b);
  return tape.push(std::move(out), rg, [a, b](Tape& t, const Tensor2& g) {
    for (Var v : {a, b}) {
      if (!t.requires_grad(v)) continue;
      auto slot = t.grad_slot(v).values();
      for (std::size_t i = 0; i < slot.size(); ++i) slot[i] += g.values()[i];
    }
  });
}

}  // namespace botgnn::nn
