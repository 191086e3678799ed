#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "textpose/nn/tensor.hpp"

namespace textpose::nn {

// Define-by-run reverse-mode autodiff. Values are computed eagerly; every op
// records its inputs plus a vjp closure. The twist that makes the gradient
// penalty work: vjp closures build their results out of these same ops, so a
// gradient is itself a differentiable graph and backward can be applied to
// expressions containing earlier gradients (double backprop).

struct Node;
using Var = std::shared_ptr<Node>;

// Given (self, upstream grad, needed mask) produce per-input gradients.
// Entries where needed[i] is false may be left null.
using VjpFn = std::function<std::vector<Var>(const Var&, const Var&, const std::vector<char>&)>;

struct Node {
  Tensor val;
  std::vector<Var> inputs;
  VjpFn vjp;
  bool requires_grad = false;
  std::int64_t id = 0;
};

Var constant(Tensor v);
Var leaf(Tensor v, bool requires_grad = true);
Var detach(const Var& x);

// ---- elementwise ----
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var neg(const Var& x);
Var addc(const Var& x, double c);
Var mulc(const Var& x, double c);
Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);
Var tanh_op(const Var& x);
Var sigmoid(const Var& x);
Var log_op(const Var& x);
Var abs_op(const Var& x);
Var pow_const(const Var& x, double p);
Var sqrt_op(const Var& x);
Var square(const Var& x);
Var clamp(const Var& x, double lo, double hi);

// ---- reductions and broadcasts ----
Var sum_all(const Var& x);                                   // -> [1]
Var mean_all(const Var& x);                                  // -> [1]
Var broadcast_from_scalar(const Var& s, Shape shape);        // [1] -> shape
Var sum_cols(const Var& x);                                  // [B,R] -> [B]
Var broadcast_cols(const Var& x, int cols);                  // [B] -> [B,cols]
Var sum_rows(const Var& x);                                  // [B,D] -> [D]
Var broadcast_rows(const Var& x, int rows);                  // [D] -> [rows,D]
Var channel_sum(const Var& x);                               // [N,C,H,W] -> [C]
Var broadcast_channel(const Var& x, int n, int h, int w);    // [C] -> [n,C,h,w]
Var tile_spatial(const Var& x, int h, int w);                 // [B,D] -> [B,D,h,w]
Var spatial_sum(const Var& x);                                // [B,D,H,W] -> [B,D]

// ---- shape ----
Var reshape(const Var& x, Shape shape);
Var concat_axis1(const std::vector<Var>& parts);
Var slice_axis1(const Var& x, int start, int len);

// ---- linear algebra ----
Var matmul(const Var& a, const Var& b, bool trans_a = false, bool trans_b = false);

// ---- convolution family ----
// conv2d maps [N,Cin,H,W] with weights [Cout,Cin,k,k] to [N,Cout,OH,OW].
// conv2d_igrad is its adjoint w.r.t. the input; with x in the g slot it is
// exactly a transposed-convolution layer (weights laid out [Cin,Cout,k,k]).
// conv2d_wgrad is the adjoint w.r.t. the weights. The three ops are closed
// under differentiation, which is what double backprop rests on.
Var conv2d(const Var& x, const Var& w, int stride, int pad);
Var conv2d_igrad(const Var& g, const Var& w, int stride, int pad, int out_h, int out_w);
Var conv2d_wgrad(const Var& x, const Var& g, int stride, int pad, int k);

// ---- autodiff driver ----
// root must be a single-element tensor. Gradients are returned for every node
// on a path from root to any of wrt (so intermediate grads are reusable);
// branches that cannot reach wrt are never walked.
using GradMap = std::unordered_map<const Node*, Var>;
GradMap backward(const Var& root, const std::vector<Var>& wrt);

}  // namespace textpose::nn
