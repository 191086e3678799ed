#pragma once

#include "textpose/nn/tensor.hpp"

namespace textpose::nn {

// Plain-tensor convolution kernels (im2col + GEMM). The graph ops in
// graph.hpp wrap these; they are exposed so tests can check them against
// brute-force loops directly.

int conv_out_size(int in, int k, int stride, int pad);

// x [N,Cin,H,W], w [Cout,Cin,k,k] -> [N,Cout,OH,OW]
Tensor conv2d_fwd(const Tensor& x, const Tensor& w, int stride, int pad);

// Adjoint w.r.t. x: g [N,Cout,OH,OW], w [Cout,Cin,k,k] -> [N,Cin,H,W].
// Doubles as the transposed-convolution forward pass.
Tensor conv2d_igrad_fwd(const Tensor& g, const Tensor& w, int stride, int pad, int out_h, int out_w);

// Adjoint w.r.t. w: x [N,Cin,H,W], g [N,Cout,OH,OW] -> [Cout,Cin,k,k]
Tensor conv2d_wgrad_fwd(const Tensor& x, const Tensor& g, int stride, int pad, int k);

}  // namespace textpose::nn
