#include "textpose/nn/conv.hpp"

#include <cstring>

#include "textpose/errors.hpp"

namespace textpose::nn {

int conv_out_size(int in, int k, int stride, int pad) {
  int span = in + 2 * pad - k;
  if (span < 0) throw ShapeError("convolution kernel larger than padded input");
  return span / stride + 1;
}

namespace {

// col has one row per (c, ki, kj) and one column per output position.
void im2col(const double* x, int C, int H, int W, int k, int s, int p, int OH, int OW, double* col) {
  for (int c = 0; c < C; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        double* row = col + (static_cast<std::int64_t>((c * k + ki) * k + kj)) * OH * OW;
        for (int oh = 0; oh < OH; ++oh) {
          int ih = oh * s + ki - p;
          double* dst = row + static_cast<std::int64_t>(oh) * OW;
          if (ih < 0 || ih >= H) {
            std::memset(dst, 0, sizeof(double) * static_cast<std::size_t>(OW));
            continue;
          }
          const double* src = x + (static_cast<std::int64_t>(c) * H + ih) * W;
          for (int ow = 0; ow < OW; ++ow) {
            int iw = ow * s + kj - p;
            dst[ow] = (iw >= 0 && iw < W) ? src[iw] : 0.0;
          }
        }
      }
    }
  }
}

// Scatter-add of a col matrix back onto the input plane.
void col2im(const double* col, int C, int H, int W, int k, int s, int p, int OH, int OW, double* x) {
  for (int c = 0; c < C; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const double* row = col + (static_cast<std::int64_t>((c * k + ki) * k + kj)) * OH * OW;
        for (int oh = 0; oh < OH; ++oh) {
          int ih = oh * s + ki - p;
          if (ih < 0 || ih >= H) continue;
          double* dst = x + (static_cast<std::int64_t>(c) * H + ih) * W;
          const double* src = row + static_cast<std::int64_t>(oh) * OW;
          for (int ow = 0; ow < OW; ++ow) {
            int iw = ow * s + kj - p;
            if (iw >= 0 && iw < W) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

using MatMap = Eigen::Map<Tensor::MatrixRM>;
using CMatMap = Eigen::Map<const Tensor::MatrixRM>;

}  // namespace

Tensor conv2d_fwd(const Tensor& x, const Tensor& w, int stride, int pad) {
  require_rank(x, 4, "conv2d input");
  require_rank(w, 4, "conv2d weight");
  if (w.dim(2) != w.dim(3)) throw ShapeError("conv2d expects a square kernel");
  if (x.dim(1) != w.dim(1)) throw ShapeError("conv2d channel mismatch");
  int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  int Cout = w.dim(0), k = w.dim(2);
  int OH = conv_out_size(H, k, stride, pad), OW = conv_out_size(W, k, stride, pad);
  std::int64_t ckk = static_cast<std::int64_t>(C) * k * k, ohw = static_cast<std::int64_t>(OH) * OW;

  Tensor out({N, Cout, OH, OW});
  Tensor col({static_cast<int>(ckk), OH * OW});
  CMatMap wm(w.data(), Cout, ckk);
  for (int n = 0; n < N; ++n) {
    im2col(x.data() + static_cast<std::int64_t>(n) * C * H * W, C, H, W, k, stride, pad, OH, OW, col.data());
    MatMap om(out.data() + static_cast<std::int64_t>(n) * Cout * ohw, Cout, ohw);
    om.noalias() = wm * CMatMap(col.data(), ckk, ohw);
  }
  return out;
}

Tensor conv2d_igrad_fwd(const Tensor& g, const Tensor& w, int stride, int pad, int out_h, int out_w) {
  require_rank(g, 4, "conv2d_igrad input");
  require_rank(w, 4, "conv2d_igrad weight");
  if (w.dim(2) != w.dim(3)) throw ShapeError("conv2d_igrad expects a square kernel");
  if (g.dim(1) != w.dim(0)) throw ShapeError("conv2d_igrad channel mismatch");
  int N = g.dim(0), Cout = g.dim(1), OH = g.dim(2), OW = g.dim(3);
  int C = w.dim(1), k = w.dim(2);
  if (conv_out_size(out_h, k, stride, pad) != OH || conv_out_size(out_w, k, stride, pad) != OW)
    throw ShapeError("conv2d_igrad target size inconsistent with stride/pad/kernel");
  std::int64_t ckk = static_cast<std::int64_t>(C) * k * k, ohw = static_cast<std::int64_t>(OH) * OW;

  Tensor out({N, C, out_h, out_w});
  Tensor col({static_cast<int>(ckk), OH * OW});
  CMatMap wm(w.data(), Cout, ckk);
  for (int n = 0; n < N; ++n) {
    CMatMap gm(g.data() + static_cast<std::int64_t>(n) * Cout * ohw, Cout, ohw);
    MatMap(col.data(), ckk, ohw).noalias() = wm.transpose() * gm;
    col2im(col.data(), C, out_h, out_w, k, stride, pad, OH, OW,
           out.data() + static_cast<std::int64_t>(n) * C * out_h * out_w);
  }
  return out;
}

Tensor conv2d_wgrad_fwd(const Tensor& x, const Tensor& g, int stride, int pad, int k) {
  require_rank(x, 4, "conv2d_wgrad input");
  require_rank(g, 4, "conv2d_wgrad grad");
  if (x.dim(0) != g.dim(0)) throw ShapeError("conv2d_wgrad batch mismatch");
  int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  int Cout = g.dim(1), OH = g.dim(2), OW = g.dim(3);
  if (conv_out_size(H, k, stride, pad) != OH || conv_out_size(W, k, stride, pad) != OW)
    throw ShapeError("conv2d_wgrad grad size inconsistent with stride/pad/kernel");
  std::int64_t ckk = static_cast<std::int64_t>(C) * k * k, ohw = static_cast<std::int64_t>(OH) * OW;

  Tensor out({Cout, C, k, k});
  Tensor col({static_cast<int>(ckk), OH * OW});
  MatMap om(out.data(), Cout, ckk);
  for (int n = 0; n < N; ++n) {
    im2col(x.data() + static_cast<std::int64_t>(n) * C * H * W, C, H, W, k, stride, pad, OH, OW, col.data());
    CMatMap gm(g.data() + static_cast<std::int64_t>(n) * Cout * ohw, Cout, ohw);
    if (n == 0)
      om.noalias() = gm * CMatMap(col.data(), ckk, ohw).transpose();
    else
      om.noalias() += gm * CMatMap(col.data(), ckk, ohw).transpose();
  }
  return out;
}

}  // namespace textpose::nn
