#include "textpose/nn/graph.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "textpose/errors.hpp"
#include "textpose/nn/conv.hpp"

namespace textpose::nn {

namespace {

std::atomic<std::int64_t> g_next_id{1};

Var make_node(Tensor val, std::vector<Var> inputs, VjpFn vjp) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  n->inputs = std::move(inputs);
  n->vjp = std::move(vjp);
  for (const auto& in : n->inputs)
    if (in->requires_grad) {
      n->requires_grad = true;
      break;
    }
  n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  return n;
}

void require_same_shape(const Var& a, const Var& b, const char* what) {
  if (!a->val.same_shape(b->val))
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_str(a->val.shape()) + " vs " +
                     shape_str(b->val.shape()));
}

// Derivative-free masks (piecewise-constant functions of x). They never
// propagate gradient into x, which is the almost-everywhere-correct rule.
Var leaky_mask(const Var& x, double slope) {
  Tensor t(x->val.shape());
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = x->val[i] >= 0.0 ? 1.0 : slope;
  return make_node(std::move(t), {}, nullptr);
}

Var sign_mask(const Var& x) {
  Tensor t(x->val.shape());
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    double v = x->val[i];
    t[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  }
  return make_node(std::move(t), {}, nullptr);
}

Var range_mask(const Var& x, double lo, double hi) {
  Tensor t(x->val.shape());
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = (x->val[i] >= lo && x->val[i] <= hi) ? 1.0 : 0.0;
  return make_node(std::move(t), {}, nullptr);
}

}  // namespace

Var constant(Tensor v) { return make_node(std::move(v), {}, nullptr); }

Var leaf(Tensor v, bool requires_grad) {
  auto n = make_node(std::move(v), {}, nullptr);
  n->requires_grad = requires_grad;
  return n;
}

Var detach(const Var& x) { return constant(x->val); }

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor t(a->val.shape());
  t.array() = a->val.array() + b->val.array();
  return make_node(std::move(t), {a, b},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     if (need[0]) r[0] = g;
                     if (need[1]) r[1] = g;
                     return r;
                   });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor t(a->val.shape());
  t.array() = a->val.array() - b->val.array();
  return make_node(std::move(t), {a, b},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     if (need[0]) r[0] = g;
                     if (need[1]) r[1] = neg(g);
                     return r;
                   });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor t(a->val.shape());
  t.array() = a->val.array() * b->val.array();
  return make_node(std::move(t), {a, b},
                   [](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     if (need[0]) r[0] = mul(g, self->inputs[1]);
                     if (need[1]) r[1] = mul(g, self->inputs[0]);
                     return r;
                   });
}

Var neg(const Var& x) {
  Tensor t(x->val.shape());
  t.array() = -x->val.array();
  return make_node(std::move(t), {x},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = neg(g);
                     return r;
                   });
}

Var addc(const Var& x, double c) {
  Tensor t(x->val.shape());
  t.array() = x->val.array() + c;
  return make_node(std::move(t), {x},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = g;
                     return r;
                   });
}

Var mulc(const Var& x, double c) {
  Tensor t(x->val.shape());
  t.array() = x->val.array() * c;
  return make_node(std::move(t), {x},
                   [c](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mulc(g, c);
                     return r;
                   });
}

Var relu(const Var& x) { return leaky_relu(x, 0.0); }

Var leaky_relu(const Var& x, double slope) {
  Tensor t(x->val.shape());
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    double v = x->val[i];
    t[i] = v >= 0.0 ? v : slope * v;
  }
  return make_node(std::move(t), {x},
                   [slope](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, leaky_mask(self->inputs[0], slope));
                     return r;
                   });
}

Var tanh_op(const Var& x) {
  Tensor t(x->val.shape());
  t.array() = x->val.array().tanh();
  return make_node(std::move(t), {x},
                   [](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, addc(neg(square(self)), 1.0));
                     return r;
                   });
}

Var sigmoid(const Var& x) {
  Tensor t(x->val.shape());
  t.array() = 1.0 / (1.0 + (-x->val.array()).exp());
  return make_node(std::move(t), {x},
                   [](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, mul(self, addc(neg(self), 1.0)));
                     return r;
                   });
}

Var log_op(const Var& x) {
  Tensor t(x->val.shape());
  t.array() = x->val.array().log();
  return make_node(std::move(t), {x},
                   [](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, pow_const(self->inputs[0], -1.0));
                     return r;
                   });
}

Var abs_op(const Var& x) {
  Tensor t(x->val.shape());
  t.array() = x->val.array().abs();
  return make_node(std::move(t), {x},
                   [](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, sign_mask(self->inputs[0]));
                     return r;
                   });
}

Var pow_const(const Var& x, double p) {
  Tensor t(x->val.shape());
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = std::pow(x->val[i], p);
  return make_node(std::move(t), {x},
                   [p](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, mulc(pow_const(self->inputs[0], p - 1.0), p));
                     return r;
                   });
}

Var sqrt_op(const Var& x) { return pow_const(x, 0.5); }

Var square(const Var& x) { return pow_const(x, 2.0); }

Var clamp(const Var& x, double lo, double hi) {
  Tensor t(x->val.shape());
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = std::min(hi, std::max(lo, x->val[i]));
  return make_node(std::move(t), {x},
                   [lo, hi](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = mul(g, range_mask(self->inputs[0], lo, hi));
                     return r;
                   });
}

Var sum_all(const Var& x) {
  Tensor t = Tensor::scalar(x->val.array().sum());
  Shape orig = x->val.shape();
  return make_node(std::move(t), {x},
                   [orig](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = broadcast_from_scalar(g, orig);
                     return r;
                   });
}

Var mean_all(const Var& x) { return mulc(sum_all(x), 1.0 / static_cast<double>(x->val.numel())); }

Var broadcast_from_scalar(const Var& s, Shape shape) {
  if (s->val.numel() != 1) throw ShapeError("broadcast_from_scalar expects a scalar");
  Tensor t(shape, s->val[0]);
  return make_node(std::move(t), {s},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = sum_all(g);
                     return r;
                   });
}

Var sum_cols(const Var& x) {
  require_rank(x->val, 2, "sum_cols");
  int B = x->val.dim(0), R = x->val.dim(1);
  Tensor t(Shape{B});
  for (int b = 0; b < B; ++b) {
    double acc = 0.0;
    const double* row = x->val.data() + static_cast<std::int64_t>(b) * R;
    for (int j = 0; j < R; ++j) acc += row[j];
    t[b] = acc;
  }
  return make_node(std::move(t), {x},
                   [R](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = broadcast_cols(g, R);
                     return r;
                   });
}

Var broadcast_cols(const Var& x, int cols) {
  require_rank(x->val, 1, "broadcast_cols");
  int B = x->val.dim(0);
  Tensor t(Shape{B, cols});
  for (int b = 0; b < B; ++b)
    for (int j = 0; j < cols; ++j) t[static_cast<std::int64_t>(b) * cols + j] = x->val[b];
  return make_node(std::move(t), {x},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = sum_cols(g);
                     return r;
                   });
}

Var sum_rows(const Var& x) {
  require_rank(x->val, 2, "sum_rows");
  int B = x->val.dim(0), D = x->val.dim(1);
  Tensor t(Shape{D});
  for (int b = 0; b < B; ++b) {
    const double* row = x->val.data() + static_cast<std::int64_t>(b) * D;
    for (int j = 0; j < D; ++j) t[j] += row[j];
  }
  return make_node(std::move(t), {x},
                   [B](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = broadcast_rows(g, B);
                     return r;
                   });
}

Var broadcast_rows(const Var& x, int rows) {
  require_rank(x->val, 1, "broadcast_rows");
  int D = x->val.dim(0);
  Tensor t(Shape{rows, D});
  for (int b = 0; b < rows; ++b)
    std::memcpy(t.data() + static_cast<std::int64_t>(b) * D, x->val.data(), sizeof(double) * static_cast<std::size_t>(D));
  return make_node(std::move(t), {x},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = sum_rows(g);
                     return r;
                   });
}

Var channel_sum(const Var& x) {
  require_rank(x->val, 4, "channel_sum");
  int N = x->val.dim(0), C = x->val.dim(1), H = x->val.dim(2), W = x->val.dim(3);
  Tensor t(Shape{C});
  std::int64_t hw = static_cast<std::int64_t>(H) * W;
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c) {
      const double* p = x->val.data() + (static_cast<std::int64_t>(n) * C + c) * hw;
      double acc = 0.0;
      for (std::int64_t i = 0; i < hw; ++i) acc += p[i];
      t[c] += acc;
    }
  return make_node(std::move(t), {x},
                   [N, H, W](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = broadcast_channel(g, N, H, W);
                     return r;
                   });
}

Var broadcast_channel(const Var& x, int n, int h, int w) {
  require_rank(x->val, 1, "broadcast_channel");
  int C = x->val.dim(0);
  Tensor t(Shape{n, C, h, w});
  std::int64_t hw = static_cast<std::int64_t>(h) * w;
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < C; ++c) {
      double* p = t.data() + (static_cast<std::int64_t>(b) * C + c) * hw;
      double v = x->val[c];
      for (std::int64_t i = 0; i < hw; ++i) p[i] = v;
    }
  return make_node(std::move(t), {x},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = channel_sum(g);
                     return r;
                   });
}

Var tile_spatial(const Var& x, int h, int w) {
  require_rank(x->val, 2, "tile_spatial");
  int B = x->val.dim(0), D = x->val.dim(1);
  Tensor t(Shape{B, D, h, w});
  std::int64_t hw = static_cast<std::int64_t>(h) * w;
  for (int b = 0; b < B; ++b)
    for (int d = 0; d < D; ++d) {
      double v = x->val[static_cast<std::int64_t>(b) * D + d];
      double* p = t.data() + (static_cast<std::int64_t>(b) * D + d) * hw;
      for (std::int64_t i = 0; i < hw; ++i) p[i] = v;
    }
  return make_node(std::move(t), {x},
                   [](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = spatial_sum(g);
                     return r;
                   });
}

Var spatial_sum(const Var& x) {
  require_rank(x->val, 4, "spatial_sum");
  int B = x->val.dim(0), D = x->val.dim(1), H = x->val.dim(2), W = x->val.dim(3);
  Tensor t(Shape{B, D});
  std::int64_t hw = static_cast<std::int64_t>(H) * W;
  for (int b = 0; b < B; ++b)
    for (int d = 0; d < D; ++d) {
      const double* p = x->val.data() + (static_cast<std::int64_t>(b) * D + d) * hw;
      double acc = 0.0;
      for (std::int64_t i = 0; i < hw; ++i) acc += p[i];
      t[static_cast<std::int64_t>(b) * D + d] = acc;
    }
  return make_node(std::move(t), {x},
                   [H, W](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = tile_spatial(g, H, W);
                     return r;
                   });
}

Var reshape(const Var& x, Shape shape) {
  if (shape_numel(shape) != x->val.numel())
    throw ShapeError("reshape element count mismatch: " + shape_str(x->val.shape()) + " -> " + shape_str(shape));
  Tensor t(shape);
  std::memcpy(t.data(), x->val.data(), sizeof(double) * static_cast<std::size_t>(t.numel()));
  Shape orig = x->val.shape();
  return make_node(std::move(t), {x},
                   [orig](const Var&, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (need[0]) r[0] = reshape(g, orig);
                     return r;
                   });
}

namespace {

// Shared geometry for axis-1 concat/slice over rank-2 or rank-4 tensors:
// outer = dim 0, inner = product of dims after axis 1.
void axis1_geometry(const Tensor& t, std::int64_t& outer, std::int64_t& inner) {
  if (t.rank() != 2 && t.rank() != 4) throw ShapeError("axis-1 op expects rank 2 or 4");
  outer = t.dim(0);
  inner = 1;
  for (int i = 2; i < t.rank(); ++i) inner *= t.dim(i);
}

}  // namespace

Var concat_axis1(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_axis1 with no inputs");
  const Tensor& first = parts[0]->val;
  std::int64_t outer, inner;
  axis1_geometry(first, outer, inner);
  int total = 0;
  for (const auto& p : parts) {
    const Tensor& t = p->val;
    if (t.rank() != first.rank() || t.dim(0) != first.dim(0))
      throw ShapeError("concat_axis1 outer-shape mismatch");
    for (int i = 2; i < t.rank(); ++i)
      if (t.dim(i) != first.dim(i)) throw ShapeError("concat_axis1 trailing-shape mismatch");
    total += t.dim(1);
  }
  Shape out_shape = first.shape();
  out_shape[1] = total;
  Tensor out(out_shape);
  std::int64_t row_out = static_cast<std::int64_t>(total) * inner;
  std::int64_t off = 0;
  std::vector<int> widths;
  for (const auto& p : parts) {
    std::int64_t w = static_cast<std::int64_t>(p->val.dim(1)) * inner;
    for (std::int64_t b = 0; b < outer; ++b)
      std::memcpy(out.data() + b * row_out + off, p->val.data() + b * w, sizeof(double) * static_cast<std::size_t>(w));
    widths.push_back(p->val.dim(1));
    off += w;
  }
  return make_node(std::move(out), parts,
                   [widths](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(self->inputs.size());
                     int start = 0;
                     for (std::size_t i = 0; i < widths.size(); ++i) {
                       if (need[i]) r[i] = slice_axis1(g, start, widths[i]);
                       start += widths[i];
                     }
                     return r;
                   });
}

Var slice_axis1(const Var& x, int start, int len) {
  const Tensor& t = x->val;
  std::int64_t outer, inner;
  axis1_geometry(t, outer, inner);
  int C = t.dim(1);
  if (start < 0 || len <= 0 || start + len > C) throw ShapeError("slice_axis1 out of range");
  Shape out_shape = t.shape();
  out_shape[1] = len;
  Tensor out(out_shape);
  std::int64_t row_in = static_cast<std::int64_t>(C) * inner;
  std::int64_t row_out = static_cast<std::int64_t>(len) * inner;
  for (std::int64_t b = 0; b < outer; ++b)
    std::memcpy(out.data() + b * row_out, t.data() + b * row_in + static_cast<std::int64_t>(start) * inner,
                sizeof(double) * static_cast<std::size_t>(row_out));
  int before = start, after = C - start - len;
  return make_node(std::move(out), {x},
                   [before, after](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(1);
                     if (!need[0]) return r;
                     Shape gs = g->val.shape();
                     std::vector<Var> parts;
                     if (before > 0) {
                       Shape s = gs;
                       s[1] = before;
                       parts.push_back(constant(Tensor(s)));
                     }
                     parts.push_back(g);
                     if (after > 0) {
                       Shape s = gs;
                       s[1] = after;
                       parts.push_back(constant(Tensor(s)));
                     }
                     r[0] = parts.size() == 1 ? g : concat_axis1(parts);
                     (void)self;
                     return r;
                   });
}

Var matmul(const Var& a, const Var& b, bool trans_a, bool trans_b) {
  require_rank(a->val, 2, "matmul a");
  require_rank(b->val, 2, "matmul b");
  int am = a->val.dim(0), an = a->val.dim(1);
  int bm = b->val.dim(0), bn = b->val.dim(1);
  int m = trans_a ? an : am, k = trans_a ? am : an;
  int k2 = trans_b ? bn : bm, n = trans_b ? bm : bn;
  if (k != k2) throw ShapeError("matmul inner-dimension mismatch");
  Tensor out({m, n});
  auto A = a->val.matrix(am, an);
  auto B = b->val.matrix(bm, bn);
  auto C = out.matrix(m, n);
  if (!trans_a && !trans_b)
    C.noalias() = A * B;
  else if (trans_a && !trans_b)
    C.noalias() = A.transpose() * B;
  else if (!trans_a && trans_b)
    C.noalias() = A * B.transpose();
  else
    C.noalias() = A.transpose() * B.transpose();
  return make_node(std::move(out), {a, b},
                   [trans_a, trans_b](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     const Var& av = self->inputs[0];
                     const Var& bv = self->inputs[1];
                     if (need[0])
                       r[0] = trans_a ? matmul(bv, g, trans_b, true) : matmul(g, bv, false, !trans_b);
                     if (need[1])
                       r[1] = trans_b ? matmul(g, av, true, trans_a) : matmul(av, g, !trans_a, false);
                     return r;
                   });
}

Var conv2d(const Var& x, const Var& w, int stride, int pad) {
  Tensor out = conv2d_fwd(x->val, w->val, stride, pad);
  int H = x->val.dim(2), W = x->val.dim(3), k = w->val.dim(2);
  return make_node(std::move(out), {x, w},
                   [stride, pad, H, W, k](const Var& self, const Var& g, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     if (need[0]) r[0] = conv2d_igrad(g, self->inputs[1], stride, pad, H, W);
                     if (need[1]) r[1] = conv2d_wgrad(self->inputs[0], g, stride, pad, k);
                     return r;
                   });
}

Var conv2d_igrad(const Var& g, const Var& w, int stride, int pad, int out_h, int out_w) {
  Tensor out = conv2d_igrad_fwd(g->val, w->val, stride, pad, out_h, out_w);
  int k = w->val.dim(2);
  return make_node(std::move(out), {g, w},
                   [stride, pad, k](const Var& self, const Var& gg, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     if (need[0]) r[0] = conv2d(gg, self->inputs[1], stride, pad);
                     if (need[1]) r[1] = conv2d_wgrad(gg, self->inputs[0], stride, pad, k);
                     return r;
                   });
}

Var conv2d_wgrad(const Var& x, const Var& g, int stride, int pad, int k) {
  Tensor out = conv2d_wgrad_fwd(x->val, g->val, stride, pad, k);
  int H = x->val.dim(2), W = x->val.dim(3);
  return make_node(std::move(out), {x, g},
                   [stride, pad, H, W](const Var& self, const Var& gw, const std::vector<char>& need) {
                     std::vector<Var> r(2);
                     if (need[0]) r[0] = conv2d_igrad(self->inputs[1], gw, stride, pad, H, W);
                     if (need[1]) r[1] = conv2d(self->inputs[0], gw, stride, pad);
                     return r;
                   });
}

GradMap backward(const Var& root, const std::vector<Var>& wrt) {
  if (root->val.numel() != 1) throw ShapeError("backward root must be a scalar");

  std::unordered_set<const Node*> wrt_set;
  for (const auto& v : wrt) wrt_set.insert(v.get());

  // needs[n]: n lies on a path from root to some wrt node.
  std::unordered_map<const Node*, char> needs;
  std::function<char(const Node*)> compute_needs = [&](const Node* n) -> char {
    auto it = needs.find(n);
    if (it != needs.end()) return it->second;
    char v = wrt_set.count(n) ? 1 : 0;
    if (!v)
      for (const auto& in : n->inputs)
        if (in->requires_grad && compute_needs(in.get())) v = 1;  // keep going: memoize children too
    needs[n] = v;
    return v;
  };
  compute_needs(root.get());

  // Reverse-topological order. Creation ids are a valid topological order of
  // the DAG (inputs always predate consumers), so a sort by id suffices.
  std::vector<Var> order;
  std::unordered_set<const Node*> seen;
  std::function<void(const Var&)> gather = [&](const Var& n) {
    if (seen.count(n.get()) || !needs[n.get()]) return;
    seen.insert(n.get());
    order.push_back(n);
    for (const auto& in : n->inputs)
      if (in->requires_grad && needs.count(in.get()) && needs[in.get()]) gather(in);
  };
  if (needs[root.get()]) gather(root);
  std::sort(order.begin(), order.end(), [](const Var& a, const Var& b) { return a->id > b->id; });

  GradMap grads;
  grads[root.get()] = constant(Tensor::scalar(1.0));
  for (const auto& n : order) {
    auto git = grads.find(n.get());
    if (git == grads.end() || !n->vjp) continue;
    const Var& g = git->second;
    std::vector<char> need(n->inputs.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < n->inputs.size(); ++i) {
      const auto& in = n->inputs[i];
      if (in->requires_grad && needs.count(in.get()) && needs[in.get()]) {
        need[i] = 1;
        any = true;
      }
    }
    if (!any) continue;
    auto gs = n->vjp(n, g, need);
    for (std::size_t i = 0; i < n->inputs.size(); ++i) {
      if (!need[i] || !gs[i]) continue;
      const Node* key = n->inputs[i].get();
      auto it = grads.find(key);
      if (it == grads.end())
        grads.emplace(key, gs[i]);
      else
        it->second = add(it->second, gs[i]);
    }
  }
  return grads;
}

}  // namespace textpose::nn
