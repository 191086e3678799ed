#include "textpose/nn/layers.hpp"

#include "textpose/errors.hpp"

namespace textpose::nn {

Var ParamSet::param(const std::string& name, Tensor init) {
  auto v = leaf(std::move(init), true);
  entries_.push_back({name, v, true});
  return v;
}

Var ParamSet::buffer(const std::string& name, Tensor init) {
  auto v = leaf(std::move(init), false);
  entries_.push_back({name, v, false});
  return v;
}

std::vector<Var> ParamSet::trainable() const {
  std::vector<Var> out;
  for (const auto& e : entries_)
    if (e.trainable) out.push_back(e.var);
  return out;
}

Var ParamSet::find(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e.var;
  throw Error("no parameter named '" + name + "'");
}

std::int64_t ParamSet::count_values() const {
  std::int64_t n = 0;
  for (const auto& e : entries_) n += e.var->val.numel();
  return n;
}

Tensor normal_init(Shape shape, Rng& rng, double stddev) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.gaussian(0.0, stddev);
  return t;
}

Var Linear::forward(const Var& x) const {
  Var y = matmul(x, W, false, true);
  if (b) y = add(y, broadcast_rows(b, x->val.dim(0)));
  return y;
}

Linear make_linear(ParamSet& ps, const std::string& prefix, int in, int out, Rng& rng, bool bias) {
  Linear l;
  l.W = ps.param(prefix + ".W", normal_init({out, in}, rng));
  if (bias) l.b = ps.param(prefix + ".b", Tensor(Shape{out}));
  return l;
}

Var Conv2dLayer::forward(const Var& x) const {
  Var y = conv2d(x, W, stride, pad);
  if (b) y = add(y, broadcast_channel(b, y->val.dim(0), y->val.dim(2), y->val.dim(3)));
  return y;
}

Conv2dLayer make_conv(ParamSet& ps, const std::string& prefix, int in_ch, int out_ch, int k, int stride,
                      int pad, Rng& rng, bool bias) {
  Conv2dLayer c;
  c.W = ps.param(prefix + ".W", normal_init({out_ch, in_ch, k, k}, rng));
  if (bias) c.b = ps.param(prefix + ".b", Tensor(Shape{out_ch}));
  c.stride = stride;
  c.pad = pad;
  return c;
}

Var ConvT2dLayer::forward(const Var& x) const {
  int k = W->val.dim(2);
  int oh = (x->val.dim(2) - 1) * stride - 2 * pad + k;
  int ow = (x->val.dim(3) - 1) * stride - 2 * pad + k;
  Var y = conv2d_igrad(x, W, stride, pad, oh, ow);
  if (b) y = add(y, broadcast_channel(b, y->val.dim(0), oh, ow));
  return y;
}

ConvT2dLayer make_convt(ParamSet& ps, const std::string& prefix, int in_ch, int out_ch, int k, int stride,
                        int pad, Rng& rng, bool bias) {
  ConvT2dLayer c;
  c.W = ps.param(prefix + ".W", normal_init({in_ch, out_ch, k, k}, rng));
  if (bias) c.b = ps.param(prefix + ".b", Tensor(Shape{out_ch}));
  c.stride = stride;
  c.pad = pad;
  return c;
}

Var BatchNorm::forward(const Var& x, bool training) const {
  require_rank(x->val, 4, "batchnorm input");
  int N = x->val.dim(0), H = x->val.dim(2), W = x->val.dim(3);
  double inv = 1.0 / (static_cast<double>(N) * H * W);
  Var mean_v, var_v;
  if (training) {
    mean_v = mulc(channel_sum(x), inv);
    Var xc = sub(x, broadcast_channel(mean_v, N, H, W));
    var_v = mulc(channel_sum(square(xc)), inv);
    // Refresh running stats from the already-computed batch moments.
    auto& rm = run_mean->val;
    auto& rv = run_var->val;
    rm.array() = (1.0 - momentum) * rm.array() + momentum * mean_v->val.array();
    rv.array() = (1.0 - momentum) * rv.array() + momentum * var_v->val.array();
    Var istd = pow_const(addc(var_v, eps), -0.5);
    Var xhat = mul(xc, broadcast_channel(istd, N, H, W));
    return add(mul(xhat, broadcast_channel(gamma, N, H, W)), broadcast_channel(beta, N, H, W));
  }
  Var xc = sub(x, broadcast_channel(run_mean, N, H, W));
  Var istd = pow_const(addc(run_var, eps), -0.5);
  Var xhat = mul(xc, broadcast_channel(istd, N, H, W));
  return add(mul(xhat, broadcast_channel(gamma, N, H, W)), broadcast_channel(beta, N, H, W));
}

BatchNorm make_batchnorm(ParamSet& ps, const std::string& prefix, int channels) {
  BatchNorm bn;
  bn.gamma = ps.param(prefix + ".gamma", Tensor(Shape{channels}, 1.0));
  bn.beta = ps.param(prefix + ".beta", Tensor(Shape{channels}));
  bn.run_mean = ps.buffer(prefix + ".running_mean", Tensor(Shape{channels}));
  bn.run_var = ps.buffer(prefix + ".running_var", Tensor(Shape{channels}, 1.0));
  return bn;
}

Var ResidualBlock::forward(const Var& x, bool training) const {
  Var h = relu(n1.forward(c1.forward(x), training));
  h = n2.forward(c2.forward(h), training);
  return relu(add(h, x));
}

ResidualBlock make_residual(ParamSet& ps, const std::string& prefix, int channels, Rng& rng) {
  ResidualBlock r;
  r.c1 = make_conv(ps, prefix + ".c1", channels, channels, 3, 1, 1, rng, /*bias=*/false);
  r.n1 = make_batchnorm(ps, prefix + ".n1", channels);
  r.c2 = make_conv(ps, prefix + ".c2", channels, channels, 3, 1, 1, rng, /*bias=*/false);
  r.n2 = make_batchnorm(ps, prefix + ".n2", channels);
  return r;
}

}  // namespace textpose::nn
