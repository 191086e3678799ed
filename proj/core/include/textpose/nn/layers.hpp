#pragma once

#include <string>
#include <vector>

#include "textpose/nn/graph.hpp"
#include "textpose/rng.hpp"

namespace textpose::nn {

// Ordered registry of named parameters and buffers. Construction order is
// deterministic and doubles as the checkpoint block order. Buffers (batch
// norm running stats) are saved and loaded but never stepped by optimizers.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Var var;
    bool trainable;
  };

  Var param(const std::string& name, Tensor init);
  Var buffer(const std::string& name, Tensor init);

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Var> trainable() const;
  Var find(const std::string& name) const;  // throws if absent
  std::int64_t count_values() const;

 private:
  std::vector<Entry> entries_;
};

// Weight init used across all four networks: N(0, 0.02) draws.
Tensor normal_init(Shape shape, Rng& rng, double stddev = 0.02);

struct Linear {
  Var W;  // [out, in]
  Var b;  // [out], may be null
  Var forward(const Var& x) const;  // [B, in] -> [B, out]
};
Linear make_linear(ParamSet& ps, const std::string& prefix, int in, int out, Rng& rng, bool bias = true);

struct Conv2dLayer {
  Var W;  // [out_ch, in_ch, k, k]
  Var b;  // [out_ch], may be null
  int stride = 1, pad = 0;
  Var forward(const Var& x) const;
};
Conv2dLayer make_conv(ParamSet& ps, const std::string& prefix, int in_ch, int out_ch, int k, int stride,
                      int pad, Rng& rng, bool bias = true);

struct ConvT2dLayer {
  Var W;  // [in_ch, out_ch, k, k]
  Var b;  // [out_ch], may be null
  int stride = 1, pad = 0;
  Var forward(const Var& x) const;  // output size (h-1)*s - 2p + k
};
ConvT2dLayer make_convt(ParamSet& ps, const std::string& prefix, int in_ch, int out_ch, int k, int stride,
                        int pad, Rng& rng, bool bias = true);

// Batch norm over N,H,W per channel. Training mode uses batch statistics and
// refreshes the running buffers in place; eval mode reads the buffers.
struct BatchNorm {
  Var gamma, beta;
  Var run_mean, run_var;  // buffers
  double eps = 1e-5;
  double momentum = 0.1;
  Var forward(const Var& x, bool training) const;
};
BatchNorm make_batchnorm(ParamSet& ps, const std::string& prefix, int channels);

// conv-BN-ReLU-conv-BN plus identity skip, ReLU after the join.
struct ResidualBlock {
  Conv2dLayer c1, c2;
  BatchNorm n1, n2;
  Var forward(const Var& x, bool training) const;
};
ResidualBlock make_residual(ParamSet& ps, const std::string& prefix, int channels, Rng& rng);

}  // namespace textpose::nn
