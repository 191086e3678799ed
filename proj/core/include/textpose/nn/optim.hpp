#pragma once

#include <vector>

#include "textpose/nn/graph.hpp"
#include "textpose/nn/layers.hpp"

namespace textpose::nn {

// Optimizers mutate the parameter leaves in place. Grad lookup is by node;
// parameters missing from the map are treated as zero-gradient and skipped.

class Sgd {
 public:
  Sgd(std::vector<Var> params, double lr) : params_(std::move(params)), lr_(lr) {}
  void step(const GradMap& grads);

 private:
  std::vector<Var> params_;
  double lr_;
};

class Adam {
 public:
  Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps = 1e-8,
       double weight_decay = 0.0);
  void step(const GradMap& grads);

 private:
  std::vector<Var> params_;
  std::vector<Tensor> m_, v_;
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  std::int64_t t_ = 0;
};

}  // namespace textpose::nn
