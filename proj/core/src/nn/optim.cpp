#include "textpose/nn/optim.hpp"

#include <cmath>

namespace textpose::nn {

void Sgd::step(const GradMap& grads) {
  for (auto& p : params_) {
    auto it = grads.find(p.get());
    if (it == grads.end()) continue;
    p->val.array() -= lr_ * it->second->val.array();
  }
}

Adam::Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps, double weight_decay)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), weight_decay_(weight_decay) {
  for (const auto& p : params_) {
    m_.emplace_back(p->val.shape());
    v_.emplace_back(p->val.shape());
  }
}

void Adam::step(const GradMap& grads) {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto it = grads.find(params_[i].get());
    if (it == grads.end()) continue;
    auto& p = params_[i]->val;
    const auto& g = it->second->val;
    auto ga = g.array();
    if (weight_decay_ != 0.0) {
      m_[i].array() = beta1_ * m_[i].array() + (1.0 - beta1_) * (ga + weight_decay_ * p.array());
      v_[i].array() = beta2_ * v_[i].array() +
                      (1.0 - beta2_) * (ga + weight_decay_ * p.array()).square();
    } else {
      m_[i].array() = beta1_ * m_[i].array() + (1.0 - beta1_) * ga;
      v_[i].array() = beta2_ * v_[i].array() + (1.0 - beta2_) * ga.square();
    }
    p.array() -= lr_ * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace textpose::nn
