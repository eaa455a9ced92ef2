#include "adcraft/tensor/optim.hpp"

#include <cmath>
#include <string>

#include "adcraft/errors.hpp"

namespace adcraft::tensor {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ContractError("unknown optimizer '" + std::string(name) + "' (expected sgd|adam)");
}

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::vector<Tensor> params,
                     AdamConfig adam)
    : kind_(kind), lr_(learning_rate), adam_(adam), params_(std::move(params)) {
  if (!(learning_rate >= 0.0)) throw ContractError("learning rate must be nonnegative");
  if (kind_ == OptimizerKind::kAdam) {
    for (const Tensor& p : params_) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }
}

void Optimizer::set_learning_rate(double lr) {
  if (!(lr >= 0.0)) throw ContractError("learning rate must be nonnegative");
  lr_ = lr;
}

void Optimizer::zero_grads() {
  for (Tensor& p : params_) p.zero_grad();
}

void Optimizer::step() {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (!params_[i].has_grad())
      throw ContractError("optimizer step: parameter " + std::to_string(i) + " of shape " +
                          shape_str(params_[i].shape()) + " has no gradient");
  ++steps_;
  if (kind_ == OptimizerKind::kSgd) {
    for (Tensor& p : params_) {
      auto w = p.mutable_values();
      const auto g = p.grad();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr_ * g[j];
    }
  } else {
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(adam_.beta1, t);
    const double c2 = 1.0 - std::pow(adam_.beta2, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto w = params_[i].mutable_values();
      const auto g = params_[i].grad();
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::size_t j = 0; j < w.size(); ++j) {
        m[j] = adam_.beta1 * m[j] + (1.0 - adam_.beta1) * g[j];
        v[j] = adam_.beta2 * v[j] + (1.0 - adam_.beta2) * g[j] * g[j];
        const double mhat = m[j] / c1;
        const double vhat = v[j] / c2;
        w[j] -= lr_ * mhat / (std::sqrt(vhat) + adam_.epsilon);
      }
    }
  }
  zero_grads();
}

}  // namespace adcraft::tensor
