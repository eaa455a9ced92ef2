#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "adcraft/tensor/tensor.hpp"

namespace adcraft::tensor {

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view optimizer_name(OptimizerKind kind);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// SGD or bias-corrected Adam over a fixed parameter list. Moments are kept
// per parameter in the order the parameters were registered.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::vector<Tensor> params,
            AdamConfig adam = {});

  // Applies one update from the accumulated grads, then zeroes them.
  // Throws ContractError if any parameter has no gradient.
  void step();
  void zero_grads();

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr);
  std::uint64_t step_count() const { return steps_; }
  std::span<Tensor> params() { return params_; }

  const std::vector<double>& first_moment(std::size_t i) const { return m_.at(i); }
  const std::vector<double>& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  OptimizerKind kind_;
  double lr_;
  AdamConfig adam_;
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t steps_ = 0;
};

}  // namespace adcraft::tensor
