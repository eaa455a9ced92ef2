#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adcraft/tensor/tensor.hpp"

namespace adcraft::tensor {

using NamedTensor = std::pair<std::string, Tensor>;

struct ParamCheck {
  std::string name;
  std::size_t elements = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::vector<std::size_t> flagged;  // elements above tolerance
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_rel_error < tolerance; }
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // |analytic - numeric| / max(|analytic|, |numeric|, scale_floor)
  double scale_floor = 1e-6;
};

double relative_error(double analytic, double numeric, double scale_floor);

// Compares reverse-mode gradients of the scalar `f` against central
// differences for every element of every parameter that requires grad.
// Frozen parameters are left out of the report. Throws OracleError when two
// evaluations of `f` at the same point disagree.
GradCheckReport grad_check(const std::function<Tensor()>& f, std::span<NamedTensor> params,
                           const GradCheckOptions& options = {});

}  // namespace adcraft::tensor
