#include "adcraft/tensor/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "adcraft/errors.hpp"

namespace adcraft::tensor {

double relative_error(double analytic, double numeric, double scale_floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), scale_floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const std::function<Tensor()>& f, std::span<NamedTensor> params,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw ContractError("grad_check: step must be positive");
  GradCheckReport report;
  report.tolerance = options.tolerance;

  auto eval = [&f]() {
    NoGradGuard guard;
    return f().item();
  };
  const double base = eval();
  if (eval() != base) throw OracleError("grad_check: function is not deterministic");

  for (auto& [name, p] : params)
    if (p.requires_grad()) p.zero_grad();
  Tape::current().clear();
  backward(f());

  for (auto& [name, p] : params) {
    if (!p.requires_grad()) continue;
    ParamCheck check;
    check.name = name;
    check.elements = p.size();
    const std::vector<double> analytic(p.grad().begin(), p.grad().end());
    auto w = p.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + options.step;
      const double up = eval();
      w[i] = saved - options.step;
      const double down = eval();
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double err = relative_error(analytic[i], numeric, options.scale_floor);
      if (err > options.tolerance) check.flagged.push_back(i);
      if (err > check.max_rel_error || i == 0) {
        if (err >= check.max_rel_error) {
          check.max_rel_error = err;
          check.worst_index = i;
          check.worst_analytic = analytic[i];
          check.worst_numeric = numeric;
        }
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.params.push_back(std::move(check));
  }
  return report;
}

}  // namespace adcraft::tensor
