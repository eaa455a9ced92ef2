#pragma once

// Finite-difference check of every trainable tensor of both models on small
// random instances.

#include <cstdint>
#include <string>
#include <vector>

#include "adcraft/tensor/grad_check.hpp"

namespace adcraft::cli {

struct SuiteResult {
  std::string model;  // "generator", "generator-nocopy", "ranker"
  tensor::GradCheckReport report;
};

std::vector<SuiteResult> gradient_suite(std::uint64_t seed,
                                        const tensor::GradCheckOptions& options = {});

}  // namespace adcraft::cli
