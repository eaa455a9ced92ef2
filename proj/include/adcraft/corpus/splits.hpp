#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "adcraft/corpus/pairs.hpp"

namespace adcraft::corpus {

enum class SplitMode { kVanilla, kColdStart };

std::string_view split_mode_name(SplitMode mode);
SplitMode parse_split_mode(std::string_view name);

struct Proportions {
  double train = 0.77;
  double test = 0.20;
  double val = 0.03;
};

struct DatasetSplit {
  std::vector<CreativePair> train;
  std::vector<CreativePair> test;
  std::vector<CreativePair> val;
  SplitMode mode = SplitMode::kVanilla;
  std::uint64_t seed = 0;
};

// Vanilla: seeded shuffle, then contiguous cuts of round(p * n).
// Cold-start: advertisers, largest pair count first, each go whole to the
// split currently furthest below its target size. Throws ContractError if
// proportions do not sum to 1, or for cold-start with fewer than 3 advertisers.
DatasetSplit make_splits(const std::vector<CreativePair>& pairs, SplitMode mode,
                         const Proportions& proportions, std::uint64_t seed);

}  // namespace adcraft::corpus
