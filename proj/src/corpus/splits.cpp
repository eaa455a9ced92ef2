#include "adcraft/corpus/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "adcraft/errors.hpp"

namespace adcraft::corpus {

std::string_view split_mode_name(SplitMode mode) {
  return mode == SplitMode::kVanilla ? "vanilla" : "cold_start";
}

SplitMode parse_split_mode(std::string_view name) {
  if (name == "vanilla") return SplitMode::kVanilla;
  if (name == "cold_start" || name == "cold-start") return SplitMode::kColdStart;
  throw ContractError("unknown split mode '" + std::string(name) + "'");
}

DatasetSplit make_splits(const std::vector<CreativePair>& pairs, SplitMode mode,
                         const Proportions& p, std::uint64_t seed) {
  if (std::abs(p.train + p.test + p.val - 1.0) > 1e-9 || p.train < 0 || p.test < 0 || p.val < 0)
    throw ContractError("split proportions must be nonnegative and sum to 1");
  DatasetSplit split;
  split.mode = mode;
  split.seed = seed;
  std::mt19937_64 rng(seed);
  const std::size_t n = pairs.size();

  if (mode == SplitMode::kVanilla) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(p.train * static_cast<double>(n)));
    const auto n_test = std::min(
        n - n_train, static_cast<std::size_t>(std::llround(p.test * static_cast<double>(n))));
    for (std::size_t i = 0; i < n; ++i) {
      const CreativePair& pair = pairs[order[i]];
      if (i < n_train)
        split.train.push_back(pair);
      else if (i < n_train + n_test)
        split.test.push_back(pair);
      else
        split.val.push_back(pair);
    }
    return split;
  }

  std::map<std::string, std::vector<std::size_t>> by_advertiser;
  for (std::size_t i = 0; i < n; ++i) by_advertiser[pairs[i].source.advertiser_id].push_back(i);
  if (by_advertiser.size() < 3)
    throw ContractError("cold-start split needs at least 3 advertisers, got " +
                        std::to_string(by_advertiser.size()));

  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [adv, idx] : by_advertiser) groups.push_back(&idx);
  std::shuffle(groups.begin(), groups.end(), rng);
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto* a, const auto* b) { return a->size() > b->size(); });

  const double targets[3] = {p.train * static_cast<double>(n), p.test * static_cast<double>(n),
                             p.val * static_cast<double>(n)};
  std::vector<CreativePair>* sinks[3] = {&split.train, &split.test, &split.val};
  std::vector<std::size_t> assigned[3];
  for (const auto* g : groups) {
    std::size_t pick = 0;
    double best = -1e300;
    for (std::size_t s = 0; s < 3; ++s) {
      const double deficit = targets[s] - static_cast<double>(assigned[s].size());
      if (deficit > best) {
        best = deficit;
        pick = s;
      }
    }
    assigned[pick].insert(assigned[pick].end(), g->begin(), g->end());
  }
  for (std::size_t s = 0; s < 3; ++s) {
    std::sort(assigned[s].begin(), assigned[s].end());
    for (std::size_t i : assigned[s]) sinks[s]->push_back(pairs[i]);
  }
  return split;
}

}  // namespace adcraft::corpus
