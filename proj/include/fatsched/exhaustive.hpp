#pragma once

#include <cstddef>
#include <span>

#include "fatsched/scheduler.hpp"

namespace fatsched {

struct ExhaustiveResult {
  Combination best;
  std::size_t combinations = 0;
};

// Scores every assignment in the full product of path choices for `flows`
// against `reference` and returns the best under the variant's ranking.
// Cost grows as the product of path counts; meant for small instances.
ExhaustiveResult exhaustive_search(const FatTreeTopology& topo, const PowerProfile& profile,
                                   Variant v, const NetworkState& reference,
                                   std::span<const FlowRequest> flows,
                                   std::size_t max_combinations = 1u << 16);

}  // namespace fatsched
