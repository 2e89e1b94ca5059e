#include "fatsched/exhaustive.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fatsched {

ExhaustiveResult exhaustive_search(const FatTreeTopology& topo, const PowerProfile& profile,
                                   Variant v, const NetworkState& reference,
                                   std::span<const FlowRequest> flows,
                                   std::size_t max_combinations) {
  if (flows.empty()) throw std::invalid_argument("exhaustive search needs at least one flow");
  std::vector<std::vector<Path>> choices;
  std::size_t total = 1;
  for (const FlowRequest& f : flows) {
    choices.push_back(enumerate_paths(topo, f.src, f.dst));
    total *= choices.back().size();
    if (total > max_combinations)
      throw std::length_error("exhaustive search exceeds " + std::to_string(max_combinations) +
                              " combinations");
  }

  ExhaustiveResult out;
  std::vector<std::size_t> pick(flows.size(), 0);
  bool have_best = false;
  for (std::size_t n = 0; n < total; ++n) {
    Assignment a;
    for (std::size_t i = 0; i < flows.size(); ++i) a.emplace(flows[i].id, choices[i][pick[i]]);
    Combination c = evaluate_combination(std::move(a), topo, profile, v, reference);
    if (!have_best || ranks_before(c, out.best, v)) {
      out.best = std::move(c);
      have_best = true;
    }
    ++out.combinations;
    for (std::size_t i = flows.size(); i-- > 0;) {
      if (++pick[i] < choices[i].size()) break;
      pick[i] = 0;
    }
  }
  return out;
}

}  // namespace fatsched
