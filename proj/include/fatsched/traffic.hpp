#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fatsched/topology.hpp"
#include "fatsched/types.hpp"

namespace fatsched {

struct TrafficScenario {
  std::vector<FlowRequest> requests;  // arrival order; id == index
  std::uint64_t seed = 0;
  double utilization_rate = 1.0;

  bool operator==(const TrafficScenario&) const = default;
};

// Number of flows at a utilization rate: round(rate * hosts / 2).
std::size_t one_to_one_flow_count(const FatTreeTopology& topo, double utilization_rate);

// Pairs every host with a host in another pod. Hosts are visited in id order;
// each unpaired host picks a uniformly random unpaired partner outside its
// pod. A dead end (only same-pod hosts left) restarts the pairing with the
// generator state carried forward. The first `flow_count` pairs are kept,
// defaulting to one_to_one_flow_count().
TrafficScenario generate_one_to_one_far(const FatTreeTopology& topo, std::uint64_t seed,
                                        double utilization_rate, double volume_bytes,
                                        std::optional<std::size_t> flow_count = std::nullopt);

nlohmann::json scenario_to_json(const TrafficScenario& scenario);
TrafficScenario scenario_from_json(const nlohmann::json& j);
void save_scenario(const TrafficScenario& scenario, const std::filesystem::path& file);
TrafficScenario load_scenario(const std::filesystem::path& file);

}  // namespace fatsched
