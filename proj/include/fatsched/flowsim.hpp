#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "fatsched/topology.hpp"
#include "fatsched/types.hpp"

namespace fatsched {

enum class FlowState { Pending, Running, Done };

struct Flow {
  FlowId id = 0;
  HostId src = 0;
  HostId dst = 0;
  std::optional<Path> path;
  double volume_bytes = 0.0;
  double remaining_bytes = 0.0;
  FlowState state = FlowState::Pending;
};

// flow id -> installed path
using Assignment = std::map<FlowId, Path>;

// flow id -> rate in bits/second
using Allocation = std::map<FlowId, double>;

// Max-min fair rates by progressive filling: repeatedly find the channel with
// the smallest equal share of its residual capacity, fix that share for every
// unfixed flow crossing it, and charge those flows to the rest of their paths.
// Links are full duplex; each direction has the full link capacity.
Allocation max_min_allocate(const FatTreeTopology& topo, const Assignment& flows);

// Per-channel carried rate for the given allocation.
std::vector<double> channel_loads(const FatTreeTopology& topo, const Assignment& flows,
                                  const Allocation& rates);

// For every switch, one factor per port (ordered as switch_ports()): the
// busier direction's carried rate divided by the link rate.
std::vector<std::vector<double>> utilization_factors(const FatTreeTopology& topo,
                                                     const Assignment& flows,
                                                     const Allocation& rates);

struct TtcResult {
  std::map<FlowId, double> completion_s;
  std::map<FlowId, double> delivered_bytes;  // integral of rate over time / 8
  std::size_t events = 0;
};

using CompletionHook = std::function<void(FlowId, double /*time_s*/)>;

// All flows start at t = 0. Rates are recomputed after every completion.
// Flows must carry a path; their remaining bytes are consumed in place.
TtcResult simulate_ttc(const FatTreeTopology& topo, std::vector<Flow>& flows,
                       const CompletionHook& on_complete = {});

}  // namespace fatsched
