#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fatsched/flowsim.hpp"
#include "fatsched/power.hpp"
#include "fatsched/topology.hpp"
#include "fatsched/types.hpp"

namespace fatsched {

// LPv1: bw / ((transitions + 1) * power)   maximize
// LPv2: bw / power                          maximize
// LPv3: bw                                  maximize
// LPv4: (transitions + 1) * power           minimize
// SP takes the first shortest path; SmartSP scores like LPv3 but never
// puts switches to sleep.
enum class Variant { LPv1, LPv2, LPv3, LPv4, SP, SmartSP };
enum class Direction { Maximize, Minimize };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
std::span<const Variant> all_variants();
Direction direction(Variant v);
bool sleeps_idle_switches(Variant v);

struct ObjectiveScore {
  double value = 0.0;
  Direction direction = Direction::Maximize;
};

// Units are bits/second and watts; only the induced ordering matters.
ObjectiveScore objective_value(Variant v, double sum_bw, double total_pc, int transition_degree);

struct NetworkState {
  std::vector<SwitchMode> modes;
  Assignment installed;
  Allocation allocation;
  std::vector<std::vector<double>> utilization;  // per switch, per port

  static NetworkState initial(const FatTreeTopology& topo, Variant v);
  std::vector<SwitchPowerState> power_states(const FatTreeTopology& topo) const;
  std::size_t sleeping_count() const;
};

struct Combination {
  Assignment assignment;
  double sum_bw = 0.0;
  double total_pc = 0.0;
  int transition_degree = 0;
  double objective = 0.0;
};

// Switches crossed by any path of the assignment.
std::vector<bool> footprint(const FatTreeTopology& topo, const Assignment& assignment);

// Existing combinations crossed with every path of the new request; with no
// stored combinations, one candidate per path.
std::vector<Assignment> extend_combinations(std::span<const Combination> stored,
                                            const FlowRequest& request,
                                            std::span<const Path> paths);

Combination evaluate_combination(Assignment candidate, const FatTreeTopology& topo,
                                 const PowerProfile& profile, Variant v,
                                 const NetworkState& current);

struct TopSelection {
  std::vector<Combination> kept;
  Combination best;
};

// Strict ranking: objective in the variant's direction, then fewer
// transitions, then lower power, then the lexicographically smallest path
// sequence in flow-id order. keep = nullopt keeps every candidate.
bool ranks_before(const Combination& a, const Combination& b, Variant v);
TopSelection select_top(std::vector<Combination> candidates, Variant v,
                        std::optional<std::size_t> keep = 3);

struct SchedulerOptions {
  Variant variant = Variant::LPv1;
  std::optional<std::size_t> keep_top = 3;  // nullopt disables pruning
};

struct ScheduleDecision {
  FlowId flow = 0;
  Path path;
  std::vector<SwitchId> woken;
  std::vector<SwitchId> slept;
  std::vector<FlowId> rerouted;
  double sum_bw = 0.0;
  double total_pc = 0.0;
  int transition_degree = 0;
  double objective = 0.0;
  std::size_t path_count = 0;
  std::size_t candidates_evaluated = 0;
};

class Scheduler {
 public:
  Scheduler(const FatTreeTopology& topo, PowerProfile profile, SchedulerOptions options = {});

  ScheduleDecision schedule(const FlowRequest& request);
  ScheduleDecision schedule_baseline_sp(const FlowRequest& request);

  // Flow departure: drops the flow everywhere and re-sleeps idle switches.
  void complete(FlowId id);

  Variant variant() const { return options_.variant; }
  const PowerProfile& profile() const { return profile_; }
  const NetworkState& network() const { return network_; }
  const std::vector<Combination>& combinations() const { return combinations_; }
  double total_power() const;

 private:
  void check_request(const FlowRequest& request) const;
  ScheduleDecision install(const Combination& best, FlowId flow);
  void apply(const Assignment& assignment);

  const FatTreeTopology* topo_;
  PowerProfile profile_;
  SchedulerOptions options_;
  NetworkState network_;
  std::vector<Combination> combinations_;
};

}  // namespace fatsched
