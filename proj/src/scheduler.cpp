#include "fatsched/scheduler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fatsched {

namespace {

constexpr std::array kVariants{Variant::LPv1, Variant::LPv2,   Variant::LPv3,
                               Variant::LPv4, Variant::SP, Variant::SmartSP};

// Rounds to a 40-bit mantissa so that scores which differ only by summation
// order compare equal and fall through to the tie-breakers.
double snap(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  return std::ldexp(std::round(std::ldexp(mant, 40)), exp - 40);
}

std::vector<SwitchPowerState> make_power_states(const FatTreeTopology& topo,
                                                const std::vector<SwitchMode>& modes,
                                                const std::vector<std::vector<double>>& util) {
  std::vector<SwitchPowerState> states(topo.switches().size());
  for (const Switch& sw : topo.switches()) {
    SwitchPowerState& st = states[sw.id];
    st.mode = modes[sw.id];
    const auto ports = topo.switch_ports(sw.id);
    st.ports.reserve(ports.size());
    for (std::size_t p = 0; p < ports.size(); ++p)
      st.ports.push_back({topo.link_at(ports[p]).capacity_bps,
                          st.mode == SwitchMode::Active ? util[sw.id][p] : 0.0});
  }
  return states;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::LPv1: return "lpv1";
    case Variant::LPv2: return "lpv2";
    case Variant::LPv3: return "lpv3";
    case Variant::LPv4: return "lpv4";
    case Variant::SP: return "sp";
    case Variant::SmartSP: return "smart-sp";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : kVariants)
    if (to_string(v) == name) return v;
  return std::nullopt;
}

std::span<const Variant> all_variants() { return kVariants; }

Direction direction(Variant v) {
  return v == Variant::LPv4 ? Direction::Minimize : Direction::Maximize;
}

bool sleeps_idle_switches(Variant v) { return v != Variant::SP && v != Variant::SmartSP; }

ObjectiveScore objective_value(Variant v, double sum_bw, double total_pc, int transition_degree) {
  if (!(total_pc > 0.0))
    throw std::invalid_argument("total power must be positive; check the power profile");
  if (sum_bw < 0.0 || transition_degree < 0)
    throw std::invalid_argument("bandwidth and transition degree must be non-negative");
  const double transitions = static_cast<double>(transition_degree) + 1.0;
  switch (v) {
    case Variant::LPv1: return {sum_bw / (transitions * total_pc), Direction::Maximize};
    case Variant::LPv2: return {sum_bw / total_pc, Direction::Maximize};
    case Variant::LPv3:
    case Variant::SmartSP:
    case Variant::SP: return {sum_bw, Direction::Maximize};
    case Variant::LPv4: return {transitions * total_pc, Direction::Minimize};
  }
  throw std::logic_error("unhandled variant");
}

NetworkState NetworkState::initial(const FatTreeTopology& topo, Variant v) {
  NetworkState s;
  s.modes.assign(topo.switches().size(),
                 sleeps_idle_switches(v) ? SwitchMode::Sleeping : SwitchMode::Active);
  s.utilization = utilization_factors(topo, s.installed, s.allocation);
  return s;
}

std::vector<SwitchPowerState> NetworkState::power_states(const FatTreeTopology& topo) const {
  return make_power_states(topo, modes, utilization);
}

std::size_t NetworkState::sleeping_count() const {
  return static_cast<std::size_t>(std::count(modes.begin(), modes.end(), SwitchMode::Sleeping));
}

std::vector<bool> footprint(const FatTreeTopology& topo, const Assignment& assignment) {
  std::vector<bool> used(topo.switches().size(), false);
  for (const auto& [id, path] : assignment)
    for (SwitchId s : path.switches) used.at(s) = true;
  return used;
}

std::vector<Assignment> extend_combinations(std::span<const Combination> stored,
                                            const FlowRequest& request,
                                            std::span<const Path> paths) {
  if (paths.empty())
    throw std::invalid_argument("no path between hosts " + std::to_string(request.src) + " and " +
                                std::to_string(request.dst));
  std::vector<Assignment> out;
  if (stored.empty()) {
    out.reserve(paths.size());
    for (const Path& p : paths) out.push_back(Assignment{{request.id, p}});
    return out;
  }
  out.reserve(stored.size() * paths.size());
  for (const Combination& c : stored) {
    if (c.assignment.contains(request.id))
      throw std::invalid_argument("flow " + std::to_string(request.id) + " is already scheduled");
    for (const Path& p : paths) {
      Assignment a = c.assignment;
      a.emplace(request.id, p);
      out.push_back(std::move(a));
    }
  }
  return out;
}

Combination evaluate_combination(Assignment candidate, const FatTreeTopology& topo,
                                 const PowerProfile& profile, Variant v,
                                 const NetworkState& current) {
  Combination c;
  c.assignment = std::move(candidate);
  const Allocation rates = max_min_allocate(topo, c.assignment);
  for (const auto& [id, r] : rates) c.sum_bw += r;

  const std::vector<bool> used = footprint(topo, c.assignment);
  std::vector<SwitchMode> modes(used.size(), SwitchMode::Active);
  for (std::size_t s = 0; s < used.size(); ++s) {
    if (used[s] && current.modes.at(s) == SwitchMode::Sleeping) ++c.transition_degree;
    if (!used[s] && sleeps_idle_switches(v)) modes[s] = SwitchMode::Sleeping;
  }
  const auto util = utilization_factors(topo, c.assignment, rates);
  c.total_pc = network_power(profile, make_power_states(topo, modes, util));
  c.objective = objective_value(v, c.sum_bw, c.total_pc, c.transition_degree).value;
  return c;
}

bool ranks_before(const Combination& a, const Combination& b, Variant v) {
  const double oa = snap(a.objective);
  const double ob = snap(b.objective);
  if (oa != ob) return direction(v) == Direction::Maximize ? oa > ob : oa < ob;
  if (a.transition_degree != b.transition_degree)
    return a.transition_degree < b.transition_degree;
  const double pa = snap(a.total_pc);
  const double pb = snap(b.total_pc);
  if (pa != pb) return pa < pb;
  return std::lexicographical_compare(
      a.assignment.begin(), a.assignment.end(), b.assignment.begin(), b.assignment.end(),
      [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second.switches < y.second.switches;
      });
}

TopSelection select_top(std::vector<Combination> candidates, Variant v,
                        std::optional<std::size_t> keep) {
  if (candidates.empty()) throw std::invalid_argument("no candidate combinations to select from");
  std::sort(candidates.begin(), candidates.end(),
            [v](const Combination& a, const Combination& b) { return ranks_before(a, b, v); });
  if (keep && candidates.size() > *keep) candidates.resize(*keep);
  TopSelection sel;
  sel.best = candidates.front();
  sel.kept = std::move(candidates);
  return sel;
}

Scheduler::Scheduler(const FatTreeTopology& topo, PowerProfile profile, SchedulerOptions options)
    : topo_(&topo),
      profile_(std::move(profile)),
      options_(options),
      network_(NetworkState::initial(topo, options.variant)) {
  profile_.validate();
  if (options_.keep_top && *options_.keep_top == 0)
    throw std::invalid_argument("keep_top must be at least 1");
}

double Scheduler::total_power() const {
  return network_power(profile_, network_.power_states(*topo_));
}

void Scheduler::check_request(const FlowRequest& request) const {
  topo_->host_at(request.src);
  topo_->host_at(request.dst);
  if (network_.installed.contains(request.id))
    throw std::invalid_argument("flow " + std::to_string(request.id) + " is already scheduled");
}

ScheduleDecision Scheduler::schedule(const FlowRequest& request) {
  if (options_.variant == Variant::SP) return schedule_baseline_sp(request);
  check_request(request);
  std::vector<Path> paths = enumerate_paths(*topo_, request.src, request.dst);

  std::vector<Assignment> candidates = extend_combinations(combinations_, request, paths);
  std::vector<Combination> scored;
  scored.reserve(candidates.size());
  for (Assignment& a : candidates)
    scored.push_back(
        evaluate_combination(std::move(a), *topo_, profile_, options_.variant, network_));

  TopSelection sel = select_top(std::move(scored), options_.variant, options_.keep_top);
  combinations_ = std::move(sel.kept);
  ScheduleDecision d = install(sel.best, request.id);
  d.path_count = paths.size();
  d.candidates_evaluated = candidates.size();
  return d;
}

ScheduleDecision Scheduler::schedule_baseline_sp(const FlowRequest& request) {
  check_request(request);
  std::vector<Path> paths = enumerate_paths(*topo_, request.src, request.dst);
  if (paths.empty()) throw std::invalid_argument("no path for flow " + std::to_string(request.id));
  Assignment next = network_.installed;
  next.emplace(request.id, paths.front());
  const Combination c =
      evaluate_combination(std::move(next), *topo_, profile_, Variant::SP, network_);
  ScheduleDecision d = install(c, request.id);
  d.path_count = paths.size();
  d.candidates_evaluated = 1;
  return d;
}

ScheduleDecision Scheduler::install(const Combination& best, FlowId flow) {
  ScheduleDecision d;
  d.flow = flow;
  d.path = best.assignment.at(flow);
  d.sum_bw = best.sum_bw;
  d.total_pc = best.total_pc;
  d.transition_degree = best.transition_degree;
  d.objective = best.objective;
  for (const auto& [id, path] : network_.installed) {
    const auto it = best.assignment.find(id);
    if (it != best.assignment.end() && it->second != path) d.rerouted.push_back(id);
  }

  const std::vector<SwitchMode> before = network_.modes;
  apply(best.assignment);
  for (std::size_t s = 0; s < before.size(); ++s)
    if (before[s] != network_.modes[s])
      (network_.modes[s] == SwitchMode::Active ? d.woken : d.slept)
          .push_back(static_cast<SwitchId>(s));
  return d;
}

void Scheduler::apply(const Assignment& assignment) {
  const std::vector<bool> used = footprint(*topo_, assignment);
  for (std::size_t s = 0; s < used.size(); ++s)
    network_.modes[s] = (used[s] || !sleeps_idle_switches(options_.variant))
                            ? SwitchMode::Active
                            : SwitchMode::Sleeping;
  network_.installed = assignment;
  network_.allocation = max_min_allocate(*topo_, network_.installed);
  network_.utilization = utilization_factors(*topo_, network_.installed, network_.allocation);
}

void Scheduler::complete(FlowId id) {
  if (!network_.installed.contains(id))
    throw std::invalid_argument("flow " + std::to_string(id) + " is not installed");

  Assignment remaining = network_.installed;
  remaining.erase(id);
  apply(remaining);

  std::vector<Combination> rescored;
  for (Combination& c : combinations_) {
    c.assignment.erase(id);
    if (c.assignment.empty()) continue;
    const bool duplicate = std::any_of(rescored.begin(), rescored.end(), [&](const Combination& o) {
      return o.assignment == c.assignment;
    });
    if (duplicate) continue;
    rescored.push_back(
        evaluate_combination(std::move(c.assignment), *topo_, profile_, options_.variant, network_));
  }
  combinations_.clear();
  if (!rescored.empty())
    combinations_ = select_top(std::move(rescored), options_.variant, options_.keep_top).kept;
}

}  // namespace fatsched
