#include "fatsched/flowsim.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace fatsched {

namespace {

struct ChannelSlot {
  double residual = 0.0;
  std::vector<std::size_t> flows;  // indices into the flow table
  std::size_t unfixed = 0;
};

}  // namespace

Allocation max_min_allocate(const FatTreeTopology& topo, const Assignment& flows) {
  const std::size_t n_channels = topo.channel_count();
  std::vector<FlowId> ids;
  std::vector<const Path*> paths;
  ids.reserve(flows.size());
  paths.reserve(flows.size());
  for (const auto& [id, path] : flows) {
    ids.push_back(id);
    paths.push_back(&path);
  }

  std::unordered_map<ChannelId, std::size_t> slot_of;
  std::vector<ChannelSlot> slots;
  for (std::size_t f = 0; f < paths.size(); ++f) {
    for (ChannelId ch : paths[f]->channels) {
      if (ch >= n_channels)
        throw std::out_of_range("flow " + std::to_string(ids[f]) + " uses unknown channel " +
                                std::to_string(ch));
      auto [it, inserted] = slot_of.try_emplace(ch, slots.size());
      if (inserted) slots.push_back({topo.link_at(FatTreeTopology::link_of(ch)).capacity_bps, {}, 0});
      ChannelSlot& slot = slots[it->second];
      slot.flows.push_back(f);
      ++slot.unfixed;
    }
  }

  std::vector<double> rate(paths.size(), 0.0);
  std::vector<bool> fixed(paths.size(), false);
  std::size_t remaining = paths.size();
  while (remaining > 0) {
    std::size_t bottleneck = slots.size();
    double share = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (slots[s].unfixed == 0) continue;
      const double fair = std::max(0.0, slots[s].residual) / static_cast<double>(slots[s].unfixed);
      if (fair < share) {
        share = fair;
        bottleneck = s;
      }
    }
    if (bottleneck == slots.size()) throw std::logic_error("flow without channels");

    for (std::size_t f : slots[bottleneck].flows) {
      if (fixed[f]) continue;
      fixed[f] = true;
      rate[f] = share;
      --remaining;
      for (ChannelId ch : paths[f]->channels) {
        ChannelSlot& slot = slots[slot_of.at(ch)];
        slot.residual -= share;
        --slot.unfixed;
      }
    }
  }

  Allocation out;
  for (std::size_t f = 0; f < ids.size(); ++f) out.emplace_hint(out.end(), ids[f], rate[f]);
  return out;
}

std::vector<double> channel_loads(const FatTreeTopology& topo, const Assignment& flows,
                                  const Allocation& rates) {
  std::vector<double> load(topo.channel_count(), 0.0);
  for (const auto& [id, path] : flows) {
    const auto it = rates.find(id);
    if (it == rates.end()) continue;
    for (ChannelId ch : path.channels) load.at(ch) += it->second;
  }
  return load;
}

std::vector<std::vector<double>> utilization_factors(const FatTreeTopology& topo,
                                                     const Assignment& flows,
                                                     const Allocation& rates) {
  const std::vector<double> load = channel_loads(topo, flows, rates);
  std::vector<std::vector<double>> out(topo.switches().size());
  for (const Switch& sw : topo.switches()) {
    const auto ports = topo.switch_ports(sw.id);
    auto& factors = out[sw.id];
    factors.reserve(ports.size());
    for (LinkId l : ports) {
      const double busiest = std::max(load[2 * l], load[2 * l + 1]);
      factors.push_back(std::clamp(busiest / topo.link_at(l).capacity_bps, 0.0, 1.0));
    }
  }
  return out;
}

TtcResult simulate_ttc(const FatTreeTopology& topo, std::vector<Flow>& flows,
                       const CompletionHook& on_complete) {
  TtcResult result;
  for (Flow& f : flows) {
    if (!f.path) throw std::invalid_argument("flow " + std::to_string(f.id) + " has no path");
    if (f.remaining_bytes > f.volume_bytes)
      throw std::invalid_argument("flow " + std::to_string(f.id) + " remaining exceeds volume");
    result.delivered_bytes[f.id] = f.volume_bytes - f.remaining_bytes;
    if (f.remaining_bytes <= 0.0) {
      f.state = FlowState::Done;
      result.completion_s[f.id] = 0.0;
    } else {
      f.state = FlowState::Running;
    }
  }

  double now = 0.0;
  for (;;) {
    Assignment running;
    std::map<FlowId, Flow*> by_id;
    for (Flow& f : flows) {
      if (f.state != FlowState::Running) continue;
      running.emplace(f.id, *f.path);
      by_id.emplace(f.id, &f);
    }
    if (running.empty()) break;

    const Allocation rates = max_min_allocate(topo, running);
    double dt = std::numeric_limits<double>::infinity();
    for (const auto& [id, r] : rates) {
      if (!(r > 0.0))
        throw std::runtime_error("flow " + std::to_string(id) + " starved with bytes remaining");
      dt = std::min(dt, by_id[id]->remaining_bytes * 8.0 / r);
    }

    now += dt;
    ++result.events;
    std::vector<FlowId> finished;
    for (const auto& [id, r] : rates) {
      Flow& f = *by_id[id];
      const double sent = r * dt / 8.0;
      result.delivered_bytes[id] += sent;
      const double left = f.remaining_bytes - sent;
      // Flows within rounding of empty finish in this event.
      if (left <= 1e-9 * f.volume_bytes) {
        f.remaining_bytes = 0.0;
        f.state = FlowState::Done;
        result.completion_s[id] = now;
        finished.push_back(id);
      } else {
        f.remaining_bytes = left;
      }
    }
    if (on_complete)
      for (FlowId id : finished) on_complete(id, now);
  }
  return result;
}

}  // namespace fatsched
