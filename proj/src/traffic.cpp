#include "fatsched/traffic.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace fatsched {

namespace {

constexpr int kMaxPairingAttempts = 1000;

std::optional<std::vector<HostId>> try_pairing(const FatTreeTopology& topo, std::mt19937_64& rng) {
  const auto hosts = topo.hosts();
  std::vector<std::optional<HostId>> partner(hosts.size());
  std::vector<HostId> firsts;
  for (const Host& h : hosts) {
    if (partner[h.id]) continue;
    std::vector<HostId> options;
    for (const Host& o : hosts)
      if (o.id != h.id && !partner[o.id] && o.pod != h.pod) options.push_back(o.id);
    if (options.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const HostId chosen = options[pick(rng)];
    partner[h.id] = chosen;
    partner[chosen] = h.id;
    firsts.push_back(h.id);
    firsts.push_back(chosen);
  }
  return firsts;
}

}  // namespace

std::size_t one_to_one_flow_count(const FatTreeTopology& topo, double utilization_rate) {
  if (!(utilization_rate > 0.0 && utilization_rate <= 1.0))
    throw std::invalid_argument("utilization rate must lie in (0, 1]");
  return static_cast<std::size_t>(
      std::llround(utilization_rate * static_cast<double>(topo.hosts().size()) / 2.0));
}

TrafficScenario generate_one_to_one_far(const FatTreeTopology& topo, std::uint64_t seed,
                                        double utilization_rate, double volume_bytes,
                                        std::optional<std::size_t> flow_count) {
  const std::size_t max_pairs = topo.hosts().size() / 2;
  const std::size_t wanted = flow_count ? *flow_count : one_to_one_flow_count(topo, utilization_rate);
  if (flow_count && !(utilization_rate > 0.0 && utilization_rate <= 1.0))
    throw std::invalid_argument("utilization rate must lie in (0, 1]");
  if (wanted > max_pairs)
    throw std::invalid_argument("cannot form " + std::to_string(wanted) + " disjoint pairs from " +
                                std::to_string(topo.hosts().size()) + " hosts");
  if (!(volume_bytes > 0.0)) throw std::invalid_argument("flow volume must be positive");

  std::mt19937_64 rng(seed);
  std::optional<std::vector<HostId>> pairs;
  for (int attempt = 0; attempt < kMaxPairingAttempts && !pairs; ++attempt)
    pairs = try_pairing(topo, rng);
  if (!pairs) throw std::runtime_error("could not pair all hosts across pods");

  TrafficScenario sc;
  sc.seed = seed;
  sc.utilization_rate = utilization_rate;
  for (std::size_t i = 0; i < wanted; ++i)
    sc.requests.push_back({static_cast<FlowId>(i), (*pairs)[2 * i], (*pairs)[2 * i + 1], volume_bytes});
  return sc;
}

nlohmann::json scenario_to_json(const TrafficScenario& scenario) {
  nlohmann::json flows = nlohmann::json::array();
  for (const FlowRequest& r : scenario.requests)
    flows.push_back({{"src", r.src}, {"dst", r.dst}, {"volume", r.volume_bytes}});
  return {{"seed", scenario.seed},
          {"utilization_rate", scenario.utilization_rate},
          {"flows", std::move(flows)}};
}

TrafficScenario scenario_from_json(const nlohmann::json& j) {
  TrafficScenario sc;
  if (j.is_object()) {
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.utilization_rate = j.value("utilization_rate", 1.0);
  }
  const auto& flows = j.is_array() ? j : j.at("flows");
  for (const auto& f : flows) {
    FlowRequest r;
    r.id = static_cast<FlowId>(sc.requests.size());
    r.src = f.at("src").get<HostId>();
    r.dst = f.at("dst").get<HostId>();
    r.volume_bytes = f.at("volume").get<double>();
    sc.requests.push_back(r);
  }
  return sc;
}

void save_scenario(const TrafficScenario& scenario, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write scenario " + file.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

TrafficScenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open scenario " + file.string());
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed scenario " + file.string() + ": " + e.what());
  }
}

}  // namespace fatsched
