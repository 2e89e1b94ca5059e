#include "fatsched/power.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fatsched {

double PowerProfile::port_w(double rate_bps) const {
  const auto key = static_cast<std::uint64_t>(std::llround(rate_bps));
  const auto it = port_w_per_rate.find(key);
  if (it == port_w_per_rate.end())
    throw std::out_of_range("power profile has no port power entry for link rate " +
                            std::to_string(key) + " bps");
  return it->second;
}

PowerProfile PowerProfile::with_sleep_saving(double s) const {
  PowerProfile p = *this;
  p.sleep_saving_fraction = s;
  p.validate();
  return p;
}

PowerProfile PowerProfile::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("power scale factor must be positive");
  PowerProfile p = *this;
  p.chassis_w *= factor;
  p.linecard_w *= factor;
  for (auto& [rate, w] : p.port_w_per_rate) w *= factor;
  return p;
}

void PowerProfile::validate() const {
  if (chassis_w < 0.0 || linecard_w < 0.0 || num_linecards < 0)
    throw std::invalid_argument("power profile constants must be non-negative");
  for (const auto& [rate, w] : port_w_per_rate)
    if (w < 0.0) throw std::invalid_argument("port power must be non-negative");
  if (!(sleep_saving_fraction >= 0.0 && sleep_saving_fraction <= 1.0))
    throw std::invalid_argument("sleep saving fraction must lie in [0, 1]");
}

// Calibrated once against the SP totals at full one-to-one load on the
// k = 4, 6, 8 FatTrees (3032 W, 6856 W, 12114 W); mirrors
// data/default_power_profile.json.
PowerProfile PowerProfile::calibrated_default() {
  PowerProfile p;
  p.chassis_w = 121.5;
  p.linecard_w = 30.0;
  p.num_linecards = 1;
  p.port_w_per_rate = {{1'000'000'000ULL, 0.17}};
  p.sleep_saving_fraction = 0.6;
  return p;
}

PowerProfile PowerProfile::from_json(const nlohmann::json& j) {
  PowerProfile p;
  p.chassis_w = j.at("chassis_w").get<double>();
  p.linecard_w = j.at("linecard_w").get<double>();
  p.num_linecards = j.at("num_linecards").get<int>();
  for (const auto& [rate, w] : j.at("port_w_per_rate").items()) {
    std::size_t used = 0;
    const auto r = std::stoull(rate, &used);
    if (used != rate.size()) throw std::invalid_argument("bad link rate key '" + rate + "'");
    p.port_w_per_rate[r] = w.get<double>();
  }
  p.sleep_saving_fraction = j.value("sleep_saving_fraction", 0.6);
  p.validate();
  return p;
}

PowerProfile PowerProfile::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open power profile " + file.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed power profile " + file.string() + ": " + e.what());
  }
}

nlohmann::json PowerProfile::to_json() const {
  nlohmann::json ports = nlohmann::json::object();
  for (const auto& [rate, w] : port_w_per_rate) ports[std::to_string(rate)] = w;
  return {{"chassis_w", chassis_w},
          {"linecard_w", linecard_w},
          {"num_linecards", num_linecards},
          {"port_w_per_rate", ports},
          {"sleep_saving_fraction", sleep_saving_fraction}};
}

double switch_power(const PowerProfile& profile, const SwitchPowerState& state) {
  if (state.mode == SwitchMode::Sleeping) {
    for (const PortLoad& port : state.ports)
      if (port.utilization != 0.0)
        throw std::invalid_argument("sleeping switch reports non-zero port utilization");
    return (1.0 - profile.sleep_saving_fraction) * profile.base_w();
  }
  // Grouping ports by rate first gives the same sum.
  double ports_w = 0.0;
  for (const PortLoad& port : state.ports) {
    if (port.utilization < 0.0 || port.utilization > 1.0)
      throw std::invalid_argument("port utilization outside [0, 1]");
    ports_w += profile.port_w(port.rate_bps) * port.utilization;
  }
  return profile.base_w() + ports_w;
}

double network_power(const PowerProfile& profile, std::span<const SwitchPowerState> states) {
  double total = 0.0;
  for (const SwitchPowerState& s : states) total += switch_power(profile, s);
  return total;
}

}  // namespace fatsched
