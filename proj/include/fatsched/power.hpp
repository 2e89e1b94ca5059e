#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

namespace fatsched {

enum class SwitchMode { Active, Sleeping };

// Switch power constants. Port power is the draw of one fully utilized port
// at the given link rate; an idle port contributes nothing.
struct PowerProfile {
  double chassis_w = 0.0;
  double linecard_w = 0.0;
  int num_linecards = 1;
  std::map<std::uint64_t, double> port_w_per_rate;
  double sleep_saving_fraction = 0.6;

  // Load-independent draw of an active switch.
  double base_w() const { return chassis_w + num_linecards * linecard_w; }
  double port_w(double rate_bps) const;

  PowerProfile with_sleep_saving(double s) const;
  PowerProfile scaled(double factor) const;

  // Throws std::invalid_argument on negative powers or s outside [0, 1].
  void validate() const;

  static PowerProfile calibrated_default();
  static PowerProfile from_json(const nlohmann::json& j);
  static PowerProfile load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
};

struct PortLoad {
  double rate_bps = 0.0;
  double utilization = 0.0;  // carried rate / link rate, in [0, 1]
};

struct SwitchPowerState {
  SwitchMode mode = SwitchMode::Active;
  std::vector<PortLoad> ports;
};

double switch_power(const PowerProfile& profile, const SwitchPowerState& state);
double network_power(const PowerProfile& profile, std::span<const SwitchPowerState> states);

}  // namespace fatsched
