#pragma once

#include <cstdint>

namespace fatsched {

using SwitchId = std::uint32_t;
using HostId = std::uint32_t;
using LinkId = std::uint32_t;
using FlowId = std::uint32_t;

// Directed half of a full-duplex link: 2 * link for the a->b direction,
// 2 * link + 1 for b->a.
using ChannelId = std::uint32_t;

inline constexpr double kGbps = 1e9;
inline constexpr double kDecimalGB = 1e9;
inline constexpr double kBinaryGB = 1073741824.0;

struct FlowRequest {
  FlowId id = 0;
  HostId src = 0;
  HostId dst = 0;
  double volume_bytes = 0.0;

  bool operator==(const FlowRequest&) const = default;
};

}  // namespace fatsched
