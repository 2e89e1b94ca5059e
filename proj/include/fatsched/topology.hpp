#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fatsched/types.hpp"

namespace fatsched {

enum class Layer { Core, Aggregation, Edge };

std::string_view to_string(Layer layer);

struct Switch {
  SwitchId id = 0;
  Layer layer = Layer::Core;
  std::optional<int> pod;  // none for core switches
  int index = 0;           // position within its layer (and pod, if any)
};

struct Host {
  HostId id = 0;
  SwitchId edge = 0;
  int pod = 0;
};

// A link endpoint is either a switch or a host.
struct Endpoint {
  enum class Kind { Switch, Host };
  Kind kind = Kind::Switch;
  std::uint32_t index = 0;

  static Endpoint of_switch(SwitchId id) { return {Kind::Switch, id}; }
  static Endpoint of_host(HostId id) { return {Kind::Host, id}; }
  bool is_switch() const { return kind == Kind::Switch; }
  auto operator<=>(const Endpoint&) const = default;
};

struct Link {
  LinkId id = 0;
  Endpoint a;
  Endpoint b;
  double capacity_bps = 0.0;
};

struct Path {
  HostId src = 0;
  HostId dst = 0;
  std::vector<SwitchId> switches;
  std::vector<ChannelId> channels;  // directed hops, host->...->host

  std::size_t hop_count() const { return channels.size(); }
  bool operator==(const Path&) const = default;
};

enum class TrafficClass { Near, Middle, Far };

std::string_view to_string(TrafficClass cls);

class FatTreeTopology {
 public:
  int k() const { return k_; }
  int pods() const { return k_; }
  int half() const { return k_ / 2; }
  double link_rate() const { return link_rate_; }

  std::span<const Switch> switches() const { return switches_; }
  std::span<const Host> hosts() const { return hosts_; }
  std::span<const Link> links() const { return links_; }
  std::size_t channel_count() const { return links_.size() * 2; }

  const Switch& switch_at(SwitchId id) const;
  const Host& host_at(HostId id) const;
  const Link& link_at(LinkId id) const;

  SwitchId core_switch(int group, int member) const;
  SwitchId aggregation_switch(int pod, int index) const;
  SwitchId edge_switch(int pod, int index) const;

  // Links attached to a switch, in ascending link-id order; one per port.
  std::span<const LinkId> switch_ports(SwitchId id) const;
  LinkId host_uplink(HostId id) const;

  std::optional<LinkId> link_between(Endpoint a, Endpoint b) const;
  ChannelId channel(LinkId link, Endpoint from) const;
  static LinkId link_of(ChannelId ch) { return ch / 2; }
  Endpoint channel_source(ChannelId ch) const;
  Endpoint channel_target(ChannelId ch) const;

  bool operator==(const FatTreeTopology&) const;

 private:
  friend FatTreeTopology build_fat_tree(int k, double link_rate_bps);

  void add_link(Endpoint a, Endpoint b);

  int k_ = 0;
  double link_rate_ = 0.0;
  std::vector<Switch> switches_;
  std::vector<Host> hosts_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> ports_;
  std::vector<LinkId> host_uplinks_;
};

// IDs are assigned core switches first, then pod by pod with the pod's
// aggregation switches before its edge switches. Hosts are numbered edge by
// edge. Aggregation switch j of every pod connects to core group j.
FatTreeTopology build_fat_tree(int k, double link_rate_bps = kGbps);

// All minimum-hop host-to-host paths, ordered lexicographically by their
// switch sequence.
std::vector<Path> enumerate_paths(const FatTreeTopology& topo, HostId src, HostId dst);

TrafficClass classify_traffic(const FatTreeTopology& topo, const Path& path);

nlohmann::json topology_to_json(const FatTreeTopology& topo);

}  // namespace fatsched
