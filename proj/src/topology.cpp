#include "fatsched/topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fatsched {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Core: return "core";
    case Layer::Aggregation: return "aggregation";
    case Layer::Edge: return "edge";
  }
  return "unknown";
}

std::string_view to_string(TrafficClass cls) {
  switch (cls) {
    case TrafficClass::Near: return "near";
    case TrafficClass::Middle: return "middle";
    case TrafficClass::Far: return "far";
  }
  return "unknown";
}

const Switch& FatTreeTopology::switch_at(SwitchId id) const {
  if (id >= switches_.size()) throw std::out_of_range("unknown switch id " + std::to_string(id));
  return switches_[id];
}

const Host& FatTreeTopology::host_at(HostId id) const {
  if (id >= hosts_.size()) throw std::out_of_range("unknown host id " + std::to_string(id));
  return hosts_[id];
}

const Link& FatTreeTopology::link_at(LinkId id) const {
  if (id >= links_.size()) throw std::out_of_range("unknown link id " + std::to_string(id));
  return links_[id];
}

SwitchId FatTreeTopology::core_switch(int group, int member) const {
  return static_cast<SwitchId>(group * half() + member);
}

SwitchId FatTreeTopology::aggregation_switch(int pod, int index) const {
  return static_cast<SwitchId>(half() * half() + pod * k_ + index);
}

SwitchId FatTreeTopology::edge_switch(int pod, int index) const {
  return static_cast<SwitchId>(half() * half() + pod * k_ + half() + index);
}

std::span<const LinkId> FatTreeTopology::switch_ports(SwitchId id) const {
  switch_at(id);
  return ports_[id];
}

LinkId FatTreeTopology::host_uplink(HostId id) const {
  host_at(id);
  return host_uplinks_[id];
}

std::optional<LinkId> FatTreeTopology::link_between(Endpoint a, Endpoint b) const {
  if (!a.is_switch()) std::swap(a, b);
  if (!a.is_switch()) return std::nullopt;  // hosts never connect directly
  if (a.index >= switches_.size()) return std::nullopt;
  for (LinkId id : ports_[a.index]) {
    const Link& l = links_[id];
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return id;
  }
  return std::nullopt;
}

ChannelId FatTreeTopology::channel(LinkId link, Endpoint from) const {
  const Link& l = link_at(link);
  if (l.a == from) return 2 * link;
  if (l.b == from) return 2 * link + 1;
  throw std::invalid_argument("endpoint is not attached to link " + std::to_string(link));
}

Endpoint FatTreeTopology::channel_source(ChannelId ch) const {
  const Link& l = link_at(link_of(ch));
  return ch % 2 == 0 ? l.a : l.b;
}

Endpoint FatTreeTopology::channel_target(ChannelId ch) const {
  const Link& l = link_at(link_of(ch));
  return ch % 2 == 0 ? l.b : l.a;
}

bool FatTreeTopology::operator==(const FatTreeTopology& o) const {
  auto same_switch = [](const Switch& x, const Switch& y) {
    return x.id == y.id && x.layer == y.layer && x.pod == y.pod && x.index == y.index;
  };
  auto same_host = [](const Host& x, const Host& y) {
    return x.id == y.id && x.edge == y.edge && x.pod == y.pod;
  };
  auto same_link = [](const Link& x, const Link& y) {
    return x.id == y.id && x.a == y.a && x.b == y.b && x.capacity_bps == y.capacity_bps;
  };
  return k_ == o.k_ && link_rate_ == o.link_rate_ &&
         std::equal(switches_.begin(), switches_.end(), o.switches_.begin(), o.switches_.end(),
                    same_switch) &&
         std::equal(hosts_.begin(), hosts_.end(), o.hosts_.begin(), o.hosts_.end(), same_host) &&
         std::equal(links_.begin(), links_.end(), o.links_.begin(), o.links_.end(), same_link);
}

void FatTreeTopology::add_link(Endpoint a, Endpoint b) {
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back({id, a, b, link_rate_});
  for (Endpoint e : {a, b}) {
    if (e.is_switch())
      ports_[e.index].push_back(id);
    else
      host_uplinks_[e.index] = id;
  }
}

FatTreeTopology build_fat_tree(int k, double link_rate_bps) {
  if (k < 4 || k % 2 != 0)
    throw std::invalid_argument("FatTree port count k must be an even integer >= 4, got " +
                                std::to_string(k));
  if (!(link_rate_bps > 0.0)) throw std::invalid_argument("link rate must be positive");

  FatTreeTopology t;
  t.k_ = k;
  t.link_rate_ = link_rate_bps;
  const int h = k / 2;

  for (int group = 0; group < h; ++group)
    for (int m = 0; m < h; ++m)
      t.switches_.push_back(
          {static_cast<SwitchId>(t.switches_.size()), Layer::Core, std::nullopt, group * h + m});
  for (int pod = 0; pod < k; ++pod) {
    for (int i = 0; i < h; ++i)
      t.switches_.push_back(
          {static_cast<SwitchId>(t.switches_.size()), Layer::Aggregation, pod, i});
    for (int i = 0; i < h; ++i)
      t.switches_.push_back({static_cast<SwitchId>(t.switches_.size()), Layer::Edge, pod, i});
  }
  for (int pod = 0; pod < k; ++pod)
    for (int e = 0; e < h; ++e)
      for (int i = 0; i < h; ++i)
        t.hosts_.push_back({static_cast<HostId>(t.hosts_.size()), t.edge_switch(pod, e), pod});

  t.ports_.assign(t.switches_.size(), {});
  t.host_uplinks_.assign(t.hosts_.size(), 0);

  // Pod-major: host access links, then edge-aggregation, then aggregation-core.
  for (int pod = 0; pod < k; ++pod) {
    for (int e = 0; e < h; ++e)
      for (int i = 0; i < h; ++i) {
        const auto host = static_cast<HostId>((pod * h + e) * h + i);
        t.add_link(Endpoint::of_switch(t.edge_switch(pod, e)), Endpoint::of_host(host));
      }
    for (int a = 0; a < h; ++a)
      for (int e = 0; e < h; ++e)
        t.add_link(Endpoint::of_switch(t.aggregation_switch(pod, a)),
                   Endpoint::of_switch(t.edge_switch(pod, e)));
    for (int a = 0; a < h; ++a)
      for (int m = 0; m < h; ++m)
        t.add_link(Endpoint::of_switch(t.core_switch(a, m)),
                   Endpoint::of_switch(t.aggregation_switch(pod, a)));
  }
  for (auto& p : t.ports_) std::sort(p.begin(), p.end());
  return t;
}

namespace {

Path make_path(const FatTreeTopology& topo, HostId src, HostId dst,
               std::vector<SwitchId> switches) {
  Path p{src, dst, std::move(switches), {}};
  p.channels.reserve(p.switches.size() + 1);
  Endpoint prev = Endpoint::of_host(src);
  auto hop = [&](Endpoint next) {
    const auto link = topo.link_between(prev, next);
    if (!link) throw std::logic_error("path hop between non-adjacent nodes");
    p.channels.push_back(topo.channel(*link, prev));
    prev = next;
  };
  for (SwitchId s : p.switches) hop(Endpoint::of_switch(s));
  hop(Endpoint::of_host(dst));
  return p;
}

}  // namespace

std::vector<Path> enumerate_paths(const FatTreeTopology& topo, HostId src, HostId dst) {
  const Host& s = topo.host_at(src);
  const Host& d = topo.host_at(dst);
  if (src == dst) throw std::invalid_argument("source and destination host are identical");

  std::vector<Path> paths;
  const int h = topo.half();
  if (s.edge == d.edge) {
    paths.push_back(make_path(topo, src, dst, {s.edge}));
  } else if (s.pod == d.pod) {
    for (int a = 0; a < h; ++a)
      paths.push_back(make_path(topo, src, dst, {s.edge, topo.aggregation_switch(s.pod, a), d.edge}));
  } else {
    for (int a = 0; a < h; ++a)
      for (int m = 0; m < h; ++m)
        paths.push_back(make_path(topo, src, dst,
                                  {s.edge, topo.aggregation_switch(s.pod, a), topo.core_switch(a, m),
                                   topo.aggregation_switch(d.pod, a), d.edge}));
  }
  std::sort(paths.begin(), paths.end(),
            [](const Path& x, const Path& y) { return x.switches < y.switches; });
  return paths;
}

TrafficClass classify_traffic(const FatTreeTopology& topo, const Path& path) {
  if (path.switches.size() == 1) return TrafficClass::Near;
  if (path.switches.size() == 3 && topo.host_at(path.src).pod == topo.host_at(path.dst).pod)
    return TrafficClass::Middle;
  return TrafficClass::Far;
}

nlohmann::json topology_to_json(const FatTreeTopology& topo) {
  using nlohmann::json;
  auto endpoint = [](Endpoint e) {
    return json{{"kind", e.is_switch() ? "switch" : "host"}, {"id", e.index}};
  };
  json out;
  out["k"] = topo.k();
  out["link_rate_bps"] = topo.link_rate();
  json& sw = out["switches"] = json::array();
  for (const Switch& s : topo.switches()) {
    json j{{"id", s.id}, {"layer", to_string(s.layer)}, {"index", s.index}};
    j["pod"] = s.pod ? json(*s.pod) : json(nullptr);
    sw.push_back(std::move(j));
  }
  json& hs = out["hosts"] = json::array();
  for (const Host& h : topo.hosts())
    hs.push_back({{"id", h.id}, {"edge", h.edge}, {"pod", h.pod}});
  json& ls = out["links"] = json::array();
  for (const Link& l : topo.links())
    ls.push_back({{"id", l.id}, {"a", endpoint(l.a)}, {"b", endpoint(l.b)},
                  {"capacity_bps", l.capacity_bps}});
  return out;
}

}  // namespace fatsched
