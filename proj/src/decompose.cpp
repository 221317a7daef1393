#include "mfd/error.hpp"
#include "mfd/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

namespace mfd {

namespace {

Vec2 perpendicular(const Vec2& d) { return Vec2(-d.y(), d.x()); }

Vec2 direction_from(const Network& net, const Channel& c, NodeId from) {
  const Vec2 a = net.node(from).position;
  const Vec2 b = net.node(net.other_end(c, from)).position;
  const Vec2 d = b - a;
  const double n = d.norm();
  if (!(n > 0.0))
    throw InfeasibleDecomposition("channel " + std::to_string(c.id) + ": coincident end nodes");
  return d / n;
}

// Degree-2 internal node whose two channels continue in a straight line.
bool is_straight(const Network& net, NodeId id, double threshold_deg) {
  const auto inc = net.incident(id);
  if (inc.size() != 2 || net.node(id).is_ground()) return false;
  const Vec2 d0 = direction_from(net, net.channel(inc[0]), id);
  const Vec2 d1 = direction_from(net, net.channel(inc[1]), id);
  const double cosine = std::clamp(-d0.dot(d1), -1.0, 1.0);
  const double bend_deg = std::acos(cosine) * 180.0 / std::numbers::pi;
  return bend_deg <= threshold_deg;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

const InterfacePort& Decomposition::port(PortId id) const {
  auto it = std::find_if(ports.begin(), ports.end(), [id](const auto& p) { return p.id == id; });
  if (it == ports.end()) throw PreconditionError("port " + std::to_string(id) + ": no such port");
  return *it;
}

InterfacePort& Decomposition::port(PortId id) {
  return const_cast<InterfacePort&>(std::as_const(*this).port(id));
}

const CfdRegion& Decomposition::region(RegionId id) const {
  auto it = std::find_if(regions.begin(), regions.end(), [id](const auto& r) { return r.id == id; });
  if (it == regions.end())
    throw PreconditionError("region " + std::to_string(id) + ": no such region");
  return *it;
}

double Decomposition::stub_length(ChannelId channel, bool at_node_a) const {
  const Channel& c = network.channel(channel);
  const NodeId end = at_node_a ? c.node_a : c.node_b;
  for (const auto& p : ports)
    if (p.channel_id == channel && p.junction_node == end) return p.distance;
  return 0.0;
}

Decomposition decompose(const Network& net, const DecomposeOptions& options) {
  if (!(options.interface_distance_widths > 0.0))
    throw PreconditionError("interface_distance_widths must be positive");

  Decomposition d;
  d.network = net;
  d.interface_distance_widths = options.interface_distance_widths;

  // Ω_low: crossings, T-junctions, bends and explicitly requested nodes.
  std::set<NodeId> region_nodes(options.extra_region_nodes.begin(),
                                options.extra_region_nodes.end());
  for (const auto& n : net.nodes) {
    if (n.is_ground()) continue;
    const int deg = net.degree(n.id);
    if (deg >= 3) region_nodes.insert(n.id);
    if (deg == 2 && !is_straight(net, n.id, options.bend_threshold_deg)) region_nodes.insert(n.id);
  }
  for (NodeId id : region_nodes)
    if (net.node(id).is_ground())
      throw InfeasibleDecomposition("node " + std::to_string(id) + ": ground node cannot be a region");

  std::map<std::pair<NodeId, ChannelId>, PortId> port_at;
  for (NodeId junction : region_nodes) {
    CfdRegion region;
    region.id = static_cast<RegionId>(d.regions.size());
    region.junction_node = junction;
    const Vec2 center = net.node(junction).position;

    double half_core = 0.0;
    for (ChannelId cid : net.incident(junction))
      half_core = std::max(half_core, 0.5 * net.channel(cid).width);
    region.extent.extend(center - Vec2(half_core, half_core));
    region.extent.extend(center + Vec2(half_core, half_core));

    for (ChannelId cid : net.incident(junction)) {
      const Channel& c = net.channel(cid);
      const Vec2 dir = direction_from(net, c, junction);
      InterfacePort p;
      p.id = static_cast<PortId>(d.ports.size());
      p.region_id = region.id;
      p.channel_id = cid;
      p.junction_node = junction;
      p.width = c.width;
      p.distance = options.interface_distance_widths * c.width;
      p.center = center + p.distance * dir;
      p.inward_normal = -dir;
      p.section_a = p.center - 0.5 * c.width * perpendicular(dir);
      p.section_b = p.center + 0.5 * c.width * perpendicular(dir);
      region.extent.extend(p.section_a);
      region.extent.extend(p.section_b);
      region.ports.push_back(p.id);
      port_at[{junction, cid}] = p.id;
      d.ports.push_back(p);
    }
    d.regions.push_back(std::move(region));
  }

  // Retained Ω_high interval per channel.
  std::map<ChannelId, ChannelSpan> spans;
  for (const auto& c : net.channels) {
    ChannelSpan s{c.id, 0.0, c.length};
    if (region_nodes.count(c.node_a)) s.begin = options.interface_distance_widths * c.width;
    if (region_nodes.count(c.node_b)) s.end = c.length - options.interface_distance_widths * c.width;
    if (s.length() < c.width * (1.0 - 1e-9)) {
      throw InfeasibleDecomposition(
          "channel " + std::to_string(c.id) + ": nodes " + std::to_string(c.node_a) + " and " +
          std::to_string(c.node_b) + " too close, no Ω_high segment of at least one width fits");
    }
    spans[c.id] = s;
  }

  // Degree-2 straight internal nodes of equal width are absorbed into one segment.
  auto pass_through = [&](NodeId id) {
    if (region_nodes.count(id) || !is_straight(net, id, options.bend_threshold_deg)) return false;
    const auto inc = net.incident(id);
    return net.channel(inc[0]).width == net.channel(inc[1]).width;
  };
  auto terminal_at = [&](NodeId node, ChannelId via) {
    if (region_nodes.count(node)) return Terminal{Terminal::Kind::port, port_at.at({node, via})};
    return Terminal{Terminal::Kind::node, node};
  };

  std::set<ChannelId> visited;
  for (const auto& start : net.channels) {
    if (visited.count(start.id)) continue;

    // Walk outward from `node` (entered through `via`) across pass-through nodes.
    auto walk = [&](NodeId node, ChannelId via, std::vector<std::pair<ChannelId, NodeId>>& out) {
      while (pass_through(node)) {
        const auto inc = net.incident(node);
        const ChannelId next = inc[0] == via ? inc[1] : inc[0];
        if (next == start.id || visited.count(next))
          throw InfeasibleDecomposition("channel " + std::to_string(next) +
                                        ": closed loop without terminals");
        visited.insert(next);
        out.push_back({next, node});  // channel and the node we entered it from
        via = next;
        node = net.other_end(net.channel(next), node);
      }
      return terminal_at(node, via);
    };

    visited.insert(start.id);
    std::vector<std::pair<ChannelId, NodeId>> back, forward;
    const Terminal ta = walk(start.node_a, start.id, back);
    const Terminal tb = walk(start.node_b, start.id, forward);

    Segment seg;
    seg.id = static_cast<int>(d.segments.size());
    seg.a = ta;
    seg.b = tb;
    seg.width = start.width;
    for (auto it = back.rbegin(); it != back.rend(); ++it) seg.spans.push_back(spans.at(it->first));
    seg.spans.push_back(spans.at(start.id));
    for (const auto& [cid, from] : forward) seg.spans.push_back(spans.at(cid));
    for (const auto& s : seg.spans) seg.length += s.length();
    d.segments.push_back(std::move(seg));
  }
  return d;
}

std::vector<std::vector<Terminal>> high_components(const Decomposition& d) {
  std::vector<Terminal> terminals;
  for (const auto& s : d.segments) {
    terminals.push_back(s.a);
    terminals.push_back(s.b);
  }
  std::sort(terminals.begin(), terminals.end());
  terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
  auto index = [&](const Terminal& t) {
    return static_cast<int>(std::lower_bound(terminals.begin(), terminals.end(), t) -
                            terminals.begin());
  };

  DisjointSet sets(static_cast<int>(terminals.size()));
  for (const auto& s : d.segments) sets.unite(index(s.a), index(s.b));

  std::map<int, std::vector<Terminal>> groups;
  for (std::size_t i = 0; i < terminals.size(); ++i)
    groups[sets.find(static_cast<int>(i))].push_back(terminals[i]);

  std::vector<std::vector<Terminal>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

Decomposition assign_schemes(Decomposition d) {
  for (auto& p : d.ports) p.scheme = Scheme::PressureToCfd;
  for (const auto& component : high_components(d)) {
    bool grounded = false;
    int lowest_port = -1;
    for (const auto& t : component) {
      if (t.kind == Terminal::Kind::node && d.network.node(t.id).is_ground()) grounded = true;
      if (t.kind == Terminal::Kind::port && (lowest_port < 0 || t.id < lowest_port))
        lowest_port = t.id;
    }
    if (!grounded && lowest_port >= 0) d.port(lowest_port).scheme = Scheme::FlowToCfd;
  }
  return d;
}

}  // namespace mfd
