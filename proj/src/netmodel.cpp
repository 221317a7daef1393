#include "mfd/netmodel.hpp"

#include "mfd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace mfd {

const Node& Network::node(NodeId id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [id](const Node& n) { return n.id == id; });
  if (it == nodes.end()) throw PreconditionError("node " + std::to_string(id) + ": no such node");
  return *it;
}

const Channel& Network::channel(ChannelId id) const {
  auto it = std::find_if(channels.begin(), channels.end(),
                         [id](const Channel& c) { return c.id == id; });
  if (it == channels.end())
    throw PreconditionError("channel " + std::to_string(id) + ": no such channel");
  return *it;
}

bool Network::has_node(NodeId id) const {
  return std::any_of(nodes.begin(), nodes.end(), [id](const Node& n) { return n.id == id; });
}

std::vector<ChannelId> Network::incident(NodeId id) const {
  std::vector<ChannelId> out;
  for (const auto& c : channels)
    if (c.node_a == id || c.node_b == id) out.push_back(c.id);
  std::sort(out.begin(), out.end());
  return out;
}

NodeId Network::other_end(const Channel& channel, NodeId from) const {
  return channel.node_a == from ? channel.node_b : channel.node_a;
}

double Network::min_ground_pressure() const {
  double p = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes)
    if (n.is_ground() && n.ground_pressure) p = std::min(p, *n.ground_pressure);
  return p;
}

double Network::max_ground_pressure() const {
  double p = -std::numeric_limits<double>::infinity();
  for (const auto& n : nodes)
    if (n.is_ground() && n.ground_pressure) p = std::max(p, *n.ground_pressure);
  return p;
}

const char* to_string(Scheme scheme) {
  return scheme == Scheme::FlowToCfd ? "FlowToCfd" : "PressureToCfd";
}

ValidationReport validate(const Network& net) {
  ValidationReport report;
  auto add = [&](std::string entity, int id, std::string message) {
    report.push_back({std::move(entity), id, std::move(message)});
  };

  if (!(net.fluid.density > 0.0) || !std::isfinite(net.fluid.density))
    add("fluid", -1, "density must be positive");
  if (!(net.fluid.kinematic_viscosity > 0.0) || !std::isfinite(net.fluid.kinematic_viscosity))
    add("fluid", -1, "kinematic_viscosity must be positive");

  std::set<NodeId> node_ids;
  for (const auto& n : net.nodes) {
    if (!node_ids.insert(n.id).second) add("node", n.id, "duplicate id");
    if (n.is_ground()) {
      if (!n.ground_pressure || !std::isfinite(*n.ground_pressure))
        add("node", n.id, "ground node needs a finite pressure");
    } else if (n.ground_pressure) {
      add("node", n.id, "internal node must not carry a pressure");
    }
  }

  std::set<ChannelId> channel_ids;
  for (const auto& c : net.channels) {
    if (!channel_ids.insert(c.id).second) add("channel", c.id, "duplicate id");
    if (!(c.width > 0.0)) add("channel", c.id, "width must be positive");
    if (!(c.length > 0.0)) add("channel", c.id, "length must be positive");
    if (c.node_a == c.node_b) add("channel", c.id, "node_a must differ from node_b");
    if (!node_ids.count(c.node_a) || !node_ids.count(c.node_b))
      add("channel", c.id, "references an unknown node");
    if (c.width > 0.0 && c.length < 5.0 * c.width * (1.0 - 1e-12))
      add("channel", c.id, "length >= 5*width violated");
  }

  int grounds = 0;
  for (const auto& n : net.nodes) {
    if (!n.is_ground()) continue;
    ++grounds;
    if (net.degree(n.id) != 1) add("node", n.id, "ground node must have degree 1");
  }
  if (grounds < 2) add("network", -1, "at least two ground nodes required");

  if (!net.nodes.empty()) {
    std::map<NodeId, std::vector<NodeId>> adjacency;
    for (const auto& c : net.channels) {
      adjacency[c.node_a].push_back(c.node_b);
      adjacency[c.node_b].push_back(c.node_a);
    }
    std::set<NodeId> seen{net.nodes.front().id};
    std::vector<NodeId> stack{net.nodes.front().id};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId w : adjacency[v])
        if (seen.insert(w).second) stack.push_back(w);
    }
    if (seen.size() < node_ids.size()) add("network", -1, "graph is not connected");
  } else {
    add("network", -1, "network has no nodes");
  }
  return report;
}

std::string describe(const ValidationReport& report) {
  std::ostringstream out;
  for (const auto& v : report) {
    out << v.entity;
    if (v.id >= 0) out << ' ' << v.id;
    out << ": " << v.message << '\n';
  }
  return out.str();
}

}  // namespace mfd
