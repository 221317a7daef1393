#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfd {

using Vec2 = Eigen::Vector2d;
using Box2 = Eigen::AlignedBox2d;

using NodeId = int;
using ChannelId = int;
using PortId = int;
using RegionId = int;

enum class NodeKind { internal, ground };

struct Node {
  NodeId id = 0;
  Vec2 position = Vec2::Zero();
  NodeKind kind = NodeKind::internal;
  std::optional<double> ground_pressure;  // [Pa], set iff kind == ground

  bool is_ground() const { return kind == NodeKind::ground; }
};

/// Rectangular channel of constant width between two nodes.
struct Channel {
  ChannelId id = 0;
  NodeId node_a = 0;
  NodeId node_b = 0;
  double width = 0.0;   // [m]
  double length = 0.0;  // [m]
};

struct Fluid {
  double density = 1000.0;             // [kg/m^3]
  double kinematic_viscosity = 1e-6;   // [m^2/s]

  double dynamic_viscosity() const { return density * kinematic_viscosity; }
};

struct Network {
  std::vector<Node> nodes;
  std::vector<Channel> channels;
  Fluid fluid;

  const Node& node(NodeId id) const;
  const Channel& channel(ChannelId id) const;
  bool has_node(NodeId id) const;

  /// Channels touching `id`, ordered by channel id.
  std::vector<ChannelId> incident(NodeId id) const;
  int degree(NodeId id) const { return static_cast<int>(incident(id).size()); }

  /// Node at the far end of `channel` seen from `from`.
  NodeId other_end(const Channel& channel, NodeId from) const;

  double min_ground_pressure() const;
  double max_ground_pressure() const;
};

// ---------------------------------------------------------------------------
// File format and validation

/// Parses the JSON network document. Derived fields (channel length from node
/// positions when omitted) are filled in.
/// Throws ParseError on malformed text or unknown keys, ValidationError on
/// duplicate ids, missing fields and non-positive dimensions.
Network parse_network(std::string_view text);
Network load_network(const std::string& path);
std::string write_network(const Network& network);

struct Violation {
  std::string entity;  // "network", "node", "channel", "fluid"
  int id = -1;
  std::string message;
};
using ValidationReport = std::vector<Violation>;

/// Empty iff every Network and Channel invariant holds.
ValidationReport validate(const Network& network);
std::string describe(const ValidationReport& report);

// ---------------------------------------------------------------------------
// Decomposition into Ω_low regions, Ω_high segments and interface ports

enum class Scheme {
  FlowToCfd,      // MNA flow rate imposed on the lattice, lattice pressure returned
  PressureToCfd,  // MNA pressure imposed on the lattice, lattice flow rate returned
};

const char* to_string(Scheme scheme);

struct InterfacePort {
  PortId id = 0;
  RegionId region_id = 0;
  ChannelId channel_id = 0;
  NodeId junction_node = 0;
  Vec2 center = Vec2::Zero();          // midpoint of the cross-section
  Vec2 inward_normal = Vec2::Zero();   // unit vector pointing into the region
  Vec2 section_a = Vec2::Zero();
  Vec2 section_b = Vec2::Zero();
  double width = 0.0;
  double distance = 0.0;               // axial distance from the junction node
  Scheme scheme = Scheme::PressureToCfd;
};

struct CfdRegion {
  RegionId id = 0;
  NodeId junction_node = 0;
  std::vector<PortId> ports;
  Box2 extent;
};

/// End point of an Ω_high segment: a network node or an interface port.
struct Terminal {
  enum class Kind { node, port };
  Kind kind = Kind::node;
  int id = 0;

  friend bool operator==(const Terminal&, const Terminal&) = default;
  friend auto operator<=>(const Terminal&, const Terminal&) = default;
};

/// Retained axial interval of one channel, measured from its node_a.
struct ChannelSpan {
  ChannelId channel = 0;
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
};

/// Chain of collinear channel pieces abstracted as one hydraulic resistance.
struct Segment {
  int id = 0;
  Terminal a;
  Terminal b;
  std::vector<ChannelSpan> spans;
  double length = 0.0;
  double width = 0.0;
};

struct DecomposeOptions {
  double interface_distance_widths = 2.0;
  double bend_threshold_deg = 5.0;
  std::vector<NodeId> extra_region_nodes;  // force Ω_low at these nodes
};

struct Decomposition {
  Network network;
  std::vector<CfdRegion> regions;
  std::vector<InterfacePort> ports;
  std::vector<Segment> segments;
  double interface_distance_widths = 2.0;

  const InterfacePort& port(PortId id) const;
  InterfacePort& port(PortId id);
  const CfdRegion& region(RegionId id) const;

  /// Stub length claimed by Ω_low on `channel` at its node_a / node_b end.
  double stub_length(ChannelId channel, bool at_node_a) const;
};

/// Splits a validated network. Every port starts as PressureToCfd.
/// Throws InfeasibleDecomposition when a channel cannot host both ports plus
/// one width of Ω_high between them.
Decomposition decompose(const Network& network, const DecomposeOptions& options = {});

/// Connected components of the Ω_high graph, each as a sorted terminal list.
std::vector<std::vector<Terminal>> high_components(const Decomposition& decomposition);

/// Resets every port to PressureToCfd, then switches the lowest-id port of each
/// ungrounded Ω_high component to FlowToCfd.
Decomposition assign_schemes(Decomposition decomposition);

// ---------------------------------------------------------------------------
// Stand-in networks used by tests, the acceptance suite and the shipped examples.

namespace canonical {

Network straight_channel(double length = 1e-3, double width = 1e-4, double p_in = 1000.0,
                         double p_out = 0.0);

/// Three inlets (left, top, bottom) at `p_in` and one outlet (right) at `p_out`
/// around a single crossing at the origin. Junction node id is 4.
Network cross(double length = 1e-3, double width = 1e-4, double p_in = 1000.0,
              double p_out = 0.0);

/// Two T-junctions joined by an ungrounded rung channel.
Network t_ladder(double length = 1e-3, double width = 1e-4);

/// Three T-junctions in a row, giving two ungrounded rungs.
Network triple_t(double length = 1e-3, double width = 1e-4);

}  // namespace canonical

}  // namespace mfd
