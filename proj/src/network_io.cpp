#include "mfd/error.hpp"
#include "mfd/netmodel.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mfd {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ParseError(where + ": unknown key \"" + key + "\"");
  }
}

double number(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
  const auto& v = object.at(key);
  if (!v.is_number()) throw ParseError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

int integer(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
  const auto& v = object.at(key);
  if (!v.is_number_integer()) throw ParseError(where + ": field \"" + key + "\" must be an integer");
  return v.get<int>();
}

}  // namespace

Network parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network document must be an object");
  reject_unknown_keys(doc, {"fluid", "nodes", "channels"}, "network");

  Network net;
  if (doc.contains("fluid")) {
    const auto& f = doc.at("fluid");
    if (!f.is_object()) throw ParseError("fluid must be an object");
    reject_unknown_keys(f, {"density", "kinematic_viscosity"}, "fluid");
    net.fluid.density = number(f, "density", "fluid");
    net.fluid.kinematic_viscosity = number(f, "kinematic_viscosity", "fluid");
    if (!(net.fluid.density > 0.0)) throw ValidationError("fluid: density must be positive");
    if (!(net.fluid.kinematic_viscosity > 0.0))
      throw ValidationError("fluid: kinematic_viscosity must be positive");
  } else {
    throw ValidationError("network: missing field \"fluid\"");
  }

  if (!doc.contains("nodes") || !doc.at("nodes").is_array())
    throw ValidationError("network: missing array \"nodes\"");
  if (!doc.contains("channels") || !doc.at("channels").is_array())
    throw ValidationError("network: missing array \"channels\"");

  std::set<NodeId> node_ids;
  for (const auto& jn : doc.at("nodes")) {
    if (!jn.is_object()) throw ParseError("nodes: entries must be objects");
    if (!jn.contains("id")) throw ValidationError("node: missing field \"id\"");
    const int id = integer(jn, "id", "node");
    const std::string where = "node " + std::to_string(id);
    reject_unknown_keys(jn, {"id", "x", "y", "ground", "pressure"}, where);
    if (!node_ids.insert(id).second) throw ValidationError(where + ": duplicate id");

    Node n;
    n.id = id;
    n.position = Vec2(number(jn, "x", where), number(jn, "y", where));
    bool ground = false;
    if (jn.contains("ground")) {
      if (!jn.at("ground").is_boolean()) throw ParseError(where + ": \"ground\" must be a boolean");
      ground = jn.at("ground").get<bool>();
    }
    n.kind = ground ? NodeKind::ground : NodeKind::internal;
    if (ground) {
      n.ground_pressure = number(jn, "pressure", where);
      if (!std::isfinite(*n.ground_pressure))
        throw ValidationError(where + ": pressure must be finite");
    } else if (jn.contains("pressure")) {
      throw ValidationError(where + ": pressure given for an internal node");
    }
    net.nodes.push_back(n);
  }

  std::set<ChannelId> channel_ids;
  for (const auto& jc : doc.at("channels")) {
    if (!jc.is_object()) throw ParseError("channels: entries must be objects");
    if (!jc.contains("id")) throw ValidationError("channel: missing field \"id\"");
    const int id = integer(jc, "id", "channel");
    const std::string where = "channel " + std::to_string(id);
    reject_unknown_keys(jc, {"id", "node_a", "node_b", "width", "length"}, where);
    if (!channel_ids.insert(id).second) throw ValidationError(where + ": duplicate id");

    Channel c;
    c.id = id;
    c.node_a = integer(jc, "node_a", where);
    c.node_b = integer(jc, "node_b", where);
    if (!node_ids.count(c.node_a) || !node_ids.count(c.node_b))
      throw ValidationError(where + ": references an unknown node");
    c.width = number(jc, "width", where);
    if (!(c.width > 0.0)) throw ValidationError(where + ": width must be positive");
    if (jc.contains("length")) {
      c.length = number(jc, "length", where);
    } else {
      c.length = (net.node(c.node_b).position - net.node(c.node_a).position).norm();
    }
    if (!(c.length > 0.0)) throw ValidationError(where + ": length must be positive");
    net.channels.push_back(c);
  }
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

std::string write_network(const Network& net) {
  json doc;
  doc["fluid"] = {{"density", net.fluid.density},
                  {"kinematic_viscosity", net.fluid.kinematic_viscosity}};
  doc["nodes"] = json::array();
  for (const auto& n : net.nodes) {
    json jn = {{"id", n.id}, {"x", n.position.x()}, {"y", n.position.y()}};
    if (n.is_ground()) {
      jn["ground"] = true;
      jn["pressure"] = n.ground_pressure.value_or(0.0);
    }
    doc["nodes"].push_back(jn);
  }
  doc["channels"] = json::array();
  for (const auto& c : net.channels) {
    json jc = {{"id", c.id}, {"node_a", c.node_a}, {"node_b", c.node_b}, {"width", c.width}};
    const double geometric = (net.node(c.node_b).position - net.node(c.node_a).position).norm();
    if (std::abs(geometric - c.length) > 1e-12 * c.length) jc["length"] = c.length;
    doc["channels"].push_back(jc);
  }
  return doc.dump(2) + "\n";
}

}  // namespace mfd
