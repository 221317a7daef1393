#include "mfd/netmodel.hpp"

namespace mfd::canonical {

namespace {

Node ground(NodeId id, double x, double y, double p) {
  return Node{id, Vec2(x, y), NodeKind::ground, p};
}

Node internal(NodeId id, double x, double y) {
  return Node{id, Vec2(x, y), NodeKind::internal, std::nullopt};
}

void connect(Network& net, ChannelId id, NodeId a, NodeId b, double width) {
  const double length = (net.node(b).position - net.node(a).position).norm();
  net.channels.push_back(Channel{id, a, b, width, length});
}

}  // namespace

Network straight_channel(double length, double width, double p_in, double p_out) {
  Network net;
  net.nodes = {ground(0, 0.0, 0.0, p_in), ground(1, length, 0.0, p_out)};
  connect(net, 0, 0, 1, width);
  return net;
}

Network cross(double l, double w, double p_in, double p_out) {
  Network net;
  net.nodes = {ground(0, -l, 0.0, p_in), ground(1, 0.0, l, p_in), ground(2, 0.0, -l, p_in),
               ground(3, l, 0.0, p_out), internal(4, 0.0, 0.0)};
  connect(net, 0, 0, 4, w);
  connect(net, 1, 1, 4, w);
  connect(net, 2, 2, 4, w);
  connect(net, 3, 4, 3, w);
  return net;
}

Network t_ladder(double l, double w) {
  Network net;
  net.nodes = {ground(0, -l, 0.0, 1000.0), ground(1, 0.0, -l, 0.0), ground(2, l, l, 600.0),
               ground(3, 2.0 * l, 0.0, 0.0), internal(4, 0.0, 0.0), internal(5, l, 0.0)};
  connect(net, 0, 0, 4, w);
  connect(net, 1, 4, 1, w);
  connect(net, 2, 4, 5, w);  // rung
  connect(net, 3, 2, 5, w);
  connect(net, 4, 5, 3, w);
  return net;
}

Network triple_t(double l, double w) {
  Network net;
  net.nodes = {ground(0, -l, 0.0, 1000.0),     ground(1, 0.0, -l, 0.0),
               ground(2, l, l, 800.0),         ground(3, 2.0 * l, -l, 500.0),
               ground(4, 3.0 * l, 0.0, 0.0),   internal(5, 0.0, 0.0),
               internal(6, l, 0.0),            internal(7, 2.0 * l, 0.0)};
  connect(net, 0, 0, 5, w);
  connect(net, 1, 5, 1, w);
  connect(net, 2, 5, 6, w);  // rung A-B
  connect(net, 3, 2, 6, w);
  connect(net, 4, 6, 7, w);  // rung B-C
  connect(net, 5, 3, 7, w);
  connect(net, 6, 7, 4, w);
  return net;
}

}  // namespace mfd::canonical
