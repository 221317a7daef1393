#include "mfd/error.hpp"
#include "mfd/lbm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfd::lbm {

namespace {

constexpr double kGridTolerance = 1e-6;  // in cells

struct PortSpec {
  PortId id = 0;
  int axis = 0;              // axis of the channel (0 = x, 1 = y)
  long column = 0;           // global grid index of the port row along `axis`
  int inward = 0;            // +1 or -1 along `axis`
  double centerline = 0.0;   // transverse coordinate of the channel axis
  double width = 0.0;
};

struct Builder {
  double dx = 0.0;
  Vec2 anchor = Vec2::Zero();
  std::vector<Box2> boxes;
  std::vector<PortSpec> ports;

  // Global cell index whose centre is nearest to coordinate `s` on `axis`,
  // ties resolved in direction `inward`.
  long nearest_center(double s, int axis, int inward) const {
    const double t = (s - anchor[axis]) / dx - 0.5;
    const double lo = std::floor(t);
    if (std::abs(t - lo - 0.5) < kGridTolerance)
      return static_cast<long>(lo) + (inward > 0 ? 1 : 0);
    return static_cast<long>(std::lround(t));
  }
  double center_of(long k, int axis) const { return anchor[axis] + (double(k) + 0.5) * dx; }

  // Adds a port row nearest `section` and returns the coordinate of its outer face.
  double add_port(PortId id, const Vec2& section, int axis, int inward, double width) {
    PortSpec p;
    p.id = id;
    p.axis = axis;
    p.inward = inward;
    p.column = nearest_center(section[axis], axis, inward);
    p.centerline = section[1 - axis];
    p.width = width;
    ports.push_back(p);
    return center_of(p.column, axis) - inward * 0.5 * dx;
  }

  void add_box(int axis, double axial_a, double axial_b, double centerline, double width) {
    Vec2 lo, hi;
    lo[axis] = std::min(axial_a, axial_b);
    hi[axis] = std::max(axial_a, axial_b);
    lo[1 - axis] = centerline - 0.5 * width;
    hi[1 - axis] = centerline + 0.5 * width;
    boxes.emplace_back(lo, hi);
  }

  LatticeGeometry finish() const {
    Box2 bounds;
    for (const auto& b : boxes) bounds.extend(b);
    bounds.min().array() -= dx;
    bounds.max().array() += dx;

    LatticeGeometry g;
    g.dx = dx;
    Eigen::Vector2i offset;
    for (int a = 0; a < 2; ++a) {
      offset[a] = static_cast<int>(std::floor((bounds.min()[a] - anchor[a]) / dx + kGridTolerance));
      g.origin[a] = anchor[a] + offset[a] * dx;
    }
    g.nx = static_cast<int>(std::ceil((bounds.max().x() - g.origin.x()) / dx - kGridTolerance));
    g.ny = static_cast<int>(std::ceil((bounds.max().y() - g.origin.y()) / dx - kGridTolerance));
    g.fluid.setZero(g.nx, g.ny);

    const double eps = kGridTolerance * dx;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const Vec2 c = g.cell_center(i, j);
        for (const auto& b : boxes) {
          if (c.x() > b.min().x() + eps && c.x() < b.max().x() - eps && c.y() > b.min().y() + eps &&
              c.y() < b.max().y() - eps) {
            g.fluid(i, j) = 1;
            break;
          }
        }
      }
    }

    for (const auto& spec : ports) {
      PortSection section;
      section.id = spec.id;
      section.width = spec.width;
      section.inward_normal[spec.axis] = spec.inward;
      const long local = spec.column - offset[spec.axis];
      const int t_axis = 1 - spec.axis;
      const int t_count = t_axis == 0 ? g.nx : g.ny;
      for (int t = 0; t < t_count; ++t) {
        Eigen::Vector2i cell;
        cell[spec.axis] = static_cast<int>(local);
        cell[t_axis] = t;
        if (cell.x() < 0 || cell.y() < 0 || cell.x() >= g.nx || cell.y() >= g.ny) continue;
        const double transverse = g.cell_center(cell.x(), cell.y())[t_axis];
        if (std::abs(transverse - spec.centerline) > 0.5 * spec.width + eps) continue;
        if (!g.fluid(cell.x(), cell.y())) continue;
        const Eigen::Vector2i outside = cell - section.inward_normal;
        if (outside.x() >= 0 && outside.y() >= 0 && outside.x() < g.nx && outside.y() < g.ny &&
            g.fluid(outside.x(), outside.y()))
          throw PreconditionError("port " + std::to_string(spec.id) +
                                  ": section is not an open boundary of the fluid domain");
        section.cells.push_back(cell);
      }
      if (section.cells.empty())
        throw PreconditionError("port " + std::to_string(spec.id) + ": no fluid cells on section");
      Vec2 mid = Vec2::Zero();
      for (const auto& c : section.cells) mid += g.cell_center(c.x(), c.y());
      section.center = mid / double(section.cells.size());
      g.ports.push_back(std::move(section));
    }
    return g;
  }
};

// Axis index of an axis-aligned unit direction, with its sign.
std::pair<int, int> axis_of(const Vec2& d, const std::string& what) {
  constexpr double tol = 1e-9;
  if (std::abs(d.y()) < tol && std::abs(std::abs(d.x()) - 1.0) < tol) return {0, d.x() > 0 ? 1 : -1};
  if (std::abs(d.x()) < tol && std::abs(std::abs(d.y()) - 1.0) < tol) return {1, d.y() > 0 ? 1 : -1};
  throw PreconditionError(what + ": section is not axis-aligned");
}

double half_core(const Network& net, NodeId node) {
  double h = 0.0;
  for (ChannelId c : net.incident(node)) h = std::max(h, 0.5 * net.channel(c).width);
  return h;
}

Builder make_builder(const Network& net, int resolution) {
  Builder b;
  b.dx = lattice_spacing(net, resolution);
  double w_min = std::numeric_limits<double>::infinity();
  for (const auto& c : net.channels) w_min = std::min(w_min, c.width);
  b.anchor = net.nodes.front().position - Vec2::Constant(0.5 * w_min);
  return b;
}

}  // namespace

const PortSection& LatticeGeometry::port(PortId id) const {
  auto it = std::find_if(ports.begin(), ports.end(), [id](const auto& p) { return p.id == id; });
  if (it == ports.end()) throw PreconditionError("port " + std::to_string(id) + ": not on lattice");
  return *it;
}

double lattice_spacing(const Network& network, int resolution) {
  if (resolution < 8) throw PreconditionError("resolution must be at least 8 cells per width");
  if (network.channels.empty()) throw PreconditionError("network has no channels");
  double w_min = std::numeric_limits<double>::infinity();
  for (const auto& c : network.channels) w_min = std::min(w_min, c.width);
  return w_min / resolution;
}

LatticeGeometry region_geometry(const Decomposition& d, RegionId region_id, int resolution) {
  const Network& net = d.network;
  const CfdRegion& region = d.region(region_id);
  Builder b = make_builder(net, resolution);

  const Vec2 junction = net.node(region.junction_node).position;
  const double core = half_core(net, region.junction_node);
  b.boxes.emplace_back(junction - Vec2::Constant(core), junction + Vec2::Constant(core));

  for (PortId pid : region.ports) {
    const InterfacePort& port = d.port(pid);
    const auto [axis, outward] = axis_of(-port.inward_normal, "port " + std::to_string(pid));
    const double face = b.add_port(pid, port.center, axis, -outward, port.width);
    b.add_box(axis, junction[axis] - outward * core, face, junction[1 - axis], port.width);
  }
  return b.finish();
}

LatticeGeometry monolithic_geometry(const Network& net, int resolution) {
  Builder b = make_builder(net, resolution);
  for (const auto& c : net.channels) {
    const Vec2 pa = net.node(c.node_a).position;
    const Vec2 pb = net.node(c.node_b).position;
    const Vec2 dir = (pb - pa).normalized();
    const auto [axis, sign] = axis_of(dir, "channel " + std::to_string(c.id));

    auto end_face = [&](NodeId node, const Vec2& pos, int into_channel) {
      if (net.node(node).is_ground()) return b.add_port(node, pos, axis, into_channel, c.width);
      return pos[axis] - into_channel * half_core(net, node);
    };
    const double fa = end_face(c.node_a, pa, sign);
    const double fb = end_face(c.node_b, pb, -sign);
    b.add_box(axis, fa, fb, pa[1 - axis], c.width);
  }
  return b.finish();
}

std::optional<Eigen::Index> locate(const LatticeGeometry& geometry,
                                   const Eigen::ArrayXXi& cell_index, const Vec2& point) {
  const double dx = geometry.dx;
  const Vec2 t = (point - geometry.origin) / dx - Vec2::Constant(0.5);
  std::optional<Eigen::Index> best;
  double best_d = std::numeric_limits<double>::infinity();
  const int i0 = static_cast<int>(std::floor(t.x()));
  const int j0 = static_cast<int>(std::floor(t.y()));
  for (int i = i0; i <= i0 + 1; ++i) {
    for (int j = j0; j <= j0 + 1; ++j) {
      if (i < 0 || j < 0 || i >= geometry.nx || j >= geometry.ny || cell_index(i, j) < 0) continue;
      const Vec2 off = geometry.cell_center(i, j) - point;
      if (off.cwiseAbs().maxCoeff() > 0.5 * dx * (1 + 1e-9)) continue;
      const double d = off.squaredNorm();
      if (d < best_d - 1e-12 * dx * dx) {
        best_d = d;
        best = cell_index(i, j);
      }
    }
  }
  return best;
}

}  // namespace mfd::lbm
