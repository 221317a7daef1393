#include "mfd/coupling.hpp"

#include <cmath>
#include <sstream>

namespace mfd::coupling {

namespace {

std::string where(const Vec2& p) {
  std::ostringstream s;
  s << "(" << p.x() << ", " << p.y() << ")";
  return s.str();
}

NodeId terminal_node(const Decomposition& d, const Terminal& t) {
  return t.kind == Terminal::Kind::node ? t.id : d.port(t.id).junction_node;
}

// Pressure and centreline speed at `point` if it lies on an Ω_high segment.
std::optional<ProbeValue> sample_segment(const HybridResult& r, const Vec2& point) {
  const Decomposition& d = r.decomposition;
  const double mu = d.network.fluid.dynamic_viscosity();
  for (const auto& seg : d.segments) {
    const int edge = [&] {
      const std::string label = "s" + std::to_string(seg.id);
      for (std::size_t k = 0; k < r.problem.edges.size(); ++k)
        if (r.problem.edges[k].label == label) return static_cast<int>(k);
      return -1;
    }();
    if (edge < 0) continue;

    NodeId from = terminal_node(d, seg.a);
    double offset = 0.0;  // arc length from terminal a to the current span start
    for (const auto& span : seg.spans) {
      const Channel& c = d.network.channel(span.channel);
      const bool forward = c.node_a == from;
      const Vec2 a = d.network.node(c.node_a).position;
      const Vec2 b = d.network.node(c.node_b).position;
      const Vec2 axis = (b - a).normalized();
      const Vec2 rel = point - a;
      const double s = rel.dot(axis);
      const double off = std::abs(rel.x() * axis.y() - rel.y() * axis.x());
      const double tol = 1e-9 * c.length;
      if (off <= 0.5 * c.width + tol && s >= span.begin - tol && s <= span.end + tol) {
        const double arc = offset + (forward ? s - span.begin : span.end - s);
        const auto& e = r.problem.edges[static_cast<std::size_t>(edge)];
        const double q = r.solution.flows[edge];
        const double p_a = r.solution.pressures[e.i];
        const double per_length = mna::channel_resistance(1.0, seg.width, mu);
        return ProbeValue{p_a - q * per_length * std::max(arc, 0.0), 1.5 * std::abs(q) / seg.width};
      }
      offset += span.length();
      from = forward ? c.node_b : c.node_a;
    }
  }
  return std::nullopt;
}

}  // namespace

ProbeValue sample(const HybridResult& result, const Vec2& point) {
  for (const auto& region : result.regions)
    if (const auto s = lbm::sample(region.fields, point)) return {s->pressure, s->velocity.norm()};
  if (const auto v = sample_segment(result, point)) return *v;
  throw PreconditionError("probe " + where(point) + " lies outside every region and segment");
}

ProbeValue sample(const CfdResult& result, const Vec2& point) {
  if (const auto s = lbm::sample(result.fields, point)) return {s->pressure, s->velocity.norm()};
  throw PreconditionError("probe " + where(point) + " lies outside the lattice");
}

double relative_deviation(double reference, double proposed) {
  if (reference == proposed) return 0.0;
  return (proposed - reference) / std::abs(reference);
}

Comparison compare(const HybridResult& hybrid, const CfdResult& baseline,
                   const std::vector<Probe>& probes) {
  Comparison out;
  for (const auto& probe : probes) {
    ProbeComparison row;
    row.label = probe.label;
    row.cfd = sample(baseline, probe.position);
    row.hybrid = sample(hybrid, probe.position);
    row.pressure_deviation = relative_deviation(row.cfd.pressure, row.hybrid.pressure);
    row.speed_deviation = relative_deviation(row.cfd.speed, row.hybrid.speed);
    out.probes.push_back(row);
  }
  out.cfd_seconds = baseline.seconds;
  out.hybrid_seconds = hybrid.seconds;
  out.speedup = hybrid.seconds > 0.0 ? baseline.seconds / hybrid.seconds : 0.0;
  return out;
}

}  // namespace mfd::coupling
