#pragma once

#include "mfd/error.hpp"
#include "mfd/lbm/d2q9.hpp"
#include "mfd/lbm/geometry.hpp"
#include "mfd/lbm/units.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mfd::lbm {

/// SI macroscopic fields on the fluid cells of one lattice.
struct Macroscopics {
  LatticeGeometry grid;
  Eigen::Matrix2Xd position;  // cell centres [m]
  Eigen::VectorXd pressure;   // [Pa]
  Eigen::Matrix2Xd velocity;  // [m/s]
  Eigen::ArrayXXi cell;       // nx x ny, fluid cell index or -1
};

struct PortMeasurement {
  double pressure = 0.0;   // section average [Pa]
  double flow_rate = 0.0;  // inward positive [m^2/s]
};

struct FieldSample {
  double pressure = 0.0;
  Vec2 velocity = Vec2::Zero();
};

enum class BoundaryKind { unset, pressure, flow };

struct BoundaryValue {
  BoundaryKind kind = BoundaryKind::unset;
  double value = 0.0;  // [Pa] or [m^2/s]
};

/// D2Q9 single-relaxation-time lattice over the fluid cells of a LatticeGeometry.
/// Uses the incompressible equilibrium, halfway bounce-back on walls, and
/// regularized Zou-He type non-equilibrium conditions on ports.
template <typename Scalar>
class BasicLattice {
 public:
  using Populations = Eigen::Array<Scalar, D2Q9::Q, Eigen::Dynamic>;

  BasicLattice(LatticeGeometry geometry, UnitConverter<Scalar> converter)
      : geometry_(std::move(geometry)), converter_(std::move(converter)) {
    index_.setConstant(geometry_.nx, geometry_.ny, -1);
    for (int j = 0; j < geometry_.ny; ++j)
      for (int i = 0; i < geometry_.nx; ++i)
        if (geometry_.fluid(i, j)) {
          index_(i, j) = static_cast<int>(coords_.size());
          coords_.emplace_back(i, j);
        }
    const Eigen::Index n = static_cast<Eigen::Index>(coords_.size());
    if (n == 0) throw PreconditionError("lattice has no fluid cells");

    port_slot_.assign(coords_.size(), -1);
    for (const auto& section : geometry_.ports) {
      PortState state;
      state.id = section.id;
      state.normal = section.inward_normal;
      state.width = section.width;
      for (const auto& c : section.cells) {
        const int idx = index_(c.x(), c.y());
        state.cells.push_back(idx);
        port_slot_[idx] = static_cast<int>(ports_.size());
      }
      ports_.push_back(std::move(state));
    }
    for (const auto& p : ports_) {
      for (int c : p.cells) {
        const auto [i, j] = coords_[c];
        const int ii = i + p.normal.x(), jj = j + p.normal.y();
        const bool ok = ii >= 0 && jj >= 0 && ii < geometry_.nx && jj < geometry_.ny &&
                        index_(ii, jj) >= 0 && port_slot_[index_(ii, jj)] < 0;
        if (!ok)
          throw PreconditionError("port " + std::to_string(p.id) + ": no interior cell behind the section");
      }
    }

    // Pull-streaming sources: neighbour index, or bounce-back / open markers.
    sources_.resize(D2Q9::Q, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto [i, j] = coords_[c];
      const int slot = port_slot_[c];
      for (int q = 0; q < D2Q9::Q; ++q) {
        if (slot >= 0) {
          const auto& normal = geometry_.ports[slot].inward_normal;
          if (D2Q9::cx[q] * normal.x() + D2Q9::cy[q] * normal.y() > 0) {
            sources_(q, c) = kOpen;
            continue;
          }
        }
        const int si = i - D2Q9::cx[q];
        const int sj = j - D2Q9::cy[q];
        const bool inside = si >= 0 && sj >= 0 && si < geometry_.nx && sj < geometry_.ny;
        sources_(q, c) = inside && index_(si, sj) >= 0 ? index_(si, sj) : kBounce;
      }
    }
    f_.setZero(D2Q9::Q, n);
    scratch_.setZero(D2Q9::Q, n);
  }

  const LatticeGeometry& geometry() const { return geometry_; }
  const UnitConverter<Scalar>& converter() const { return converter_; }
  Eigen::Index cell_count() const { return static_cast<Eigen::Index>(coords_.size()); }
  long iteration() const { return iteration_; }
  const Populations& populations() const { return f_; }

  /// Equilibrium populations from an SI field sampled at every fluid cell centre.
  void initialize(const std::function<FieldSample(const Vec2&)>& field) {
    for (Eigen::Index c = 0; c < cell_count(); ++c) {
      const FieldSample s = field(center(c));
      const Scalar drho = converter_.lattice_density_deviation(Scalar(s.pressure));
      const Scalar jx = converter_.lattice_velocity(Scalar(s.velocity.x()));
      const Scalar jy = converter_.lattice_velocity(Scalar(s.velocity.y()));
      for (int q = 0; q < D2Q9::Q; ++q) f_(q, c) = equilibrium_deviation(q, drho, jx, jy);
    }
    iteration_ = 0;
  }

  void initialize_uniform(double pressure) {
    initialize([pressure](const Vec2&) { return FieldSample{pressure, Vec2::Zero()}; });
  }

  void set_pressure_bc(PortId port, double pressure) {
    if (!std::isfinite(pressure))
      throw PreconditionError("port " + std::to_string(port) + ": pressure must be finite");
    PortState& s = state(port);
    s.value = {BoundaryKind::pressure, pressure};
    s.drho = converter_.lattice_density_deviation(Scalar(pressure));
  }

  /// Parabolic inflow profile 6 (Q/w) y (w - y) / w^2 across the section, inward positive.
  void set_flow_bc(PortId port, double flow_rate) {
    PortState& s = state(port);
    const double w = s.width;
    const double mean = flow_rate / w;
    const Scalar peak = converter_.lattice_velocity(Scalar(1.5 * std::abs(mean)));
    if (!std::isfinite(flow_rate) || peak > Scalar(kMaxLatticeVelocity))
      throw MachViolation("port " + std::to_string(port) + ": flow rate " +
                          std::to_string(flow_rate) + " m^2/s exceeds lattice velocity 0.1");
    s.value = {BoundaryKind::flow, flow_rate};
    s.profile.resize(s.cells.size());
    const double dx = double(converter_.dx());
    // Cells are ordered along the section; y runs from the first cell's outer wall.
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
      const double y = (double(k) + 0.5) * dx;
      s.profile[k] = converter_.lattice_velocity(Scalar(6.0 * mean * y * (w - y) / (w * w)));
    }
  }

  const BoundaryValue& boundary_value(PortId port) const { return state(port).value; }

  /// One collide-stream cycle.
  void step() {
    const Eigen::Index n = cell_count();
    const Scalar omega = converter_.omega();
    const Scalar* f = f_.data();
    Scalar* out = scratch_.data();
    const int* src = sources_.data();
    bad_cell_ = -1;

    for (Eigen::Index c = 0; c < n; ++c) {
      Scalar g[D2Q9::Q];
      const int* s = src + c * D2Q9::Q;
      for (int q = 0; q < D2Q9::Q; ++q) {
        const int from = s[q];
        g[q] = from >= 0 ? f[from * D2Q9::Q + q]
                         : (from == kBounce ? f[c * D2Q9::Q + D2Q9::opposite[q]] : Scalar(0));
      }
      Scalar* o = out + c * D2Q9::Q;
      if (port_slot_[c] >= 0) {
        for (int q = 0; q < D2Q9::Q; ++q) o[q] = g[q];
      } else {
        collide(g, o, omega, c);
      }
    }

    for (auto& p : ports_) {
      if (p.value.kind == BoundaryKind::unset)
        throw PreconditionError("port " + std::to_string(p.id) + ": no boundary value set");
      apply_port(p, omega);
    }

    f_.swap(scratch_);
    ++iteration_;
    if (bad_cell_ >= 0) {
      throw DivergenceError("lattice diverged at cell " + std::to_string(bad_cell_) +
                                ", iteration " + std::to_string(iteration_),
                            bad_cell_, iteration_);
    }
  }

  void advance(long steps) {
    for (long k = 0; k < steps; ++k) step();
  }

  PortMeasurement measure_port(PortId port) const {
    const PortState& s = state(port);
    const auto& normal = s.normal;
    double drho = 0.0;
    double flux = 0.0;
    for (int c : s.cells) {
      const auto m = moments(c);
      drho += double(m[0]);
      flux += double(m[1]) * normal.x() + double(m[2]) * normal.y();
    }
    return {double(converter_.physical_pressure(Scalar(drho / double(s.cells.size())))),
            double(converter_.physical_flow(Scalar(flux)))};
  }

  Macroscopics macroscopics() const {
    Macroscopics m;
    m.grid = geometry_;
    m.cell = index_;
    const Eigen::Index n = cell_count();
    m.position.resize(2, n);
    m.pressure.resize(n);
    m.velocity.resize(2, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto mom = moments(c);
      m.position.col(c) = center(c);
      m.pressure[c] = double(converter_.physical_pressure(mom[0]));
      m.velocity(0, c) = double(converter_.physical_velocity(mom[1]));
      m.velocity(1, c) = double(converter_.physical_velocity(mom[2]));
    }
    return m;
  }

  /// L2 norm of the lattice velocity over all fluid cells.
  Scalar velocity_norm() const {
    Scalar sum = 0;
    for (Eigen::Index c = 0; c < cell_count(); ++c) {
      const auto m = moments(c);
      sum += m[1] * m[1] + m[2] * m[2];
    }
    return std::sqrt(sum);
  }

  /// Fluid cell containing `point` (nearest centre, ties to lower x then lower y).
  std::optional<Eigen::Index> locate(const Vec2& point) const {
    return lbm::locate(geometry_, index_, point);
  }

  std::optional<FieldSample> probe(const Vec2& point) const {
    const auto c = locate(point);
    if (!c) return std::nullopt;
    const auto m = moments(*c);
    return FieldSample{double(converter_.physical_pressure(m[0])),
                       Vec2(double(converter_.physical_velocity(m[1])),
                            double(converter_.physical_velocity(m[2])))};
  }

  Vec2 center(Eigen::Index c) const {
    return geometry_.cell_center(coords_[c].first, coords_[c].second);
  }

  /// Density deviation and momentum (lattice units) of cell `c`.
  Eigen::Array<Scalar, 3, 1> moments(Eigen::Index c) const {
    Eigen::Array<Scalar, 3, 1> m = Eigen::Array<Scalar, 3, 1>::Zero();
    for (int q = 0; q < D2Q9::Q; ++q) {
      const Scalar v = f_(q, c);
      m[0] += v;
      m[1] += Scalar(D2Q9::cx[q]) * v;
      m[2] += Scalar(D2Q9::cy[q]) * v;
    }
    return m;
  }

 private:
  static constexpr int kBounce = -1;
  static constexpr int kOpen = -2;

  struct PortState {
    PortId id = 0;
    Eigen::Vector2i normal = Eigen::Vector2i::Zero();
    double width = 0.0;
    std::vector<int> cells;
    BoundaryValue value;
    Scalar drho = 0;
    std::vector<Scalar> profile;  // inward lattice velocity per cell
  };

  PortState& state(PortId port) {
    for (auto& p : ports_)
      if (p.id == port) return p;
    throw PreconditionError("port " + std::to_string(port) + ": not on lattice");
  }
  const PortState& state(PortId port) const {
    return const_cast<BasicLattice*>(this)->state(port);
  }

  void collide(const Scalar* g, Scalar* out, Scalar omega, Eigen::Index c) {
    Scalar drho = 0, jx = 0, jy = 0;
    for (int q = 0; q < D2Q9::Q; ++q) {
      drho += g[q];
      jx += Scalar(D2Q9::cx[q]) * g[q];
      jy += Scalar(D2Q9::cy[q]) * g[q];
    }
    if (!(drho > Scalar(-1)) || !std::isfinite(jx + jy)) {
      if (bad_cell_ < 0) bad_cell_ = static_cast<long>(c);
    }
    for (int q = 0; q < D2Q9::Q; ++q)
      out[q] = g[q] - omega * (g[q] - equilibrium_deviation(q, drho, jx, jy));
  }

  // Reconstructs the populations entering from outside the section, then collides.
  void apply_port(PortState& p, Scalar omega) {
    const int nx = p.normal.x();
    const int ny = p.normal.y();
    Scalar* out = scratch_.data();
    for (std::size_t k = 0; k < p.cells.size(); ++k) {
      const int c = p.cells[k];
      Scalar* g = out + c * D2Q9::Q;

      Scalar parallel = 0, outgoing = 0;
      for (int q = 0; q < D2Q9::Q; ++q) {
        const int cn = D2Q9::cx[q] * nx + D2Q9::cy[q] * ny;
        if (cn == 0) parallel += g[q];
        if (cn < 0) outgoing += g[q];
      }
      Scalar drho, jn;
      if (p.value.kind == BoundaryKind::pressure) {
        drho = p.drho;
        // Normal momentum from the inward neighbour: the closure from the knowns
        // alone reflects the staggered momentum mode at outflow sections.
        const auto [ci, cj] = coords_[c];
        const Scalar* h = out + index_(ci + nx, cj + ny) * D2Q9::Q;
        jn = 0;
        for (int q = 0; q < D2Q9::Q; ++q) jn += Scalar(D2Q9::cx[q] * nx + D2Q9::cy[q] * ny) * h[q];
      } else {
        jn = p.profile[k];
        drho = parallel + Scalar(2) * outgoing + jn;
      }
      const Scalar jx = jn * Scalar(nx);
      const Scalar jy = jn * Scalar(ny);

      // Non-equilibrium bounce-back for the unknown populations.
      for (int q = 0; q < D2Q9::Q; ++q) {
        const int cn = D2Q9::cx[q] * nx + D2Q9::cy[q] * ny;
        if (cn > 0) {
          const int o = D2Q9::opposite[q];
          g[q] = g[o] + Scalar(6 * D2Q9::weight[q]) *
                            (Scalar(D2Q9::cx[q]) * jx + Scalar(D2Q9::cy[q]) * jy);
        }
      }
      // Regularize: equilibrium plus the projected non-equilibrium stress.
      Scalar pxx = 0, pyy = 0, pxy = 0;
      for (int q = 0; q < D2Q9::Q; ++q) {
        const Scalar neq = g[q] - equilibrium_deviation<Scalar>(q, drho, jx, jy);
        pxx += Scalar(D2Q9::cx[q] * D2Q9::cx[q]) * neq;
        pyy += Scalar(D2Q9::cy[q] * D2Q9::cy[q]) * neq;
        pxy += Scalar(D2Q9::cx[q] * D2Q9::cy[q]) * neq;
      }
      for (int q = 0; q < D2Q9::Q; ++q) {
        const Scalar cx = D2Q9::cx[q], cy = D2Q9::cy[q];
        const Scalar qxx = cx * cx - Scalar(D2Q9::cs2), qyy = cy * cy - Scalar(D2Q9::cs2);
        g[q] = equilibrium_deviation<Scalar>(q, drho, jx, jy) +
               Scalar(4.5 * D2Q9::weight[q]) * (qxx * pxx + qyy * pyy + Scalar(2) * cx * cy * pxy);
      }

      Scalar copy[D2Q9::Q];
      for (int q = 0; q < D2Q9::Q; ++q) copy[q] = g[q];
      collide(copy, g, omega, c);
    }
  }

  LatticeGeometry geometry_;
  UnitConverter<Scalar> converter_;
  Eigen::ArrayXXi index_;
  std::vector<std::pair<int, int>> coords_;
  std::vector<int> port_slot_;
  std::vector<PortState> ports_;
  Eigen::Array<int, D2Q9::Q, Eigen::Dynamic> sources_;
  Populations f_;
  Populations scratch_;
  long iteration_ = 0;
  long bad_cell_ = -1;
};

using Lattice = BasicLattice<double>;

/// Nearest fluid-cell value of stored fields, or nullopt outside the fluid.
inline std::optional<FieldSample> sample(const Macroscopics& fields, const Vec2& point) {
  const auto c = locate(fields.grid, fields.cell, point);
  if (!c) return std::nullopt;
  return FieldSample{fields.pressure[*c], fields.velocity.col(*c)};
}

/// Region lattice with the converter's spacing. Populations start at rest with zero pressure.
Lattice build_region_lattice(const Decomposition& decomposition, RegionId region, int resolution,
                             const UnitConverter<double>& converter);
Lattice build_monolithic_lattice(const Network& network, int resolution,
                                 const UnitConverter<double>& converter);

}  // namespace mfd::lbm
