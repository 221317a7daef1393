#pragma once

#include "mfd/netmodel.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace mfd::lbm {

/// Open boundary of a lattice: one straight row or column of fluid cells.
struct PortSection {
  PortId id = 0;
  std::vector<Eigen::Vector2i> cells;  // grid coordinates, ordered along the section
  Eigen::Vector2i inward_normal = Eigen::Vector2i::Zero();
  double width = 0.0;
  Vec2 center = Vec2::Zero();  // physical midpoint of the port cell row
};

/// Voxelized fluid domain on a regular grid. Cell (i, j) covers
/// [origin + (i, j) dx, origin + (i + 1, j + 1) dx).
struct LatticeGeometry {
  double dx = 0.0;
  Vec2 origin = Vec2::Zero();
  int nx = 0;
  int ny = 0;
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> fluid;  // nx x ny
  std::vector<PortSection> ports;

  Vec2 cell_center(int i, int j) const {
    return origin + dx * Vec2(double(i) + 0.5, double(j) + 0.5);
  }
  Eigen::Index fluid_count() const { return (fluid != 0).count(); }
  const PortSection& port(PortId id) const;
};

/// Lattice spacing shared by every lattice of a network: narrowest width / resolution.
double lattice_spacing(const Network& network, int resolution);

/// Junction square plus channel stubs up to each port section of `region`.
/// Port rows sit on the cell centre nearest the section, ties resolved toward
/// the junction. Throws PreconditionError for non-axis-aligned channels.
LatticeGeometry region_geometry(const Decomposition& decomposition, RegionId region,
                                int resolution);

/// Whole network; ground nodes become ports (port id = node id).
LatticeGeometry monolithic_geometry(const Network& network, int resolution);

/// Fluid cell whose square contains `point`; ties go to lower x, then lower y.
/// `cell_index` is nx x ny with -1 outside the fluid.
std::optional<Eigen::Index> locate(const LatticeGeometry& geometry,
                                   const Eigen::ArrayXXi& cell_index, const Vec2& point);

}  // namespace mfd::lbm
