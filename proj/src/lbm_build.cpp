#include "mfd/lbm/lattice.hpp"

#include <cmath>

namespace mfd::lbm {

namespace {

void require_spacing(const UnitConverter<double>& converter, double dx) {
  if (std::abs(converter.dx() - dx) > 1e-12 * dx)
    throw PreconditionError("unit converter spacing does not match width / resolution");
}

}  // namespace

Lattice build_region_lattice(const Decomposition& decomposition, RegionId region, int resolution,
                             const UnitConverter<double>& converter) {
  require_spacing(converter, lattice_spacing(decomposition.network, resolution));
  Lattice lattice(region_geometry(decomposition, region, resolution), converter);
  lattice.initialize_uniform(0.0);
  return lattice;
}

Lattice build_monolithic_lattice(const Network& network, int resolution,
                                 const UnitConverter<double>& converter) {
  require_spacing(converter, lattice_spacing(network, resolution));
  Lattice lattice(monolithic_geometry(network, resolution), converter);
  lattice.initialize_uniform(0.0);
  return lattice;
}

}  // namespace mfd::lbm
