#pragma once

#include "mfd/lbm/lattice.hpp"

#include <ostream>

namespace mfd::lbm {

/// `x,y,pressure_pa,ux,uy`, one row per fluid cell, 6 significant digits.
void write_fields_csv(std::ostream& out, const Macroscopics& fields);

/// Legacy VTK structured points over the full grid; wall cells carry zeros and fluid = 0.
void write_fields_vtk(std::ostream& out, const Macroscopics& fields, const std::string& title);

}  // namespace mfd::lbm
