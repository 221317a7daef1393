#include "mfd/lbm/io.hpp"

#include <iomanip>

namespace mfd::lbm {

void write_fields_csv(std::ostream& out, const Macroscopics& fields) {
  out << "x,y,pressure_pa,ux,uy\n" << std::setprecision(6);
  for (Eigen::Index c = 0; c < fields.pressure.size(); ++c) {
    out << fields.position(0, c) << ',' << fields.position(1, c) << ',' << fields.pressure[c] << ','
        << fields.velocity(0, c) << ',' << fields.velocity(1, c) << '\n';
  }
}

void write_fields_vtk(std::ostream& out, const Macroscopics& fields, const std::string& title) {
  const auto& g = fields.grid;
  const Vec2 first = g.cell_center(0, 0);
  out << "# vtk DataFile Version 3.0\n"
      << title << "\nASCII\nDATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n"
      << std::setprecision(9) << "ORIGIN " << first.x() << ' ' << first.y() << " 0\n"
      << "SPACING " << g.dx << ' ' << g.dx << ' ' << g.dx << '\n'
      << "POINT_DATA " << static_cast<long>(g.nx) * g.ny << '\n';

  out << std::setprecision(6);
  out << "SCALARS pressure_pa double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = fields.cell(i, j);
      out << (c >= 0 ? fields.pressure[c] : 0.0) << '\n';
    }
  out << "VECTORS velocity double\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = fields.cell(i, j);
      if (c >= 0)
        out << fields.velocity(0, c) << ' ' << fields.velocity(1, c) << " 0\n";
      else
        out << "0 0 0\n";
    }
  out << "SCALARS fluid int 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out << (fields.cell(i, j) >= 0 ? 1 : 0) << '\n';
}

}  // namespace mfd::lbm
