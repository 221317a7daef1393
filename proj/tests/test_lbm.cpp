#include "mfd/lbm/io.hpp"
#include "mfd/lbm/lattice.hpp"

#include "cases.hpp"
#include "doctest.h"

#include <sstream>

using namespace mfd;
using lbm::UnitConverter;

namespace {

UnitConverter<double> straight_converter(int resolution, double peak) {
  return UnitConverter<double>::for_peak_velocity(1e-4, resolution, Fluid{}, peak);
}

}  // namespace

TEST_CASE("unit conversion round-trips") {
  const UnitConverter<double> c(5e-6, 2e-6, 1000.0, 1e-6);
  CHECK(c.tau() == doctest::Approx(0.5 + 1e-6 * 2e-6 * 3.0 / 25e-12));
  for (double v : {-0.3, 0.0, 0.02, 1.7}) {
    CHECK(std::abs(c.physical_velocity(c.lattice_velocity(v)) - v) <= 1e-12 * std::max(1.0, std::abs(v)));
    CHECK(std::abs(c.physical_pressure(c.lattice_density_deviation(v * 1e3)) - v * 1e3) <=
          1e-12 * std::max(1.0, std::abs(v * 1e3)));
    CHECK(std::abs(c.physical_flow(c.lattice_flow(v * 1e-4)) - v * 1e-4) <= 1e-12 * 1e-4);
  }
  CHECK(c.lattice_density(0.0) == 1.0);
  CHECK_THROWS_AS(UnitConverter<double>(5e-6, 1e-9, 1000.0, 1e-6), PreconditionError);
  CHECK_THROWS_AS(UnitConverter<double>(0.0, 1e-6, 1000.0, 1e-6), PreconditionError);
}

TEST_CASE("dt policy") {
  const auto c = straight_converter(20, 0.125);
  CHECK(c.lattice_velocity(0.125) == doctest::Approx(lbm::kTargetLatticeVelocity));
  const auto slow = straight_converter(20, 1e-6);
  CHECK(slow.tau() == doctest::Approx(lbm::kMaxTau));
  CHECK(straight_converter(20, 0.0).tau() == doctest::Approx(lbm::kMaxTau));
  const auto fast = straight_converter(8, 0.4);
  CHECK(fast.tau() == doctest::Approx(lbm::kMinTau));
  CHECK(fast.lattice_velocity(0.4) > lbm::kTargetLatticeVelocity);
  CHECK_THROWS_AS(straight_converter(8, 1.0), MachViolation);
  CHECK_THROWS_AS(straight_converter(4, 0.1), PreconditionError);
}

TEST_CASE("geometry: cell counts and port rows") {
  const auto whole = lbm::monolithic_geometry(canonical::cross(), 10);
  // Two 200 x 10 strips sharing a 10 x 10 crossing.
  CHECK(whole.fluid_count() == 2 * 200 * 10 - 100);
  CHECK(whole.ports.size() == 4);
  for (const auto& p : whole.ports) CHECK(p.cells.size() == 10);

  const Decomposition d = decompose(canonical::cross());
  const auto region = lbm::region_geometry(d, 0, 10);
  CHECK(region.fluid_count() == 2 * 40 * 10 - 100);
  for (const auto& p : region.ports) CHECK(p.center.norm() == doctest::Approx(1.95e-4));
}

TEST_CASE("fluid at rest stays at rest") {
  const Network net = canonical::straight_channel(1e-3, 1e-4, 500.0, 500.0);
  const auto c = straight_converter(10, 0.05);
  lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 10, c);
  lattice.initialize_uniform(500.0);
  lattice.set_pressure_bc(0, 500.0);
  lattice.set_pressure_bc(1, 500.0);
  const auto before = lattice.populations();
  lattice.advance(1000);
  CHECK((lattice.populations() - before).abs().maxCoeff() <= 1e-13);
  CHECK(lattice.iteration() == 1000);
}

TEST_CASE("Poiseuille flow converges to the analytic solution") {
  const auto coarse = test::run_poiseuille(10);
  const auto fine = test::run_poiseuille(20);
  CHECK(fine.profile_error <= 0.01);
  CHECK(coarse.profile_error <= 0.04);
  CHECK(fine.profile_error < coarse.profile_error);
  CHECK(std::abs(fine.conductance_ratio - 1.0) <= 0.01);
  CHECK(fine.flow_imbalance <= 1e-6);
  CHECK(fine.transverse_spread <= 1e-6);
}

TEST_CASE("a uniform pressure offset leaves the velocity unchanged") {
  auto run = [](double offset) {
    const Network net = canonical::straight_channel(1e-3, 1e-4, 100.0 + offset, offset);
    const auto c = straight_converter(10, 0.125);
    lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 10, c);
    lattice.initialize_uniform(offset);
    lattice.set_pressure_bc(0, 100.0 + offset);
    lattice.set_pressure_bc(1, offset);
    lattice.advance(3000);
    return lattice.macroscopics();
  };
  const auto a = run(0.0), b = run(250.0);
  const double scale = a.velocity.cwiseAbs().maxCoeff();
  CHECK((a.velocity - b.velocity).cwiseAbs().maxCoeff() <= 1e-9 * scale);
  CHECK(((b.pressure - a.pressure).array() - 250.0).abs().maxCoeff() <= 1e-9 * 250.0);
}

TEST_CASE("mass balance with a flow inlet") {
  const Network net = canonical::straight_channel();
  const auto c = straight_converter(10, 0.125);
  lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 10, c);
  const double q = 5e-6;
  lattice.set_flow_bc(0, q);
  lattice.set_pressure_bc(1, 0.0);
  lattice.advance(20000);
  const auto in = lattice.measure_port(0), out = lattice.measure_port(1);
  CHECK(in.flow_rate == doctest::Approx(q).epsilon(0.005));
  CHECK(std::abs(in.flow_rate + out.flow_rate) <= 0.005 * q);
  CHECK(lattice.boundary_value(0).kind == lbm::BoundaryKind::flow);
  CHECK(in.pressure > 0.0);
}

TEST_CASE("boundary preconditions") {
  const Network net = canonical::straight_channel();
  const auto c = straight_converter(10, 0.125);
  lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 10, c);
  CHECK_THROWS_AS(lattice.step(), PreconditionError);
  CHECK_THROWS_AS(lattice.set_flow_bc(0, 1.0), MachViolation);
  CHECK_THROWS_AS(lattice.set_pressure_bc(7, 0.0), PreconditionError);
  CHECK_THROWS_AS(lattice.set_pressure_bc(0, std::nan("")), PreconditionError);
  CHECK_THROWS_AS(lbm::build_monolithic_lattice(net, 20, c), PreconditionError);
}

TEST_CASE("diverging lattice reports the cell") {
  const Network net = canonical::straight_channel();
  const auto c = straight_converter(8, 0.4);
  lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 8, c);
  lattice.set_pressure_bc(0, c.physical_pressure(2.0));
  lattice.set_pressure_bc(1, 0.0);
  CHECK_THROWS_AS(lattice.advance(100000), DivergenceError);
}

TEST_CASE("locate and sample") {
  const Network net = canonical::straight_channel();
  const auto c = straight_converter(10, 0.125);
  lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 10, c);
  lattice.initialize([](const Vec2& x) { return lbm::FieldSample{1e5 * x.x(), Vec2(0.01, 0.0)}; });
  const auto cell = lattice.locate(Vec2(2.33e-4, 1e-6));
  REQUIRE(cell);
  CHECK((lattice.center(*cell) - Vec2(2.35e-4, 5e-6)).norm() < 1e-12);
  // On a face: lower x wins.
  const auto face = lattice.locate(Vec2(2.4e-4, 1e-6));
  REQUIRE(face);
  CHECK(lattice.center(*face).x() == doctest::Approx(2.35e-4));
  CHECK_FALSE(lattice.locate(Vec2(2e-4, 1e-4)));

  const auto fields = lattice.macroscopics();
  const auto s = lbm::sample(fields, Vec2(2.33e-4, 1e-6));
  REQUIRE(s);
  CHECK(s->pressure == doctest::Approx(23.5));
  CHECK(s->velocity.x() == doctest::Approx(0.01));
  CHECK_FALSE(lbm::sample(fields, Vec2(0.0, 1.0)));
  CHECK(lattice.probe(Vec2(2.33e-4, 1e-6))->pressure == doctest::Approx(23.5));
}

TEST_CASE("field writers") {
  const Network net = canonical::straight_channel();
  const auto c = straight_converter(10, 0.125);
  lbm::Lattice lattice = lbm::build_monolithic_lattice(net, 10, c);
  const auto fields = lattice.macroscopics();
  std::ostringstream csv, vtk;
  lbm::write_fields_csv(csv, fields);
  lbm::write_fields_vtk(vtk, fields, "rest");
  const std::string text = csv.str();
  CHECK(text.rfind("x,y,pressure_pa,ux,uy\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == lattice.cell_count() + 1);
  const std::string v = vtk.str();
  CHECK(v.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(v.find("DIMENSIONS " + std::to_string(fields.grid.nx) + " " + std::to_string(fields.grid.ny) + " 1") !=
        std::string::npos);
}
