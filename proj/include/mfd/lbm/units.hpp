#pragma once

#include "mfd/error.hpp"
#include "mfd/lbm/d2q9.hpp"
#include "mfd/netmodel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mfd::lbm {

inline constexpr double kMinTau = 0.55;
inline constexpr double kMaxTau = 1.99;
inline constexpr double kMaxLatticeVelocity = 0.1;
inline constexpr double kTargetLatticeVelocity = 0.05;

/// Physical <-> lattice conversion. Lattice density is kept as its deviation
/// from the reference value 1, which maps linearly onto gauge pressure.
template <typename Scalar>
class UnitConverter {
 public:
  UnitConverter(Scalar dx, Scalar dt, Scalar density, Scalar kinematic_viscosity)
      : dx_(dx), dt_(dt), density_(density), viscosity_(kinematic_viscosity) {
    if (!(dx > 0) || !(dt > 0) || !(density > 0) || !(kinematic_viscosity > 0))
      throw PreconditionError("UnitConverter: dx, dt, density and viscosity must be positive");
    const Scalar t = tau();
    if (!(t >= Scalar(kMinTau) - Scalar(1e-12)) || !(t <= Scalar(kMaxTau) + Scalar(1e-12)))
      throw PreconditionError("UnitConverter: relaxation time " + std::to_string(double(t)) +
                              " outside [0.55, 1.99]");
  }

  /// Picks dt so that `peak_velocity` maps to the target lattice velocity, clamps
  /// tau into its stable range, and rejects the result if the peak then exceeds
  /// the low-Mach limit.
  static UnitConverter for_peak_velocity(Scalar width, int resolution, const Fluid& fluid,
                                         Scalar peak_velocity) {
    if (resolution < 8) throw PreconditionError("resolution must be at least 8 cells per width");
    const Scalar dx = width / Scalar(resolution);
    const Scalar nu = Scalar(fluid.kinematic_viscosity);
    auto dt_for_tau = [&](Scalar tau) { return (tau - Scalar(0.5)) * Scalar(D2Q9::cs2) * dx * dx / nu; };

    Scalar dt = peak_velocity > 0 ? Scalar(kTargetLatticeVelocity) * dx / peak_velocity
                                  : std::numeric_limits<Scalar>::infinity();
    const Scalar tau = nu * dt / (Scalar(D2Q9::cs2) * dx * dx) + Scalar(0.5);
    if (tau < Scalar(kMinTau)) dt = dt_for_tau(Scalar(kMinTau));
    if (tau > Scalar(kMaxTau)) dt = dt_for_tau(Scalar(kMaxTau));

    if (peak_velocity * dt / dx > Scalar(kMaxLatticeVelocity) * (1 + Scalar(1e-12)))
      throw MachViolation("peak velocity " + std::to_string(double(peak_velocity)) +
                          " m/s exceeds lattice velocity 0.1 at tau 0.55; raise the resolution");
    return UnitConverter(dx, dt, Scalar(fluid.density), nu);
  }

  Scalar dx() const { return dx_; }
  Scalar dt() const { return dt_; }
  Scalar density() const { return density_; }
  Scalar kinematic_viscosity() const { return viscosity_; }

  Scalar tau() const { return viscosity_ * dt_ / (Scalar(D2Q9::cs2) * dx_ * dx_) + Scalar(0.5); }
  Scalar omega() const { return Scalar(1) / tau(); }

  Scalar velocity_scale() const { return dx_ / dt_; }
  Scalar pressure_scale() const {
    return density_ * velocity_scale() * velocity_scale() * Scalar(D2Q9::cs2);
  }
  /// Flow rate per unit depth carried by one cell at unit lattice velocity.
  Scalar flow_scale() const { return velocity_scale() * dx_; }

  Scalar lattice_velocity(Scalar u) const { return u / velocity_scale(); }
  Scalar physical_velocity(Scalar u_lat) const { return u_lat * velocity_scale(); }

  Scalar lattice_density_deviation(Scalar pressure) const { return pressure / pressure_scale(); }
  Scalar lattice_density(Scalar pressure) const { return Scalar(1) + lattice_density_deviation(pressure); }
  Scalar physical_pressure(Scalar drho) const { return drho * pressure_scale(); }

  Scalar lattice_flow(Scalar q) const { return q / flow_scale(); }
  Scalar physical_flow(Scalar q_lat) const { return q_lat * flow_scale(); }

 private:
  Scalar dx_;
  Scalar dt_;
  Scalar density_;
  Scalar viscosity_;
};

}  // namespace mfd::lbm
