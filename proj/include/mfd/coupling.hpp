#pragma once

#include "mfd/error.hpp"
#include "mfd/lbm/lattice.hpp"
#include "mfd/mna.hpp"
#include "mfd/netmodel.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mfd::coupling {

struct HybridConfig {
  double alpha = 0.01;
  int theta = 10;
  double epsilon = 0.01;
  int max_exchanges = 20000;
  int window = 10;  // exchanges over which the residual must stay below epsilon
  int resolution = 20;
  double interface_distance_widths = 2.0;
  bool warm_start = true;
  int threads = 0;  // 0: MFD_SIM_THREADS or hardware concurrency
};

/// Throws PreconditionError naming the offending field.
void validate(const HybridConfig& config);

enum class Quantity { pressure, flow };

enum class Status { running, converged, diverged, capped };

std::string to_string(Status status);

struct PortCoupling {
  PortId port = 0;
  Quantity kind = Quantity::pressure;
  double q_low = 0.0;   // imposed on the lattice [Pa] or [m^2/s]
  double q_high = 0.0;  // latest MNA value
  double q_high_previous = 0.0;
  double q_meas = 0.0;  // latest lattice measurement sent to the MNA
  double scale = 1.0;   // residual normalization
  double flow_scale = 1.0;
  double lbm_pressure = 0.0;  // section average at the last exchange [Pa]
  double lbm_flow = 0.0;      // into the region at the last exchange [m^2/s]
};

struct CouplingState {
  std::vector<PortCoupling> ports;
  std::vector<double> residual_history;
  int exchange_count = 0;
  Status status = Status::running;
  std::string message;

  const PortCoupling& port(PortId id) const;
  PortCoupling& port(PortId id);
};

/// SOR update (1 - alpha) q_prev + alpha q_new.
template <typename Scalar>
Scalar relax(Scalar q_prev, Scalar q_new, Scalar alpha) {
  return std::lerp(q_prev, q_new, alpha);
}

/// Largest of |q_high - q_low| and horizon * |q_high - q_high_previous| over the ports,
/// relative to each port's scale; 0 without ports. The first term is the SOR step
/// divided by alpha, the second the change still to come if the interface values
/// decay exponentially over `horizon` exchanges.
double residual(const CouplingState& state, double horizon);

/// Decay time of the coupled iteration in exchanges: the larger of 1 / alpha and the
/// viscous time W^2 / (pi^2 nu) of the widest port section, divided by theta.
double horizon(const HybridConfig& config, const Decomposition& decomposition,
               const lbm::UnitConverter<double>& converter);

/// True once an exchange has completed and its recorded residual is at most epsilon.
/// run_hybrid records the largest raw residual over the last `window` exchanges.
bool converged(const CouplingState& state, double epsilon);

/// Pressure-kind q_low values inside the ground span widened by 5% on each side.
bool within_bounds(const CouplingState& state, const Network& network);

struct Bootstrap {
  mna::AbstractProblem problem;
  mna::NodalSolution solution;
  CouplingState state;
  mna::PortValues pressures;  // per port [Pa]
  mna::PortValues inflows;    // per port, into the CFD region [m^2/s]
};

/// Solves the fully connected surrogate and seeds q_low per port scheme.
/// Residual scales: ground span for pressure ports, bootstrap flow for flow ports.
/// Flow scales are floored at 1% of the largest bootstrap port flow, and both at
/// 1e-9 of the converter's lattice scale.
Bootstrap bootstrap(const Decomposition& decomposition, const lbm::UnitConverter<double>& converter);

/// dt policy shared by both CFD modes: the largest channel velocity of the full
/// network MNA solution is mapped to lattice velocity 0.05.
lbm::UnitConverter<double> choose_converter(const Network& network, int resolution);

/// Bootstrap parabolic stub profiles at the port pressures; mean port pressure at rest
/// in the junction core.
void warm_start(lbm::Lattice& lattice, const Decomposition& decomposition, RegionId region,
                const Bootstrap& boot);

struct RegionFields {
  RegionId region = 0;
  lbm::Macroscopics fields;
};

struct HybridResult {
  Decomposition decomposition;
  std::vector<RegionFields> regions;
  mna::AbstractProblem problem;
  mna::NodalSolution solution;
  CouplingState state;
  double tau = 0.0;
  double dt = 0.0;
  long lbm_steps = 0;
  double seconds = 0.0;
};

/// One line per exchange.
using ExchangeLog = std::function<void(int exchange, double residual, Status status)>;

/// Exchange loop. Divergence and the exchange cap are reported through
/// `state.status`, not thrown; setup errors propagate.
HybridResult run_hybrid(const Decomposition& decomposition, const HybridConfig& config,
                        const ExchangeLog& log = {});
HybridResult run_hybrid(const Network& network, const HybridConfig& config,
                        const ExchangeLog& log = {});

struct MonolithicConfig {
  int resolution = 20;
  int check_interval = 1000;
  double tolerance = 1e-7;
  long max_steps = 2000000;
};

struct CfdResult {
  lbm::Macroscopics fields;
  Status status = Status::running;
  std::string message;
  double tau = 0.0;
  double dt = 0.0;
  long lbm_steps = 0;
  double seconds = 0.0;
};

/// Whole-network lattice run until the velocity L2 norm changes by at most
/// `tolerance` (relative) over `check_interval` steps.
CfdResult run_monolithic(const Network& network, const MonolithicConfig& config,
                         const std::function<void(long step, double change)>& log = {});

struct Probe {
  std::string label;
  Vec2 position = Vec2::Zero();
};

struct ProbeValue {
  double pressure = 0.0;
  double speed = 0.0;
};

/// Region lattice cell if the point lies in a CFD region, otherwise the Ω_high
/// segment: linear pressure along the segment, Poiseuille centreline speed.
/// Throws PreconditionError outside the fluid.
ProbeValue sample(const HybridResult& result, const Vec2& point);
ProbeValue sample(const CfdResult& result, const Vec2& point);

/// Signed (proposed - reference) / |reference|; 0 when both are 0.
double relative_deviation(double reference, double proposed);

struct ProbeComparison {
  std::string label;
  ProbeValue cfd;
  ProbeValue hybrid;
  double pressure_deviation = 0.0;
  double speed_deviation = 0.0;
};

struct Comparison {
  std::vector<ProbeComparison> probes;
  double cfd_seconds = 0.0;
  double hybrid_seconds = 0.0;
  double speedup = 0.0;
};

Comparison compare(const HybridResult& hybrid, const CfdResult& baseline,
                   const std::vector<Probe>& probes);

}  // namespace mfd::coupling
