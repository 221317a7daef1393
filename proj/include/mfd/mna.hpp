#pragma once

#include "mfd/error.hpp"
#include "mfd/netmodel.hpp"

#include <Eigen/Core>

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mfd::mna {

/// Planar Poiseuille resistance per unit depth, R = 12 mu L / w^3 [Pa s / m^2].
template <typename Scalar>
Scalar channel_resistance(Scalar length, Scalar width, Scalar dynamic_viscosity) {
  if (!(length > Scalar(0)) || !(width > Scalar(0)) || !(dynamic_viscosity > Scalar(0)))
    throw PreconditionError("channel_resistance: arguments must be positive");
  return Scalar(12) * dynamic_viscosity * length / (width * width * width);
}

struct Edge {
  int i = 0;
  int j = 0;
  double resistance = 0.0;
  std::string label;
  bool surrogate = false;  // stands in for a CFD region
};

/// Resistive network with Dirichlet pressures and injected flow rates.
/// Node indices refer to `nodes`; flow rates are per unit depth [m^2/s].
struct AbstractProblem {
  std::vector<Terminal> nodes;
  std::vector<Edge> edges;
  std::map<int, double> dirichlet;
  std::map<int, double> flow_sources;  // positive = injected into the network

  int index_of(const Terminal& t) const;
  int add_node(const Terminal& t);
  std::string label(int node) const;
};

struct NodalSolution {
  Eigen::VectorXd pressures;  // per problem node [Pa]
  Eigen::VectorXd flows;      // per edge, positive from edge.i to edge.j [m^2/s]
};

using PortValues = std::map<PortId, double>;

/// One MNA node per segment terminal, one edge per Ω_high segment. FlowToCfd ports
/// are Dirichlet at `port_pressures`; PressureToCfd ports extract `port_flows`
/// (positive into the CFD region).
AbstractProblem assemble(const Decomposition& decomposition, const PortValues& port_pressures,
                         const PortValues& port_flows);

/// Like assemble, but every region becomes a fully connected graph over its ports
/// and only ground nodes are Dirichlet.
AbstractProblem bootstrap_problem(const Decomposition& decomposition);

/// The undecomposed network: every node, every channel at full length.
AbstractProblem network_problem(const Network& network);

/// Direct sparse solve. Throws SingularSystem if a component has no Dirichlet node
/// or the factorization fails, PreconditionError on a malformed problem.
NodalSolution solve(const AbstractProblem& problem);

/// Net flow leaving `node` through its edges. Equals the injected source at free
/// nodes and the supply drawn from a Dirichlet node.
double outflow(const AbstractProblem& problem, const NodalSolution& solution, int node);

/// Flow arriving at a port node through non-surrogate edges, i.e. flow into the CFD region.
double port_inflow(const AbstractProblem& problem, const NodalSolution& solution, PortId port);

void write_pressures_csv(std::ostream& out, const AbstractProblem& problem,
                         const NodalSolution& solution);
void write_flows_csv(std::ostream& out, const AbstractProblem& problem,
                     const NodalSolution& solution);

}  // namespace mfd::mna
