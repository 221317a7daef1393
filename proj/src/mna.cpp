#include "mfd/mna.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

namespace mfd::mna {

int AbstractProblem::index_of(const Terminal& t) const {
  auto it = std::find(nodes.begin(), nodes.end(), t);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

int AbstractProblem::add_node(const Terminal& t) {
  const int existing = index_of(t);
  if (existing >= 0) return existing;
  nodes.push_back(t);
  return static_cast<int>(nodes.size()) - 1;
}

std::string AbstractProblem::label(int node) const {
  const Terminal& t = nodes.at(node);
  return (t.kind == Terminal::Kind::node ? "n" : "p") + std::to_string(t.id);
}

namespace {

std::vector<Terminal> segment_terminals(const Decomposition& d) {
  std::vector<Terminal> out;
  for (const auto& s : d.segments) {
    out.push_back(s.a);
    out.push_back(s.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void add_segments(AbstractProblem& problem, const Decomposition& d) {
  const double mu = d.network.fluid.dynamic_viscosity();
  for (const auto& s : d.segments) {
    problem.edges.push_back({problem.index_of(s.a), problem.index_of(s.b),
                             channel_resistance(s.length, s.width, mu),
                             "s" + std::to_string(s.id)});
  }
}

void add_grounds(AbstractProblem& problem, const Network& net) {
  for (int i = 0; i < static_cast<int>(problem.nodes.size()); ++i) {
    const Terminal& t = problem.nodes[i];
    if (t.kind == Terminal::Kind::node && net.node(t.id).is_ground())
      problem.dirichlet[i] = *net.node(t.id).ground_pressure;
  }
}

// Component label per node over the edge graph.
std::vector<int> components(const AbstractProblem& problem) {
  std::vector<int> parent(problem.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : problem.edges) parent[find(e.i)] = find(e.j);
  std::vector<int> out(problem.nodes.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = find(static_cast<int>(k));
  return out;
}

void require_dirichlet_per_component(const AbstractProblem& problem) {
  const auto comp = components(problem);
  std::vector<char> anchored(problem.nodes.size(), 0);
  for (const auto& [node, p] : problem.dirichlet) anchored[comp[node]] = 1;
  for (std::size_t k = 0; k < comp.size(); ++k)
    if (!anchored[comp[k]])
      throw SingularSystem("MNA component containing " + problem.label(static_cast<int>(k)) +
                           " has no Dirichlet node");
}

}  // namespace

AbstractProblem assemble(const Decomposition& d, const PortValues& port_pressures,
                         const PortValues& port_flows) {
  AbstractProblem problem;
  for (const auto& t : segment_terminals(d)) problem.add_node(t);
  add_segments(problem, d);
  add_grounds(problem, d.network);

  for (int i = 0; i < static_cast<int>(problem.nodes.size()); ++i) {
    const Terminal& t = problem.nodes[i];
    if (t.kind != Terminal::Kind::port) continue;
    const auto& port = d.port(t.id);
    if (port.scheme == Scheme::FlowToCfd) {
      auto it = port_pressures.find(t.id);
      if (it == port_pressures.end())
        throw PreconditionError("port " + std::to_string(t.id) + ": missing pressure datum");
      problem.dirichlet[i] = it->second;
    } else {
      auto it = port_flows.find(t.id);
      if (it == port_flows.end())
        throw PreconditionError("port " + std::to_string(t.id) + ": missing flow datum");
      problem.flow_sources[i] = -it->second;
    }
  }
  require_dirichlet_per_component(problem);
  return problem;
}

AbstractProblem bootstrap_problem(const Decomposition& d) {
  AbstractProblem problem;
  for (const auto& t : segment_terminals(d)) problem.add_node(t);
  add_segments(problem, d);

  const double mu = d.network.fluid.dynamic_viscosity();
  for (const auto& region : d.regions) {
    for (std::size_t a = 0; a < region.ports.size(); ++a) {
      for (std::size_t b = a + 1; b < region.ports.size(); ++b) {
        const auto& pa = d.port(region.ports[a]);
        const auto& pb = d.port(region.ports[b]);
        const double length = (pa.center - pb.center).norm();
        const double width = std::min(pa.width, pb.width);
        problem.edges.push_back(
            {problem.add_node({Terminal::Kind::port, pa.id}),
             problem.add_node({Terminal::Kind::port, pb.id}),
             channel_resistance(length, width, mu),
             "r" + std::to_string(region.id) + ":" + std::to_string(pa.id) + "-" +
                 std::to_string(pb.id),
             true});
      }
    }
  }
  add_grounds(problem, d.network);
  require_dirichlet_per_component(problem);
  return problem;
}

AbstractProblem network_problem(const Network& net) {
  AbstractProblem problem;
  for (const auto& n : net.nodes) problem.add_node({Terminal::Kind::node, n.id});
  const double mu = net.fluid.dynamic_viscosity();
  for (const auto& c : net.channels) {
    problem.edges.push_back({problem.index_of({Terminal::Kind::node, c.node_a}),
                             problem.index_of({Terminal::Kind::node, c.node_b}),
                             channel_resistance(c.length, c.width, mu),
                             "c" + std::to_string(c.id)});
  }
  add_grounds(problem, net);
  return problem;
}

NodalSolution solve(const AbstractProblem& problem) {
  const int n = static_cast<int>(problem.nodes.size());
  for (const auto& e : problem.edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j)
      throw PreconditionError("edge " + e.label + ": invalid end nodes");
    if (!(e.resistance > 0.0) || !std::isfinite(e.resistance))
      throw PreconditionError("edge " + e.label + ": resistance must be positive");
  }
  for (const auto& [node, q] : problem.flow_sources)
    if (problem.dirichlet.count(node))
      throw PreconditionError("node " + problem.label(node) + ": flow source on a Dirichlet node");
  require_dirichlet_per_component(problem);

  // Free nodes get consecutive unknown indices.
  std::vector<int> unknown(n, -1);
  int m = 0;
  for (int k = 0; k < n; ++k)
    if (!problem.dirichlet.count(k)) unknown[k] = m++;

  Eigen::VectorXd pressures(n);
  for (const auto& [node, p] : problem.dirichlet) pressures[node] = p;

  if (m > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (const auto& [node, q] : problem.flow_sources) rhs[unknown[node]] += q;
    for (const auto& e : problem.edges) {
      const double g = 1.0 / e.resistance;
      const int ui = unknown[e.i];
      const int uj = unknown[e.j];
      if (ui >= 0) triplets.emplace_back(ui, ui, g);
      if (uj >= 0) triplets.emplace_back(uj, uj, g);
      if (ui >= 0 && uj >= 0) {
        triplets.emplace_back(ui, uj, -g);
        triplets.emplace_back(uj, ui, -g);
      } else if (ui >= 0) {
        rhs[ui] += g * pressures[e.j];
      } else if (uj >= 0) {
        rhs[uj] += g * pressures[e.i];
      }
    }
    Eigen::SparseMatrix<double> g(m, m);
    g.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(g);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("MNA factorization failed");
    const Eigen::VectorXd x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite()) throw SingularSystem("MNA solve failed");

    const double scale = std::max(rhs.norm(), 1e-300);
    if ((g * x - rhs).norm() > 1e-10 * scale + 1e-300)
      throw SingularSystem("MNA solve did not reach the residual tolerance");

    for (int k = 0; k < n; ++k)
      if (unknown[k] >= 0) pressures[k] = x[unknown[k]];
  }

  NodalSolution solution;
  solution.pressures = std::move(pressures);
  solution.flows.resize(static_cast<Eigen::Index>(problem.edges.size()));
  for (std::size_t k = 0; k < problem.edges.size(); ++k) {
    const auto& e = problem.edges[k];
    solution.flows[static_cast<Eigen::Index>(k)] =
        (solution.pressures[e.i] - solution.pressures[e.j]) / e.resistance;
  }
  return solution;
}

double outflow(const AbstractProblem& problem, const NodalSolution& solution, int node) {
  double sum = 0.0;
  for (std::size_t k = 0; k < problem.edges.size(); ++k) {
    const auto& e = problem.edges[k];
    const double q = solution.flows[static_cast<Eigen::Index>(k)];
    if (e.i == node) sum += q;
    if (e.j == node) sum -= q;
  }
  return sum;
}

double port_inflow(const AbstractProblem& problem, const NodalSolution& solution, PortId port) {
  const int node = problem.index_of({Terminal::Kind::port, port});
  if (node < 0) throw PreconditionError("port " + std::to_string(port) + ": not in problem");
  double sum = 0.0;
  for (std::size_t k = 0; k < problem.edges.size(); ++k) {
    const auto& e = problem.edges[k];
    if (e.surrogate) continue;
    const double q = solution.flows[static_cast<Eigen::Index>(k)];
    if (e.j == node) sum += q;
    if (e.i == node) sum -= q;
  }
  return sum;
}

void write_pressures_csv(std::ostream& out, const AbstractProblem& problem,
                         const NodalSolution& solution) {
  out << "node,pressure_pa\n" << std::setprecision(6);
  for (std::size_t k = 0; k < problem.nodes.size(); ++k)
    out << problem.label(static_cast<int>(k)) << ',' << solution.pressures[static_cast<Eigen::Index>(k)]
        << '\n';
}

void write_flows_csv(std::ostream& out, const AbstractProblem& problem,
                     const NodalSolution& solution) {
  out << "edge,flow_m2_per_s\n" << std::setprecision(6);
  for (std::size_t k = 0; k < problem.edges.size(); ++k)
    out << problem.edges[k].label << ',' << solution.flows[static_cast<Eigen::Index>(k)] << '\n';
}

}  // namespace mfd::mna
