#include "mfd/coupling.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>
#include <utility>

namespace mfd::coupling {

void validate(const HybridConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw PreconditionError("alpha must lie in (0, 1]");
  if (c.theta < 1) throw PreconditionError("theta must be a positive integer");
  if (!(c.epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  if (c.max_exchanges < 1) throw PreconditionError("max_exchanges must be at least 1");
  if (c.window < 1) throw PreconditionError("window must be at least 1");
  if (c.resolution < 8) throw PreconditionError("resolution must be at least 8 cells per width");
  if (!(c.interface_distance_widths > 0.0))
    throw PreconditionError("interface distance must be positive");
  if (c.threads < 0) throw PreconditionError("threads must not be negative");
}

std::string to_string(Status status) {
  switch (status) {
    case Status::running: return "running";
    case Status::converged: return "converged";
    case Status::diverged: return "diverged";
    case Status::capped: return "capped";
  }
  return "unknown";
}

const PortCoupling& CouplingState::port(PortId id) const {
  for (const auto& p : ports)
    if (p.port == id) return p;
  throw PreconditionError("port " + std::to_string(id) + ": not coupled");
}

PortCoupling& CouplingState::port(PortId id) {
  return const_cast<PortCoupling&>(std::as_const(*this).port(id));
}

double residual(const CouplingState& state, double horizon) {
  double r = 0.0;
  for (const auto& p : state.ports) {
    const double d =
        std::max(std::abs(p.q_high - p.q_low), horizon * std::abs(p.q_high - p.q_high_previous)) /
        p.scale;
    if (std::isnan(d)) return d;
    r = std::max(r, d);
  }
  return r;
}

double horizon(const HybridConfig& config, const Decomposition& d,
               const lbm::UnitConverter<double>& converter) {
  double width = 0.0;
  for (const auto& p : d.ports) width = std::max(width, p.width / converter.dx());
  const double nu = (converter.tau() - 0.5) * lbm::D2Q9::cs2;
  const double viscous = width * width / (std::numbers::pi * std::numbers::pi * nu);
  return std::max(1.0 / config.alpha, viscous / config.theta);
}

bool converged(const CouplingState& state, double epsilon) {
  return state.exchange_count >= 1 && !state.residual_history.empty() &&
         state.residual_history.back() <= epsilon;
}

bool within_bounds(const CouplingState& state, const Network& network) {
  const double lo = network.min_ground_pressure();
  const double hi = network.max_ground_pressure();
  const double margin = 0.05 * (hi - lo);
  for (const auto& p : state.ports) {
    if (p.kind != Quantity::pressure) continue;
    const double slack = std::max(margin, p.scale * 1e-6);
    if (!(p.q_low >= lo - slack && p.q_low <= hi + slack)) return false;
  }
  return true;
}

lbm::UnitConverter<double> choose_converter(const Network& network, int resolution) {
  const auto problem = mna::network_problem(network);
  const auto solution = mna::solve(problem);
  double peak = 0.0;
  for (std::size_t k = 0; k < network.channels.size(); ++k) {
    const double q = std::abs(solution.flows[static_cast<Eigen::Index>(k)]);
    peak = std::max(peak, 1.5 * q / network.channels[k].width);
  }
  const double width = lbm::lattice_spacing(network, resolution) * resolution;
  return lbm::UnitConverter<double>::for_peak_velocity(width, resolution, network.fluid, peak);
}

Bootstrap bootstrap(const Decomposition& d, const lbm::UnitConverter<double>& converter) {
  Bootstrap boot;
  boot.problem = mna::bootstrap_problem(d);
  boot.solution = mna::solve(boot.problem);

  const double span = d.network.max_ground_pressure() - d.network.min_ground_pressure();
  const double pressure_floor = 1e-9 * converter.pressure_scale();
  double largest_flow = 0.0;
  for (const auto& port : d.ports)
    largest_flow = std::max(largest_flow, std::abs(mna::port_inflow(boot.problem, boot.solution, port.id)));
  const double flow_floor = std::max(1e-9 * converter.flow_scale(), 0.01 * largest_flow);
  for (const auto& port : d.ports) {
    const int node = boot.problem.index_of({Terminal::Kind::port, port.id});
    const double p = boot.solution.pressures[node];
    const double q = mna::port_inflow(boot.problem, boot.solution, port.id);
    boot.pressures[port.id] = p;
    boot.inflows[port.id] = q;

    PortCoupling c;
    c.port = port.id;
    c.flow_scale = std::max(std::abs(q), flow_floor);
    c.lbm_pressure = p;
    c.lbm_flow = q;
    if (port.scheme == Scheme::PressureToCfd) {
      c.kind = Quantity::pressure;
      c.q_low = c.q_high = c.q_high_previous = p;
      c.q_meas = q;
      c.scale = std::max(span, pressure_floor);
    } else {
      c.kind = Quantity::flow;
      c.q_low = c.q_high = c.q_high_previous = q;
      c.q_meas = p;
      c.scale = c.flow_scale;
    }
    boot.state.ports.push_back(c);
  }
  return boot;
}

void warm_start(lbm::Lattice& lattice, const Decomposition& d, RegionId region_id,
                const Bootstrap& boot) {
  const auto& region = d.region(region_id);
  const Vec2 junction = d.network.node(region.junction_node).position;
  double core = 0.0;
  double mean = 0.0;
  for (PortId id : region.ports) {
    core = std::max(core, 0.5 * d.port(id).width);
    mean += boot.pressures.at(id);
  }
  mean /= double(region.ports.size());

  lattice.initialize([&](const Vec2& x) {
    for (PortId id : region.ports) {
      const auto& port = d.port(id);
      const Vec2 outward = -port.inward_normal;
      const Vec2 tangent(-outward.y(), outward.x());
      const double along = (x - junction).dot(outward);
      const double across = (x - junction).dot(tangent);
      const double w = port.width;
      if (along <= core || std::abs(across) > 0.5 * w) continue;
      const double y = across + 0.5 * w;
      const double mean_u = boot.inflows.at(id) / w;
      return lbm::FieldSample{boot.pressures.at(id),
                              port.inward_normal * (6.0 * mean_u * y * (w - y) / (w * w))};
    }
    return lbm::FieldSample{mean, Vec2::Zero()};
  });
}

namespace {

using Clock = std::chrono::steady_clock;

int worker_count(const HybridConfig& config, std::size_t jobs) {
  int n = config.threads;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MFD_SIM_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
  }
  return std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(jobs, 1)));
}

// Advances every lattice by `steps`; rethrows the first failure after all workers join.
void advance_all(std::vector<lbm::Lattice>& lattices, int steps, int workers) {
  if (workers <= 1) {
    for (auto& l : lattices) l.advance(steps);
    return;
  }
  std::vector<std::exception_ptr> errors(lattices.size());
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = static_cast<std::size_t>(w); k < lattices.size();
             k += static_cast<std::size_t>(workers)) {
          try {
            lattices[k].advance(steps);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

lbm::Lattice& lattice_of(std::vector<lbm::Lattice>& lattices, const std::vector<RegionId>& ids,
                         RegionId region) {
  const auto it = std::find(ids.begin(), ids.end(), region);
  return lattices[static_cast<std::size_t>(it - ids.begin())];
}

void impose(lbm::Lattice& lattice, const PortCoupling& p) {
  if (p.kind == Quantity::pressure)
    lattice.set_pressure_bc(p.port, p.q_low);
  else
    lattice.set_flow_bc(p.port, p.q_low);
}

}  // namespace

HybridResult run_hybrid(const Network& network, const HybridConfig& config,
                        const ExchangeLog& log) {
  validate(config);
  DecomposeOptions options;
  options.interface_distance_widths = config.interface_distance_widths;
  return run_hybrid(assign_schemes(decompose(network, options)), config, log);
}

HybridResult run_hybrid(const Decomposition& d, const HybridConfig& config,
                        const ExchangeLog& log) {
  validate(config);
  const auto start = Clock::now();
  HybridResult result;
  result.decomposition = d;

  CouplingState& state = result.state;
  auto finish = [&] {
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return std::move(result);
  };

  if (d.regions.empty()) {
    result.problem = mna::assemble(d, {}, {});
    result.solution = mna::solve(result.problem);
    state.status = Status::converged;
    return finish();
  }

  const auto converter = choose_converter(d.network, config.resolution);
  result.tau = converter.tau();
  result.dt = converter.dt();
  Bootstrap boot = bootstrap(d, converter);
  state = boot.state;

  std::vector<RegionId> ids;
  std::vector<lbm::Lattice> lattices;
  for (const auto& region : d.regions) {
    ids.push_back(region.id);
    lattices.push_back(lbm::build_region_lattice(d, region.id, config.resolution, converter));
    if (config.warm_start) warm_start(lattices.back(), d, region.id, boot);
  }
  for (const auto& p : state.ports)
    impose(lattice_of(lattices, ids, d.port(p.port).region_id), p);

  const int workers = worker_count(config, lattices.size());
  const double memory = horizon(config, d, converter);
  std::vector<double> raw;
  auto fail = [&](Status status, const std::string& why) {
    state.status = status;
    state.message = why;
  };

  while (state.status == Status::running) {
    try {
      advance_all(lattices, config.theta, workers);
    } catch (const DivergenceError& e) {
      fail(Status::diverged, std::string(e.what()) + "; try a smaller alpha or a finer lattice");
      break;
    }
    result.lbm_steps += config.theta;

    mna::PortValues pressures, flows;
    bool finite = true;
    for (auto& p : state.ports) {
      const auto m = lattice_of(lattices, ids, d.port(p.port).region_id).measure_port(p.port);
      p.lbm_pressure = m.pressure;
      p.lbm_flow = m.flow_rate;
      p.q_meas = p.kind == Quantity::pressure ? m.flow_rate : m.pressure;
      finite = finite && std::isfinite(p.q_meas);
      (p.kind == Quantity::pressure ? flows : pressures)[p.port] = p.q_meas;
    }
    if (!finite) {
      fail(Status::diverged, "non-finite port measurement; try a smaller alpha");
      break;
    }

    result.problem = mna::assemble(d, pressures, flows);
    result.solution = mna::solve(result.problem);
    for (auto& p : state.ports) {
      p.q_high_previous = p.q_high;
      if (p.kind == Quantity::pressure)
        p.q_high = result.solution.pressures[result.problem.index_of({Terminal::Kind::port, p.port})];
      else
        p.q_high = mna::port_inflow(result.problem, result.solution, p.port);
    }

    // Sustained residual: the largest raw value over the last `window` exchanges.
    raw.push_back(residual(state, memory));
    const std::size_t first =
        raw.size() > std::size_t(config.window) ? raw.size() - std::size_t(config.window) : 0;
    double r = 0.0;
    for (std::size_t k = first; k < raw.size() && !std::isnan(r); ++k)
      r = std::isnan(raw[k]) ? raw[k] : std::max(r, raw[k]);
    state.residual_history.push_back(r);
    ++state.exchange_count;

    if (!std::isfinite(r)) {
      fail(Status::diverged, "non-finite residual; try a smaller alpha");
    } else if (converged(state, config.epsilon)) {
      state.status = Status::converged;
    } else {
      for (auto& p : state.ports) p.q_low = relax(p.q_low, p.q_high, config.alpha);
      if (!within_bounds(state, d.network)) {
        fail(Status::diverged, "interface pressure left the ground pressure span; try a smaller alpha");
      } else {
        try {
          for (const auto& p : state.ports)
            impose(lattice_of(lattices, ids, d.port(p.port).region_id), p);
        } catch (const MachViolation& e) {
          fail(Status::diverged, std::string(e.what()) + "; try a smaller alpha");
        }
      }
      if (state.status == Status::running && state.exchange_count >= config.max_exchanges)
        fail(Status::capped, "exchange cap " + std::to_string(config.max_exchanges) + " reached");
    }
    if (log) log(state.exchange_count, r, state.status);
  }

  for (std::size_t k = 0; k < lattices.size(); ++k)
    result.regions.push_back({ids[k], lattices[k].macroscopics()});
  return finish();
}

}  // namespace mfd::coupling
