#include "mfd/coupling.hpp"

#include <chrono>

namespace mfd::coupling {

CfdResult run_monolithic(const Network& network, const MonolithicConfig& config,
                         const std::function<void(long, double)>& log) {
  if (config.check_interval < 1) throw PreconditionError("check interval must be positive");
  if (!(config.tolerance > 0.0)) throw PreconditionError("steady-state tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();

  const auto converter = choose_converter(network, config.resolution);
  auto lattice = lbm::build_monolithic_lattice(network, config.resolution, converter);
  for (const auto& n : network.nodes)
    if (n.is_ground()) lattice.set_pressure_bc(n.id, *n.ground_pressure);

  CfdResult result;
  result.tau = converter.tau();
  result.dt = converter.dt();
  double previous = double(lattice.velocity_norm());
  try {
    while (result.status == Status::running) {
      lattice.advance(config.check_interval);
      result.lbm_steps += config.check_interval;
      const double norm = double(lattice.velocity_norm());
      if (!std::isfinite(norm)) throw DivergenceError("non-finite velocity field", -1, lattice.iteration());
      const double change = norm > 0.0 ? std::abs(norm - previous) / norm : 0.0;
      previous = norm;
      if (log) log(result.lbm_steps, change);
      if (change <= config.tolerance) {
        result.status = Status::converged;
      } else if (result.lbm_steps >= config.max_steps) {
        result.status = Status::capped;
        result.message = "step cap " + std::to_string(config.max_steps) + " reached";
      }
    }
  } catch (const DivergenceError& e) {
    result.status = Status::diverged;
    result.message = std::string(e.what()) + "; try a finer lattice";
  }
  result.fields = lattice.macroscopics();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace mfd::coupling
