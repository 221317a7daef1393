// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include "mfd/coupling.hpp"
#include "mfd/mna.hpp"

#include "cases.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace mfd;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void straight_channel() {
  const double expected = 1000.0 / mna::channel_resistance(1e-3, 1e-4, 1e-3);
  std::vector<double> times;
  double error = 0.0;
  for (int k = 0; k < 21; ++k) {
    const auto t = Clock::now();
    const auto problem = mna::network_problem(canonical::straight_channel());
    const auto solution = mna::solve(problem);
    times.push_back(since(t));
    error = std::abs(solution.flows[0] - expected) / expected;
  }
  const double t = median(times);
  report(1, error <= 1e-12 && t < 1e-3, fmt("relative flow error %.2e, median solve %.3f ms", error, t * 1e3));
}

void random_networks() {
  std::mt19937 rng(7);
  double worst = 0.0;
  double solve_time = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto problem = test::random_resistor_problem(rng);
    const auto t = Clock::now();
    const auto solution = mna::solve(problem);
    solve_time += since(t);
    const auto oracle = test::dense_oracle(problem);
    double scale = 1.0;
    for (double p : oracle) scale = std::max(scale, std::abs(p));
    for (std::size_t i = 0; i < oracle.size(); ++i)
      worst = std::max(worst, std::abs(solution.pressures[Eigen::Index(i)] - oracle[i]) / scale);
  }
  report(2, worst <= 1e-9 && solve_time < 1.0,
         fmt("50 networks, worst deviation %.2e, total solve %.3f s", worst, solve_time));
}

void poiseuille() {
  const auto coarse = test::run_poiseuille(10);
  const auto fine = test::run_poiseuille(20);
  const double conductance = std::abs(fine.conductance_ratio - 1.0);
  report(3, fine.profile_error <= 0.01 && conductance <= 0.01 && fine.profile_error < coarse.profile_error,
         fmt("profile L2 %.3f%% (res 20), %.3f%% (res 10); conductance error %.3f%%",
             100 * fine.profile_error, 100 * coarse.profile_error, 100 * conductance));
}

struct CrossRun {
  coupling::HybridResult hybrid;
  coupling::CfdResult cfd;
  double hybrid_seconds = 0.0;
};

CrossRun run_cross(double length) {
  CrossRun r;
  std::vector<double> times;
  for (int k = 0; k < 3; ++k) {
    r.hybrid = coupling::run_hybrid(canonical::cross(length), coupling::HybridConfig{});
    times.push_back(r.hybrid.seconds);
  }
  r.hybrid_seconds = median(times);
  r.cfd = coupling::run_monolithic(canonical::cross(length), coupling::MonolithicConfig{});
  return r;
}

void accuracy(const CrossRun& r) {
  const auto c = coupling::compare(r.hybrid, r.cfd, {{"junction", Vec2::Zero()}});
  const auto& j = c.probes.front();
  const bool ok = r.hybrid.state.status == coupling::Status::converged &&
                  r.cfd.status == coupling::Status::converged &&
                  std::abs(j.pressure_deviation) <= 0.01 && std::abs(j.speed_deviation) <= 0.025;
  report(4, ok, fmt("junction pressure %.2f%%, speed %.2f%% (%.1f Pa vs %.1f Pa)",
                    100 * j.pressure_deviation, 100 * j.speed_deviation, j.hybrid.pressure,
                    j.cfd.pressure));
}

void speedup(const CrossRun& short_arms, const CrossRun& long_arms) {
  const double s1 = short_arms.cfd.seconds / short_arms.hybrid_seconds;
  const double s2 = long_arms.cfd.seconds / long_arms.hybrid_seconds;
  const double growth = long_arms.hybrid_seconds / short_arms.hybrid_seconds;
  report(5, s1 >= 3.0 && s2 > s1 && growth <= 1.5,
         fmt("speedup %.1f (l=1 mm), %.1f (l=2 mm); hybrid time ratio %.2f", s1, s2, growth));
}

void properties() {
  const coupling::HybridConfig config;
  // Fixed point of the update and the threshold of the stopping test.
  coupling::CouplingState s;
  s.ports.push_back({});
  s.ports[0].q_low = s.ports[0].q_high = s.ports[0].q_high_previous = 640.0;
  bool ok = coupling::relax(640.0, 640.0, config.alpha) == 640.0 && coupling::residual(s, 100.0) == 0.0;
  s.exchange_count = 1;
  s.residual_history = {0.5 * config.epsilon};
  ok = ok && coupling::converged(s, config.epsilon);
  s.residual_history = {1.1 * config.epsilon};
  ok = ok && !coupling::converged(s, config.epsilon);
  std::string detail = ok ? "fixed point and threshold ok; " : "fixed point or threshold wrong; ";
  for (const auto& [name, net] : {std::pair{"cross", canonical::cross()},
                                  std::pair{"t_ladder", canonical::t_ladder()}}) {
    const auto r = coupling::run_hybrid(net, config);
    const auto p = test::check_properties(r);
    const bool pass = p.converged && p.monotone_tail && p.pressure_gap <= 2 * config.epsilon &&
                      p.flow_gap <= 2 * config.epsilon && p.region_imbalance <= 0.01 &&
                      p.global_imbalance <= 0.01 && p.within_bounds;
    ok = ok && pass;
    detail += fmt("%s: %d exchanges, gaps %.1e/%.1e, mass %.1e/%.1e; ", name, r.state.exchange_count,
                  p.pressure_gap, p.flow_gap, p.region_imbalance, p.global_imbalance);
  }
  report(6, ok, detail);
}

void bootstrap_bounds() {
  std::mt19937 rng(11);
  bool ok = true;
  double worst_time = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Network net = test::random_grid_network(rng);
    const auto t = Clock::now();
    mna::solve(mna::network_problem(net));
    worst_time = std::max(worst_time, since(t));

    double lo = 1e300, hi = -1e300;
    for (const auto& n : net.nodes)
      if (n.ground_pressure) {
        lo = std::min(lo, *n.ground_pressure);
        hi = std::max(hi, *n.ground_pressure);
      }
    const Decomposition d = assign_schemes(decompose(net));
    const auto problem = mna::bootstrap_problem(d);
    const auto solution = mna::solve(problem);
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    for (const auto& port : d.ports) {
      const double p = solution.pressures[problem.index_of({Terminal::Kind::port, port.id})];
      ok = ok && p >= lo - slack && p <= hi + slack;
    }
  }
  report(7, ok && worst_time < 1.0,
         fmt("20 random networks, bootstrap inside ground span; slowest abstract solve %.3f ms",
             worst_time * 1e3));
}

}  // namespace

int main() {
  straight_channel();
  random_networks();
  poiseuille();
  const CrossRun l1 = run_cross(1e-3);
  accuracy(l1);
  const CrossRun l2 = run_cross(2e-3);
  speedup(l1, l2);
  properties();
  bootstrap_bounds();
  return failures == 0 ? 0 : 1;
}
