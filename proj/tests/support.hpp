#pragma once

#include "mfd/mna.hpp"
#include "mfd/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace mfd::test {

/// Random connected resistor problem with at least one Dirichlet node per graph and
/// flow sources on some free nodes.
inline mna::AbstractProblem random_resistor_problem(std::mt19937& rng, int max_nodes = 20) {
  std::uniform_int_distribution<int> count(2, max_nodes);
  std::uniform_real_distribution<double> resistance(1e6, 1e9);
  std::uniform_real_distribution<double> pressure(-500.0, 1500.0);
  std::uniform_real_distribution<double> source(-1e-5, 1e-5);
  std::bernoulli_distribution coin(0.3);

  mna::AbstractProblem p;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) p.add_node({Terminal::Kind::node, k});
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> parent(0, k - 1);
    p.edges.push_back({parent(rng), k, resistance(rng), "t" + std::to_string(k)});
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  const int extra = std::uniform_int_distribution<int>(0, n)(rng);
  for (int e = 0; e < extra; ++e) {
    const int a = any(rng), b = any(rng);
    if (a != b) p.edges.push_back({a, b, resistance(rng), "x" + std::to_string(e)});
  }
  p.dirichlet[any(rng)] = pressure(rng);
  for (int k = 0; k < n; ++k)
    if (coin(rng)) p.dirichlet[k] = pressure(rng);
  for (int k = 0; k < n; ++k)
    if (!p.dirichlet.count(k) && coin(rng)) p.flow_sources[k] = source(rng);
  return p;
}

/// Nodal pressures by Gaussian elimination with partial pivoting on the dense
/// conductance system, Dirichlet rows replaced by identity rows.
inline std::vector<double> dense_oracle(const mna::AbstractProblem& p) {
  const std::size_t n = p.nodes.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (const auto& e : p.edges) {
    const double g = 1.0 / e.resistance;
    const auto i = static_cast<std::size_t>(e.i), j = static_cast<std::size_t>(e.j);
    a[i][i] += g;
    a[j][j] += g;
    a[i][j] -= g;
    a[j][i] -= g;
  }
  for (const auto& [node, q] : p.flow_sources) a[static_cast<std::size_t>(node)][n] += q;
  for (const auto& [node, value] : p.dirichlet) {
    auto& row = a[static_cast<std::size_t>(node)];
    std::fill(row.begin(), row.end(), 0.0);
    row[static_cast<std::size_t>(node)] = 1.0;
    row[n] = value;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k][n] / a[k][k];
  return x;
}

/// Random valid network on a square grid of spacing `pitch`: a random tree of grid
/// edges plus a few extra edges between non-leaf nodes. Leaves are grounds with
/// random pressures, so every network decomposes.
inline Network random_grid_network(std::mt19937& rng, int grid = 4, double pitch = 1e-3) {
  std::uniform_real_distribution<double> pressure(0.0, 1000.0);
  std::uniform_int_distribution<int> cell(0, grid - 1);
  std::uniform_int_distribution<int> width_pick(0, 1);
  const std::pair<int, int> steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

  for (;;) {
    std::map<std::pair<int, int>, int> id;
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> edges;
    std::vector<std::pair<int, int>> frontier{{cell(rng), cell(rng)}};
    id[frontier[0]] = 0;
    const int target = std::uniform_int_distribution<int>(4, grid * grid)(rng);
    while (static_cast<int>(id.size()) < target && !frontier.empty()) {
      const auto from = frontier[std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng)];
      const auto [dx, dy] = steps[std::uniform_int_distribution<int>(0, 3)(rng)];
      const std::pair<int, int> to{from.first + dx, from.second + dy};
      if (to.first < 0 || to.second < 0 || to.first >= grid || to.second >= grid || id.count(to))
        continue;
      id[to] = static_cast<int>(id.size());
      edges.insert({std::min(from, to), std::max(from, to)});
      frontier.push_back(to);
    }
    std::map<std::pair<int, int>, int> degree;
    for (const auto& [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    const int extra = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int e = 0; e < extra; ++e) {
      const std::pair<int, int> a{cell(rng), cell(rng)};
      const auto [dx, dy] = steps[std::uniform_int_distribution<int>(0, 1)(rng) * 2];
      const std::pair<int, int> b{a.first + dx, a.second + dy};
      if (!id.count(a) || !id.count(b) || degree[a] < 2 || degree[b] < 2) continue;
      if (edges.insert({std::min(a, b), std::max(a, b)}).second) {
        ++degree[a];
        ++degree[b];
      }
    }

    Network net;
    for (const auto& [xy, k] : id) {
      Node node;
      node.id = k;
      node.position = Vec2(xy.first * pitch, xy.second * pitch);
      if (degree[xy] == 1) {
        node.kind = NodeKind::ground;
        node.ground_pressure = pressure(rng);
      }
      net.nodes.push_back(node);
    }
    std::sort(net.nodes.begin(), net.nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    int c = 0;
    for (const auto& [a, b] : edges) {
      const double width = width_pick(rng) ? 1e-4 : 5e-5;
      net.channels.push_back({c++, id[a], id[b], width, pitch});
    }
    if (validate(net).empty()) return net;
  }
}

}  // namespace mfd::test
