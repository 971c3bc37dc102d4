// Copyright 2026 The CSAS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csas/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace csas {

namespace {

std::string id_str(VehicleId v) { return std::to_string(v.value); }

// Vertices reachable from `start`, following edges forward or backward.
std::vector<bool> reachable(const CommGraph& g, std::size_t start,
                            bool forward) {
  const auto& vs = g.vertices();
  std::vector<std::vector<std::size_t>> adj(vs.size());
  for (const Edge& e : g.edges()) {
    const std::size_t u = g.index_of(e.from);
    const std::size_t w = g.index_of(e.to);
    if (forward) {
      adj[u].push_back(w);
    } else {
      adj[w].push_back(u);
    }
  }
  std::vector<bool> seen(vs.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[u]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

CommGraph::CommGraph(std::vector<VehicleId> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) !=
      vertices_.end()) {
    throw ConfigError("duplicate vertex in communication graph");
  }
  for (const Edge& e : edges) {
    if (e.from == e.to) {
      throw ConfigError("self-loop on vehicle " + id_str(e.from));
    }
    if (!contains(e.from) || !contains(e.to)) {
      throw ConfigError("edge " + id_str(e.from) + "->" + id_str(e.to) +
                        " references an unknown vehicle");
    }
    if (!edges_.insert(e).second) {
      throw ConfigError("duplicate edge " + id_str(e.from) + "->" +
                        id_str(e.to));
    }
  }
}

bool CommGraph::contains(VehicleId v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

std::size_t CommGraph::index_of(VehicleId v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v) {
    throw ConfigError("unknown vehicle " + id_str(v));
  }
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::vector<VehicleId> CommGraph::out_neighbors(VehicleId v) const {
  index_of(v);
  std::vector<VehicleId> out;
  for (auto it = edges_.lower_bound(Edge{v, VehicleId{INT32_MIN}});
       it != edges_.end() && it->from == v; ++it) {
    out.push_back(it->to);
  }
  return out;
}

std::vector<VehicleId> CommGraph::in_neighbors(VehicleId v) const {
  index_of(v);
  std::vector<VehicleId> in;
  for (const Edge& e : edges_) {
    if (e.to == v) in.push_back(e.from);
  }
  return in;
}

CommGraph CommGraph::with_vertex(VehicleId v) const {
  auto vs = vertices_;
  vs.push_back(v);
  return CommGraph(std::move(vs), {edges_.begin(), edges_.end()});
}

CommGraph CommGraph::with_edge(Edge e) const {
  std::vector<Edge> es(edges_.begin(), edges_.end());
  es.push_back(e);
  return CommGraph(vertices_, std::move(es));
}

std::size_t outdegree(const CommGraph& g, VehicleId v) {
  return g.out_neighbors(v).size();
}

bool is_strongly_connected(const CommGraph& g) {
  if (g.size() <= 1) return true;
  const auto fwd = reachable(g, 0, true);
  const auto bwd = reachable(g, 0, false);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

std::vector<VehicleId> validate_privacy_precondition(const CommGraph& g) {
  std::vector<VehicleId> violating;
  for (VehicleId v : g.vertices()) {
    if (outdegree(g, v) == 0) violating.push_back(v);
  }
  return violating;
}

CommGraph ring_topology(std::size_t n) {
  if (n < 2) throw ConfigError("ring topology needs at least two vehicles");
  std::vector<VehicleId> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = VehicleId{static_cast<std::int32_t>(i + 1)};
  }
  return ring_topology(ids);
}

CommGraph ring_topology(std::span<const VehicleId> ids) {
  if (ids.size() < 2) {
    throw ConfigError("ring topology needs at least two vehicles");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    edges.push_back({ids[i], ids[(i + 1) % ids.size()]});
  }
  return CommGraph({ids.begin(), ids.end()}, std::move(edges));
}

CommGraph relabel(const CommGraph& g, std::span<const VehicleId> ids) {
  if (g.size() != ids.size()) {
    throw ConfigError("relabel: id count does not match graph size");
  }
  auto map = [&](VehicleId v) {
    if (v.value < 1 || static_cast<std::size_t>(v.value) > ids.size()) {
      throw ConfigError("relabel: graph vertices must be 1..n");
    }
    return ids[static_cast<std::size_t>(v.value - 1)];
  };
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.push_back({map(e.from), map(e.to)});
  return CommGraph({ids.begin(), ids.end()}, std::move(edges));
}

CommGraph induced_subgraph(const CommGraph& g,
                           std::span<const VehicleId> keep) {
  std::vector<VehicleId> vs;
  for (VehicleId v : keep) {
    g.index_of(v);
    vs.push_back(v);
  }
  std::sort(vs.begin(), vs.end());
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (std::binary_search(vs.begin(), vs.end(), e.from) &&
        std::binary_search(vs.begin(), vs.end(), e.to)) {
      edges.push_back(e);
    }
  }
  return CommGraph(std::move(vs), std::move(edges));
}

CommGraph graph_union(std::span<const CommGraph> graphs) {
  std::set<VehicleId> vs;
  std::set<Edge> es;
  for (const auto& g : graphs) {
    vs.insert(g.vertices().begin(), g.vertices().end());
    es.insert(g.edges().begin(), g.edges().end());
  }
  return CommGraph({vs.begin(), vs.end()}, {es.begin(), es.end()});
}

GraphSequence constant_sequence(CommGraph g) {
  GraphSequence seq;
  seq.graphs.push_back(std::move(g));
  return seq;
}

namespace {

constexpr double kCycleKeepProbability = 0.7;
constexpr int kMaxRedraws = 32;

std::vector<VehicleId> identity_ids(std::size_t n) {
  std::vector<VehicleId> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = VehicleId{static_cast<std::int32_t>(i + 1)};
  }
  return ids;
}

CommGraph full_cycle(std::vector<VehicleId> order) {
  return ring_topology(order);
}

bool window_ok(const std::vector<CommGraph>& graphs, std::size_t end,
               std::size_t window) {
  const std::size_t begin = end + 1 >= window ? end + 1 - window : 0;
  return is_strongly_connected(graph_union(
      std::span<const CommGraph>(graphs.data() + begin, end + 1 - begin)));
}

}  // namespace

GraphSequence generate_switching_sequence(std::size_t n, std::size_t rounds,
                                          std::size_t window,
                                          std::uint64_t seed) {
  if (n < 2) throw ConfigError("switching topology needs at least two vehicles");
  if (window < 1) throw ConfigError("switching window must be >= 1");
  if (rounds < 1) throw ConfigError("switching sequence needs at least one round");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep_cycle(kCycleKeepProbability);
  std::bernoulli_distribution add_chord(1.0 / static_cast<double>(n));
  const auto ids = identity_ids(n);

  GraphSequence seq;
  seq.seed = seed;
  seq.window = window;
  seq.graphs.reserve(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const bool checked = r + 1 >= window || r + 1 == rounds;
    std::vector<VehicleId> order;
    for (int attempt = 0;; ++attempt) {
      order = ids;
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<Edge> edges;
      for (std::size_t i = 0; i < n; ++i) {
        if (keep_cycle(rng)) edges.push_back({order[i], order[(i + 1) % n]});
      }
      for (VehicleId u : ids) {
        for (VehicleId w : ids) {
          if (u == w) continue;
          if (add_chord(rng)) edges.push_back({u, w});
        }
      }
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      seq.graphs.emplace_back(ids, std::move(edges));
      if (!checked || window_ok(seq.graphs, r, window)) break;
      seq.graphs.pop_back();
      if (attempt + 1 >= kMaxRedraws) {
        seq.graphs.push_back(full_cycle(order));
        break;
      }
    }
  }
  // Windows that wrap past the end all contain the last graph.
  bool wrap_ok = true;
  for (std::size_t t = 1; t < window && t < rounds && wrap_ok; ++t) {
    std::vector<CommGraph> span_graphs;
    for (std::size_t i = rounds + t - window; i < rounds; ++i) {
      span_graphs.push_back(seq.graphs[i]);
    }
    for (std::size_t i = 0; i < t; ++i) span_graphs.push_back(seq.graphs[i]);
    wrap_ok = is_strongly_connected(graph_union(span_graphs));
  }
  if (!wrap_ok) {
    auto order = ids;
    std::shuffle(order.begin(), order.end(), rng);
    seq.graphs.back() = graph_union(std::vector<CommGraph>{
        seq.graphs.back(), full_cycle(std::move(order))});
  }
  return seq;
}

bool windows_strongly_connected(const GraphSequence& seq) {
  const std::size_t n = seq.size();
  if (n == 0) return false;
  const std::size_t w = std::min(seq.window, n);
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<CommGraph> span_graphs;
    for (std::size_t i = 0; i < w; ++i) span_graphs.push_back(seq.at(start + i));
    if (!is_strongly_connected(graph_union(span_graphs))) return false;
  }
  return true;
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) {
    throw ConfigError("stochastic matrix must be square");
  }
  if ((p_.array() < 0.0).any()) {
    throw ConfigError("stochastic matrix has a negative entry");
  }
  const Eigen::VectorXd sums = p_.rowwise().sum();
  if (((sums.array() - 1.0).abs() > 1e-12).any()) {
    throw ConfigError("stochastic matrix row does not sum to 1");
  }
}

StochasticMatrix row_stochastic_from_graph(const CommGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VehicleId v = g.vertices()[static_cast<std::size_t>(i)];
    const auto in = g.in_neighbors(v);
    const double w = 1.0 / static_cast<double>(1 + in.size());
    p(i, i) = w;
    for (VehicleId u : in) p(i, static_cast<Eigen::Index>(g.index_of(u))) = w;
  }
  return StochasticMatrix(std::move(p));
}

}  // namespace csas
