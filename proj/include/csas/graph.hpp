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

#pragma once

// Directed communication graphs between vehicles.
//
// An edge (u, v) means u can transmit to v. Vertices are kept sorted by id;
// that order also fixes row/column order of matrices built from a graph.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "csas/common.hpp"

namespace csas {

struct Edge {
  VehicleId from;
  VehicleId to;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

class CommGraph {
 public:
  CommGraph() = default;

  // Throws ConfigError on self-loops, duplicate vertices or edges, and edges
  // that reference unknown vertices.
  CommGraph(std::vector<VehicleId> vertices, std::vector<Edge> edges);

  const std::vector<VehicleId>& vertices() const { return vertices_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t size() const { return vertices_.size(); }

  bool contains(VehicleId v) const;
  bool has_edge(VehicleId from, VehicleId to) const {
    return edges_.contains(Edge{from, to});
  }
  // Position of v in vertices(); throws ConfigError for unknown vertices.
  std::size_t index_of(VehicleId v) const;

  // v+ and v-, sorted by id.
  std::vector<VehicleId> out_neighbors(VehicleId v) const;
  std::vector<VehicleId> in_neighbors(VehicleId v) const;

  CommGraph with_vertex(VehicleId v) const;
  CommGraph with_edge(Edge e) const;

  friend bool operator==(const CommGraph&, const CommGraph&) = default;

 private:
  std::vector<VehicleId> vertices_;
  std::set<Edge> edges_;
};

std::size_t outdegree(const CommGraph& g, VehicleId v);

bool is_strongly_connected(const CommGraph& g);

/// Vertices with outdegree 0. Empty means every vehicle can split its table
/// across at least one neighbour.
std::vector<VehicleId> validate_privacy_precondition(const CommGraph& g);

/// Ring 1 -> 2 -> ... -> n -> 1. Throws ConfigError for n < 2.
CommGraph ring_topology(std::size_t n);

/// Ring over the given ids in the given order.
CommGraph ring_topology(std::span<const VehicleId> ids);

/// Maps vertex i (1-based) of `g` to ids[i-1]. `g` must have vertices 1..n.
CommGraph relabel(const CommGraph& g, std::span<const VehicleId> ids);

/// Keeps the listed vertices and the edges between them.
CommGraph induced_subgraph(const CommGraph& g, std::span<const VehicleId> keep);

CommGraph graph_union(std::span<const CommGraph> graphs);

// Time-varying topology. Any `window` consecutive graphs union to a strongly
// connected graph. Rounds past the end wrap around.
struct GraphSequence {
  std::vector<CommGraph> graphs;
  std::uint64_t seed = 0;
  std::size_t window = 1;

  std::size_t size() const { return graphs.size(); }
  const CommGraph& at(std::size_t round) const {
    return graphs[round % graphs.size()];
  }
};

/// Static topology as a one-element sequence.
GraphSequence constant_sequence(CommGraph g);

// Each round draws a random Hamiltonian cycle, drops some of its edges, and
// adds a few random chords. A round is redrawn until every full window that
// ends at it is strongly connected; after repeated failures the full cycle is
// used, which always satisfies the window condition. Deterministic in seed.
GraphSequence generate_switching_sequence(std::size_t n, std::size_t rounds,
                                          std::size_t window,
                                          std::uint64_t seed);

/// True when every run of `window` consecutive graphs unions to a strongly
/// connected graph.
bool windows_strongly_connected(const GraphSequence& seq);

class StochasticMatrix {
 public:
  // Throws ConfigError if `p` is not square, has negative entries, or a row
  // sum deviates from 1 by more than 1e-12.
  explicit StochasticMatrix(Eigen::MatrixXd p);

  const Eigen::MatrixXd& matrix() const { return p_; }
  Eigen::Index size() const { return p_.rows(); }

 private:
  Eigen::MatrixXd p_;
};

/// Equal weight 1/(1 + |v-|) on the vertex itself and each in-neighbour.
StochasticMatrix row_stochastic_from_graph(const CommGraph& g);

}  // namespace csas
