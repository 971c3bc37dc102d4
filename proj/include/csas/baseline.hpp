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

// Derivative-feedback consensus iteration used as the comparison baseline:
//
//   s(k+1) = P(k) s(k) - mu * (sum_i f_i'(s_i(k))) * 1
//
// with P(k) row stochastic. Stable for 0 < mu < 2 / sum_i d_max^i, where
// d_max^i bounds the growth of f_i' on the speed range.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "csas/fleet.hpp"
#include "csas/graph.hpp"

namespace csas {

struct DpState {
  std::size_t k = 0;
  Eigen::VectorXd s;  // one speed per vehicle, fleet order
};

struct DpConfig {
  double mu = 0.0;
  double tol_consensus = 0.01;  // km/h, max - min of s
  double tol_gradient = 0.01;   // |sum_i f_i'(mean s)|
  std::size_t max_iter = 10'000;
  double lo = kDefaultSpeedLo;  // iterates are clamped to [lo, hi]
  double hi = kDefaultSpeedHi;
};

/// 2 / sum_i d_max^i. Throws BaselineInapplicableError if some vehicle is not
/// strictly convex on [lo, hi].
double mu_upper_bound(const Fleet& fleet, double lo, double hi);

/// One clamped update. The gradient sum is taken in fleet order.
DpState dp_step(const DpState& state, const StochasticMatrix& p,
                const Fleet& fleet, double mu, double lo, double hi);

/// |sum_i f_i'(mean(s))|.
double consensus_residual(const Fleet& fleet, const Eigen::VectorXd& s);

struct DpResult {
  Eigen::VectorXd s_final;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;   // entry k: residual of s(k)
  std::vector<Eigen::VectorXd> states;    // entry k: s(k)

  double consensus_speed() const { return s_final.mean(); }
};

// Iterates dp_step with P(k) = row_stochastic_from_graph(graphs.at(k)) until
// the spread is below tol_consensus and the residual below tol_gradient, or
// max_iter steps have been taken. Non-convergence is reported, not thrown.
DpResult run_dp(const Fleet& fleet, const GraphSequence& graphs,
                const DpConfig& config, const Eigen::VectorXd& s0);

/// Each vehicle's own minimiser on the grid speeds (lowest speed on ties).
Eigen::VectorXd individual_optima(const Fleet& fleet,
                                  const Eigen::VectorXd& speeds);

}  // namespace csas
