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

#include "csas/baseline.hpp"

#include <string>

namespace csas {

double mu_upper_bound(const Fleet& fleet, double lo, double hi) {
  if (fleet.empty()) throw BaselineInapplicableError("empty fleet");
  double sum_dmax = 0.0;
  for (const auto& v : fleet) {
    const GrowthBounds gb = growth_bounds(v.factors, lo, hi);
    if (!gb.strictly_convex()) {
      throw BaselineInapplicableError(
          "cost of vehicle " + std::to_string(v.id.value) +
          " is not strictly convex on the speed range");
    }
    sum_dmax += gb.d_max;
  }
  return 2.0 / sum_dmax;
}

DpState dp_step(const DpState& state, const StochasticMatrix& p,
                const Fleet& fleet, double mu, double lo, double hi) {
  if (p.size() != state.s.size() ||
      static_cast<std::size_t>(state.s.size()) != fleet.size()) {
    throw ConfigError("baseline dimensions disagree");
  }
  if (!(mu > 0.0)) throw ConfigError("baseline step mu must be positive");
  double gradient = 0.0;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    gradient += emission_derivative(fleet[i].factors,
                                    state.s[static_cast<Eigen::Index>(i)]);
  }
  DpState next;
  next.k = state.k + 1;
  next.s = (p.matrix() * state.s).array() - mu * gradient;
  next.s = next.s.cwiseMax(lo).cwiseMin(hi);
  return next;
}

double consensus_residual(const Fleet& fleet, const Eigen::VectorXd& s) {
  const double mean = s.mean();
  double sum = 0.0;
  for (const auto& v : fleet) sum += emission_derivative(v.factors, mean);
  return std::abs(sum);
}

DpResult run_dp(const Fleet& fleet, const GraphSequence& graphs,
                const DpConfig& config, const Eigen::VectorXd& s0) {
  if (graphs.size() == 0) throw ConfigError("baseline needs a graph sequence");
  if (!(config.tol_consensus > 0.0) || !(config.tol_gradient > 0.0)) {
    throw ConfigError("baseline tolerances must be positive");
  }
  const double bound = mu_upper_bound(fleet, config.lo, config.hi);
  if (!(config.mu > 0.0) || !(config.mu < bound)) {
    throw ConfigError("baseline step mu must lie in (0, " +
                      std::to_string(bound) + ")");
  }

  for (std::size_t r = 0; r < graphs.size(); ++r) {
    const auto& vs = graphs.at(r).vertices();
    bool aligned = vs.size() == fleet.size();
    for (std::size_t i = 0; aligned && i < vs.size(); ++i) {
      aligned = vs[i] == fleet[i].id;
    }
    if (!aligned) {
      throw ConfigError("baseline graphs must have exactly the fleet's vehicles, "
                        "in ascending id order");
    }
  }

  DpResult out;
  DpState state{0, s0.cwiseMax(config.lo).cwiseMin(config.hi)};
  while (true) {
    const double residual = consensus_residual(fleet, state.s);
    out.residual_history.push_back(residual);
    out.states.push_back(state.s);
    const double spread = state.s.maxCoeff() - state.s.minCoeff();
    if (spread < config.tol_consensus && residual < config.tol_gradient) {
      out.converged = true;
      break;
    }
    if (state.k >= config.max_iter) break;
    const auto p = row_stochastic_from_graph(graphs.at(state.k));
    state = dp_step(state, p, fleet, config.mu, config.lo, config.hi);
  }
  out.s_final = state.s;
  out.iterations = state.k;
  return out;
}

Eigen::VectorXd individual_optima(const Fleet& fleet,
                                  const Eigen::VectorXd& speeds) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(fleet.size()));
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const Eigen::VectorXd costs = emission_rate(fleet[i].factors, speeds);
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < costs.size(); ++j) {
      if (costs[j] < costs[best]) best = j;
    }
    out[static_cast<Eigen::Index>(i)] = speeds[best];
  }
  return out;
}

}  // namespace csas
