#pragma once

// Run configuration documents (YAML). Grammar, version 1:
//
//   version: 1                      # optional; must be 1 when present
//   beta: [1, 1]                    # required, true marginal utilities
//   alpha: 0                        # known intercept
//   alpha_hat: 0                    # consumer's intercept (misspecified mode)
//   noise: {sigma2: 0, seed: 0}
//   init: {kind: ridge, rho: 1e8, beta0: [0.9, 1.2]}
//         {kind: warmup}
//         {kind: prior, info: [[1, 0], [0, 1]], beta0: [0, 0]}
//   horizon: 100
//   norm: L2                        # L1 | L2 | LInf
//   strategy: {name: ..., kind: orthogonal, recompute: true,
//              bundle: [..], i: 0, j: 1, ratio: 1.0}
//   strategies: [ {...}, ... ]      # alternative to `strategy`
//   market: {gamma: [0, 0], delta_weight: 1, norm: L1, regime_premise: true,
//            beta_hat0: [..], stance: pessimistic, xi: -0.1, grid_points: 1001}
//
// Unknown keys are rejected. Errors name the offending key path.

#include "bundlelearn/market.hpp"
#include "bundlelearn/simulator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bundlelearn {

struct NamedStrategy {
  std::string name;
  Strategy strategy;
};

struct MarketSpec {
  MarketConfig config;
  std::optional<Vector> beta_hat0;
  std::optional<PriorBelief> prior;
};

struct RunConfig {
  Scenario scenario;
  std::vector<NamedStrategy> strategies;
  std::optional<MarketSpec> market;
};

RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

std::optional<Norm> norm_from_string(const std::string& name);
const char* to_string(Norm norm) noexcept;

}  // namespace bundlelearn
