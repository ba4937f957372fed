#pragma once

// Two-period monopolist: complete-information planning over the signed l1
// sphere, the stationary spectral bundle under incomplete information, and the
// price/bundle welfare decomposition.

#include "bundlelearn/estimator.hpp"

#include <functional>
#include <vector>

namespace bundlelearn {

struct MarketConfig {
  Vector gamma;  // marginal costs
  double delta_weight{1.0};
  Norm norm{Norm::L1};
  bool regime_premise{true};  // caller asserts delta large and sigma2 small
  int grid_points{1001};      // per two-good edge

  void validate(Eigen::Index n) const;
};

enum class PlanMode { SellDirect, Manipulation, Discovery };
const char* to_string(PlanMode mode) noexcept;

struct PricingPlan {
  Bundle x1;
  Bundle x2;
  double p1;
  double p2;
  PlanMode mode;
  Eigen::Index believed_best;  // i: argmax beta-hat_0 - gamma
  Eigen::Index true_best;      // j: argmax beta - gamma
  Eigen::Index sold_in_period2;
  Vector expected_beta_hat1;
  double objective;  // x1'(beta-hat_0 - gamma) + delta * x2'(E[beta-hat_1] - gamma)
  bool non_unique;   // the proposition leaves the period-1 bundle underdetermined
  bool regime_premise;
};

/// `state0` supplies W_0; its estimate is replaced by beta_hat0.
PricingPlan plan_complete_info(const Vector& beta, const Vector& beta_hat0, const PrecisionState& state0,
                               const MarketConfig& cfg);

enum class Stance { Pessimistic, Optimistic };

struct PriorBelief {
  Stance stance;
  double xi;  // expected first-period surprise; negative when pessimistic
};

Bundle plan_incomplete_info(const PrecisionState& state0, const PriorBelief& prior, const MarketConfig& cfg);

/// delta * x'Wx / (1 + x'Wx) * xi: the part of the stationary objective that depends on x.
double stationary_objective(const Matrix& cov, const Bundle& x, double xi, double delta_weight);

struct WelfareDecomposition {
  double d_cs;
  double d_profit;
  double d_welfare;
  double price_effect;
  double cs_bundle_effect;
  double profit_bundle_effect;
};

using BundleMap = std::function<Bundle(const Vector& beliefs)>;

WelfareDecomposition welfare(const BundleMap& bundle_map, const Vector& beta, const Vector& beta_hat,
                             const Vector& gamma, double alpha);

/// Bundle map choosing argmax x'(b - gamma) over a finite feasible set (ties to the first).
BundleMap revealed_preference_map(std::vector<Bundle> feasible, Vector gamma);

}  // namespace bundlelearn
