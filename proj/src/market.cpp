#include "bundlelearn/market.hpp"

#include "bundlelearn/spectral.hpp"

#include <cmath>
#include <limits>

namespace bundlelearn {

const char* to_string(PlanMode mode) noexcept {
  switch (mode) {
    case PlanMode::SellDirect: return "sell_direct";
    case PlanMode::Manipulation: return "manipulation";
    case PlanMode::Discovery: return "discovery";
  }
  return "unknown";
}

void MarketConfig::validate(Eigen::Index n) const {
  if (gamma.size() != n) throw Error(ErrorCode::DimensionMismatch, "market: gamma has wrong dimension");
  if (!gamma.allFinite()) throw Error(ErrorCode::InvalidArgument, "market: gamma has non-finite entries");
  if (!(delta_weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "market: delta_weight must be > 0");
  if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "market: grid_points must be >= 2");
}

namespace {

Eigen::Index argmax_first(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k)
    if (v(k) > v(best)) best = k;
  return best;
}

// A point a*e_a + b*e_b on the signed l1 sphere (b = 0 for vertices).
struct EdgePoint {
  Eigen::Index ia, ib;
  double a, b;
};

// Vertices, then every two-good edge sampled on a uniform grid, plus the exact
// point on each edge orthogonal to delta when it lies inside the edge.
std::vector<EdgePoint> l1_sphere_candidates(Eigen::Index n, int grid, const Vector& delta) {
  std::vector<EdgePoint> pts;
  for (Eigen::Index k = 0; k < n; ++k) {
    pts.push_back({k, k, 1.0, 0.0});
    pts.push_back({k, k, -1.0, 0.0});
  }
  for (Eigen::Index ia = 0; ia < n; ++ia)
    for (Eigen::Index ib = ia + 1; ib < n; ++ib)
      for (double sa : {1.0, -1.0})
        for (double sb : {1.0, -1.0}) {
          for (int g = 1; g + 1 < grid; ++g) {
            const double s = static_cast<double>(g) / static_cast<double>(grid - 1);
            pts.push_back({ia, ib, sa * (1.0 - s), sb * s});
          }
          const double den = sa * delta(ia) - sb * delta(ib);
          if (den != 0.0) {
            const double s = sa * delta(ia) / den;
            if (s > 0.0 && s < 1.0) pts.push_back({ia, ib, sa * (1.0 - s), sb * s});
          }
        }
  return pts;
}

Bundle to_bundle(const EdgePoint& p, Eigen::Index n) {
  Bundle x = Bundle::Zero(n);
  x(p.ia) += p.a;
  x(p.ib) += p.b;
  return x;
}

}  // namespace

PricingPlan plan_complete_info(const Vector& beta, const Vector& beta_hat0, const PrecisionState& state0,
                               const MarketConfig& cfg) {
  const Eigen::Index n = beta.size();
  if (beta_hat0.size() != n || state0.dimension() != n || state0.cov.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "plan_complete_info: dimensions disagree");
  cfg.validate(n);
  if (cfg.norm != Norm::L1) throw Error(ErrorCode::InvalidArgument, "plan_complete_info: requires the l1 norm");
  if (!state0.full_rank) throw Error(ErrorCode::StateNotFullRank, "plan_complete_info: W_0 unavailable");

  PrecisionState s0 = state0;
  s0.estimate = beta_hat0;
  const Matrix& W = s0.cov;
  const Vector delta = beta_hat0 - beta;

  PricingPlan plan{};
  plan.regime_premise = cfg.regime_premise;
  plan.believed_best = argmax_first(beta_hat0 - cfg.gamma);
  plan.true_best = argmax_first(beta - cfg.gamma);
  const Eigen::Index i = plan.believed_best;
  const Eigen::Index j = plan.true_best;

  if (i == j) {
    plan.mode = beta_hat0(i) <= beta(i) ? PlanMode::SellDirect : PlanMode::Manipulation;
  } else {
    plan.mode = beta_hat0(i) - cfg.gamma(i) > beta(j) - cfg.gamma(j) ? PlanMode::Manipulation : PlanMode::Discovery;
  }
  plan.sold_in_period2 = plan.mode == PlanMode::Discovery ? j : i;
  const Eigen::Index target = plan.sold_in_period2;

  if (plan.mode == PlanMode::SellDirect) {
    plan.x1 = Bundle::Unit(n, i);
  } else {
    // Expected drift of the target coordinate for a two-sparse x.
    const auto drift_target = [&](const EdgePoint& p) {
      const double wx_t = p.a * W(target, p.ia) + (p.ia == p.ib ? 0.0 : p.b * W(target, p.ib));
      const double q = p.a * p.a * W(p.ia, p.ia) + p.b * p.b * W(p.ib, p.ib) + 2.0 * p.a * p.b * W(p.ia, p.ib);
      const double xd = p.a * delta(p.ia) + p.b * delta(p.ib);
      return -wx_t / (1.0 + q) * xd;
    };
    const Vector margin0 = beta_hat0 - cfg.gamma;
    double best = -std::numeric_limits<double>::infinity();
    const EdgePoint* chosen = nullptr;
    const auto candidates = l1_sphere_candidates(n, cfg.grid_points, delta);
    for (const auto& p : candidates) {
      const double drift = drift_target(p);
      double score;
      if (plan.mode == PlanMode::Manipulation) {
        if (drift < -1e-12) continue;  // must not lower the perceived margin of the good sold later
        const double period1 = p.a * margin0(p.ia) + p.b * margin0(p.ib);
        score = period1 + cfg.delta_weight * (beta_hat0(target) + drift - cfg.gamma(target));
      } else {
        score = drift;
      }
      if (score > best) {
        best = score;
        chosen = &p;
      }
    }
    // Manipulation can be infeasible, e.g. with one overestimated good and nothing to pair it with.
    if (!chosen) throw Error(ErrorCode::StrategyInfeasible, "no bundle preserves the target's perceived margin");
    plan.x1 = to_bundle(*chosen, n);
    plan.non_unique = plan.mode == PlanMode::Manipulation;
  }

  plan.x2 = Bundle::Unit(n, target);
  plan.expected_beta_hat1 = beta_hat0 + expected_update(s0, plan.x1, beta);
  plan.p1 = plan.x1.dot(beta_hat0);
  plan.p2 = plan.x2.dot(plan.expected_beta_hat1);
  plan.objective =
      plan.x1.dot(beta_hat0 - cfg.gamma) + cfg.delta_weight * plan.x2.dot(plan.expected_beta_hat1 - cfg.gamma);
  return plan;
}

double stationary_objective(const Matrix& cov, const Bundle& x, double xi, double delta_weight) {
  const double q = x.dot(cov * x);
  return delta_weight * q / (1.0 + q) * xi;
}

Bundle plan_incomplete_info(const PrecisionState& state0, const PriorBelief& prior, const MarketConfig& cfg) {
  if (!state0.full_rank) throw Error(ErrorCode::StateNotFullRank, "plan_incomplete_info: W_0 unavailable");
  if (!(cfg.delta_weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "market: delta_weight must be > 0");
  if (cfg.norm != Norm::L2) throw Error(ErrorCode::InvalidArgument, "plan_incomplete_info: requires the l2 norm");
  if (prior.stance == Stance::Pessimistic ? !(prior.xi < 0.0) : !(prior.xi > 0.0))
    throw Error(ErrorCode::InvalidArgument, "prior: xi sign does not match stance");
  const SpectralSummary s = decompose(state0.info);
  return prior.stance == Stance::Pessimistic ? s.vN : s.vC;
}

WelfareDecomposition welfare(const BundleMap& bundle_map, const Vector& beta, const Vector& beta_hat,
                             const Vector& gamma, double /*alpha: cancels from every difference*/) {
  const Eigen::Index n = beta.size();
  if (beta_hat.size() != n || gamma.size() != n) throw Error(ErrorCode::DimensionMismatch, "welfare: dimensions");
  const Bundle x_true = bundle_map(beta);
  const Bundle x_hat = bundle_map(beta_hat);
  if (x_true.size() != n || x_hat.size() != n) throw Error(ErrorCode::DimensionMismatch, "welfare: bundle dimension");
  const Vector dbeta = beta_hat - beta;
  const Vector dx = x_hat - x_true;

  WelfareDecomposition w{};
  w.price_effect = x_true.dot(dbeta);
  w.cs_bundle_effect = dx.dot(dbeta);
  w.profit_bundle_effect = dx.dot(beta_hat - gamma);
  w.d_cs = -w.price_effect - w.cs_bundle_effect;
  w.d_profit = w.price_effect + w.profit_bundle_effect;
  w.d_welfare = w.d_cs + w.d_profit;
  return w;
}

BundleMap revealed_preference_map(std::vector<Bundle> feasible, Vector gamma) {
  if (feasible.empty()) throw Error(ErrorCode::InvalidArgument, "feasible set is empty");
  return [feasible = std::move(feasible), gamma = std::move(gamma)](const Vector& b) {
    std::size_t best = 0;
    double best_value = feasible[0].dot(b - gamma);
    for (std::size_t k = 1; k < feasible.size(); ++k) {
      const double v = feasible[k].dot(b - gamma);
      if (v > best_value) {
        best_value = v;
        best = k;
      }
    }
    return feasible[best];
  };
}

}  // namespace bundlelearn
