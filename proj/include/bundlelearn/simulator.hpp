#pragma once

// Consumer/provider loop: a strategy proposes a bundle, utility is drawn as
// alpha + x'beta + eps, and the consumer updates recursively.

#include "bundlelearn/estimator.hpp"
#include "bundlelearn/rng.hpp"
#include "bundlelearn/spectral.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bundlelearn {

struct NoiseModel {
  double sigma2{0.0};
  std::uint64_t seed{0};
};

struct RidgeInit {
  double rho{kDefaultRidge};
  Vector beta0;  // empty means zero
};

// One pass of unit singletons, estimated by batch OLS, before the horizon starts.
struct WarmupInit {};

struct PriorInit {
  Matrix info;
  Vector beta0;
};

using InitSpec = std::variant<RidgeInit, WarmupInit, PriorInit>;

struct Scenario {
  Vector beta_true;
  double alpha{0.0};
  std::optional<double> alpha_hat;  // consumer's intercept; alpha when unset
  NoiseModel noise;
  InitSpec init{WarmupInit{}};
  std::int64_t horizon{100};
  Norm norm{Norm::L2};

  Eigen::Index dimension() const { return beta_true.size(); }
  double consumer_intercept() const { return alpha_hat.value_or(alpha); }
  void validate() const;
};

enum class StrategyKind {
  SingleRoundRobin,
  PopularityBiased,
  CorrelationBreaking,
  OrthogonalToError,
  FixedBundle,
  TwoGoodTargeted,
};

struct Strategy {
  StrategyKind kind{StrategyKind::SingleRoundRobin};
  bool recompute{true};  // spectral kinds: recompute the direction every step
  Bundle bundle;         // FixedBundle payload
  Eigen::Index i{0};     // TwoGoodTargeted goods
  Eigen::Index j{1};
  std::optional<double> ratio;  // x_j / x_i; unset means the orthogonal ratio from the current error

  bool needs_truth() const {
    return kind == StrategyKind::OrthogonalToError || kind == StrategyKind::TwoGoodTargeted;
  }
};

const char* to_string(StrategyKind kind) noexcept;
std::optional<StrategyKind> strategy_kind_from_string(const std::string& name);

/// Read-counting view of the true preferences. Only complete-information
/// strategies are ever given one.
class TruthOracle {
 public:
  explicit TruthOracle(const Vector& beta) : beta_(beta) {}
  const Vector& beta() const {
    ++reads_;
    return beta_;
  }
  std::int64_t reads() const { return reads_; }

 private:
  const Vector& beta_;
  mutable std::int64_t reads_{0};
};

struct StepRecord {
  std::int64_t t;
  Bundle bundle;
  double utility;
  double surprise;
  Vector estimate;
  double mse;
  double kappa;
  double lambda_min;
  bool infeasible;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  PrecisionState final_state;
  std::int64_t oracle_reads{0};
  // First t after which the estimate never moves by more than 1e-12 (L2).
  std::optional<std::int64_t> stall_step;
  Eigen::Index dimension{0};
  double sigma2{0.0};
};

/// Learner state before the first horizon step. Warmup draws its utilities
/// from `rng`, so the noise stream stays shared with the run.
PrecisionState initial_state(const Scenario& scenario, Rng& rng);

Trajectory run(const Scenario& scenario, const Strategy& strategy);

/// Runs scenario copies with seeds base_seed, base_seed+1, ... concurrently.
/// Results come back in seed order.
std::vector<Trajectory> run_sweep(const Scenario& scenario, const Strategy& strategy, std::uint64_t base_seed,
                                  std::size_t count, unsigned threads = 0);

struct ConvergenceDiagnostics {
  bool lambda_min_divergent;
  double final_mse;
  double bound_ratio;  // final_mse * t / (sigma2 n^2); final_mse * t / n^2 when sigma2 = 0
  bool noiseless;
};

ConvergenceDiagnostics convergence_diagnostics(const Trajectory& traj);

}  // namespace bundlelearn
