#include "bundlelearn/simulator.hpp"

#include "bundlelearn/design.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <thread>

namespace bundlelearn {

const char* to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::SingleRoundRobin: return "round_robin";
    case StrategyKind::PopularityBiased: return "popularity";
    case StrategyKind::CorrelationBreaking: return "correlation_breaking";
    case StrategyKind::OrthogonalToError: return "orthogonal";
    case StrategyKind::FixedBundle: return "fixed";
    case StrategyKind::TwoGoodTargeted: return "two_good";
  }
  return "unknown";
}

std::optional<StrategyKind> strategy_kind_from_string(const std::string& name) {
  for (auto k : {StrategyKind::SingleRoundRobin, StrategyKind::PopularityBiased, StrategyKind::CorrelationBreaking,
                 StrategyKind::OrthogonalToError, StrategyKind::FixedBundle, StrategyKind::TwoGoodTargeted})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

void Scenario::validate() const {
  const Eigen::Index n = dimension();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "scenario: beta must have at least one good");
  if (!beta_true.allFinite()) throw Error(ErrorCode::InvalidArgument, "scenario: beta has non-finite entries");
  if (!(noise.sigma2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scenario: sigma2 must be >= 0");
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "scenario: horizon must be >= 1");
  if (const auto* r = std::get_if<RidgeInit>(&init)) {
    if (!(r->rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "scenario: ridge rho must be > 0");
    if (r->beta0.size() != 0 && r->beta0.size() != n)
      throw Error(ErrorCode::DimensionMismatch, "scenario: beta0 dimension");
  } else if (const auto* p = std::get_if<PriorInit>(&init)) {
    if (p->info.rows() != n || p->info.cols() != n || p->beta0.size() != n)
      throw Error(ErrorCode::DimensionMismatch, "scenario: prior dimension");
  }
}

namespace {

struct Proposal {
  Bundle x;
  bool infeasible{false};
};

// Robust policies see only the learner's state; they cannot reach the truth.
class RobustPolicy {
 public:
  virtual ~RobustPolicy() = default;
  virtual Bundle propose(const PrecisionState& state, std::int64_t t) = 0;
};

class InformedPolicy {
 public:
  virtual ~InformedPolicy() = default;
  virtual Proposal propose(const PrecisionState& state, const TruthOracle& truth, const Bundle* previous) = 0;
};

class RoundRobin final : public RobustPolicy {
 public:
  Bundle propose(const PrecisionState& state, std::int64_t t) override {
    const Eigen::Index n = state.dimension();
    return Bundle::Unit(n, static_cast<Eigen::Index>((t - 1) % n));
  }
};

class Spectral final : public RobustPolicy {
 public:
  Spectral(ShiftDirection which, bool recompute) : which_(which), recompute_(recompute) {}
  Bundle propose(const PrecisionState& state, std::int64_t) override {
    if (recompute_ || cached_.size() == 0) {
      const SpectralSummary s = decompose(state.info, false);
      cached_ = which_ == ShiftDirection::PopularityBiased ? s.vN : s.vC;
    }
    return cached_;
  }

 private:
  ShiftDirection which_;
  bool recompute_;
  Bundle cached_;
};

class Fixed final : public RobustPolicy {
 public:
  explicit Fixed(Bundle x) : x_(std::move(x)) {}
  Bundle propose(const PrecisionState& state, std::int64_t) override {
    if (x_.size() != state.dimension()) throw Error(ErrorCode::DimensionMismatch, "fixed bundle dimension");
    return x_;
  }

 private:
  Bundle x_;
};

class OrthogonalToTruth final : public InformedPolicy {
 public:
  Proposal propose(const PrecisionState& state, const TruthOracle& truth, const Bundle* previous) override {
    const Vector delta = state.estimate - truth.beta();
    const Eigen::Index n = state.dimension();
    const Bundle fallback = previous ? *previous : Bundle::Unit(n, 0);
    if (delta.squaredNorm() == 0.0) return {fallback, true};
    if (previous) {
      try {
        return {orthogonal_bundle(delta, *previous)};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AnchorParallel) throw;
      }
    }
    if (n < 2) return {fallback, true};
    return {orthogonal_bundle(delta)};
  }
};

class TwoGood final : public InformedPolicy {
 public:
  TwoGood(Eigen::Index i, Eigen::Index j, std::optional<double> ratio) : i_(i), j_(j), ratio_(ratio) {}
  Proposal propose(const PrecisionState& state, const TruthOracle& truth, const Bundle*) override {
    const Eigen::Index n = state.dimension();
    if (i_ < 0 || j_ < 0 || i_ >= n || j_ >= n || i_ == j_)
      throw Error(ErrorCode::InvalidArgument, "two-good strategy needs distinct goods in range");
    Bundle x = Bundle::Zero(n);
    x(i_) = 1.0;
    if (ratio_) {
      x(j_) = *ratio_;
      return {x};
    }
    const Vector& beta = truth.beta();
    const double di = state.estimate(i_) - beta(i_);
    const double dj = state.estimate(j_) - beta(j_);
    if (di > 0.0 && dj < 0.0) {
      x(j_) = two_good_orthogonal(di, dj);
    } else if (di < 0.0 && dj > 0.0) {
      x(j_) = 1.0 / two_good_orthogonal(dj, di);
    } else {
      x(j_) = 1.0;
      return {x, true};
    }
    return {x};
  }

 private:
  Eigen::Index i_, j_;
  std::optional<double> ratio_;
};

double draw_utility(const Scenario& sc, const Bundle& x, Rng& rng) {
  double u = sc.alpha + x.dot(sc.beta_true);
  if (sc.noise.sigma2 > 0.0) u += std::sqrt(sc.noise.sigma2) * rng.normal();
  return u;
}

}  // namespace

PrecisionState initial_state(const Scenario& sc, Rng& rng) {
  const Eigen::Index n = sc.dimension();
  const double baseline = sc.consumer_intercept();
  if (const auto* r = std::get_if<RidgeInit>(&sc.init)) {
    const Vector beta0 = r->beta0.size() == 0 ? Vector::Zero(n) : r->beta0;
    return init_ridge(n, r->rho, beta0, baseline);
  }
  if (const auto* p = std::get_if<PriorInit>(&sc.init)) return init_prior(p->info, p->beta0, baseline);
  History warm(baseline);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Bundle x = Bundle::Unit(n, k);
    warm.append(x, draw_utility(sc, x, rng));
  }
  return batch_ols(warm);
}

Trajectory run(const Scenario& sc, const Strategy& strategy) {
  sc.validate();
  Rng rng(sc.noise.seed);
  PrecisionState state = initial_state(sc, rng);

  std::unique_ptr<RobustPolicy> robust;
  std::unique_ptr<InformedPolicy> informed;
  switch (strategy.kind) {
    case StrategyKind::SingleRoundRobin: robust = std::make_unique<RoundRobin>(); break;
    case StrategyKind::PopularityBiased:
      robust = std::make_unique<Spectral>(ShiftDirection::PopularityBiased, strategy.recompute);
      break;
    case StrategyKind::CorrelationBreaking:
      robust = std::make_unique<Spectral>(ShiftDirection::CorrelationBreaking, strategy.recompute);
      break;
    case StrategyKind::FixedBundle: robust = std::make_unique<Fixed>(strategy.bundle); break;
    case StrategyKind::OrthogonalToError: informed = std::make_unique<OrthogonalToTruth>(); break;
    case StrategyKind::TwoGoodTargeted:
      informed = std::make_unique<TwoGood>(strategy.i, strategy.j, strategy.ratio);
      break;
  }

  const TruthOracle truth(sc.beta_true);
  Trajectory traj;
  traj.dimension = sc.dimension();
  traj.sigma2 = sc.noise.sigma2;
  traj.steps.reserve(static_cast<std::size_t>(sc.horizon));
  std::optional<std::int64_t> last_moving;

  for (std::int64_t t = 1; t <= sc.horizon; ++t) {
    Proposal p;
    if (robust) {
      p.x = robust->propose(state, t);
    } else {
      p = informed->propose(state, truth, traj.steps.empty() ? nullptr : &traj.steps.back().bundle);
    }
    const Bundle x = normalized(p.x, sc.norm);
    const double u = draw_utility(sc, x, rng);
    UpdateResult up = recursive_update(state, x, u, sc.noise.sigma2);

    if ((up.new_state.estimate - state.estimate).norm() >= 1e-12) last_moving = t;
    state = std::move(up.new_state);

    const Vector lambda =
        Eigen::SelfAdjointEigenSolver<Matrix>(state.info, Eigen::EigenvaluesOnly).eigenvalues();
    const double lmin = lambda(0);
    const double lmax = lambda(lambda.size() - 1);
    const Vector err = state.estimate - sc.beta_true;
    traj.steps.push_back({t, x, u, up.surprise, state.estimate, err.squaredNorm(),
                          lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity(), lmin, p.infeasible});
  }

  const std::int64_t first_still = last_moving ? *last_moving + 1 : 1;
  if (first_still <= sc.horizon) traj.stall_step = first_still;
  traj.final_state = std::move(state);
  traj.oracle_reads = truth.reads();
  return traj;
}

std::vector<Trajectory> run_sweep(const Scenario& sc, const Strategy& strategy, std::uint64_t base_seed,
                                  std::size_t count, unsigned threads) {
  std::vector<Trajectory> out(count);
  if (count == 0) return out;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(count);
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        Scenario copy = sc;
        copy.noise.seed = base_seed + k;
        out[k] = run(copy, strategy);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

ConvergenceDiagnostics convergence_diagnostics(const Trajectory& traj) {
  if (traj.steps.empty()) throw Error(ErrorCode::InvalidArgument, "convergence_diagnostics: empty trajectory");
  ConvergenceDiagnostics d{};
  d.final_mse = traj.steps.back().mse;

  // Least-squares slope of lambda_min over the second half of the run.
  const std::size_t len = traj.steps.size();
  const std::size_t start = len / 2;
  const std::size_t m = len - start;
  if (m >= 2) {
    double tbar = 0, lbar = 0;
    for (std::size_t k = start; k < len; ++k) {
      tbar += static_cast<double>(traj.steps[k].t);
      lbar += traj.steps[k].lambda_min;
    }
    tbar /= static_cast<double>(m);
    lbar /= static_cast<double>(m);
    double num = 0, den = 0;
    for (std::size_t k = start; k < len; ++k) {
      const double dt = static_cast<double>(traj.steps[k].t) - tbar;
      num += dt * (traj.steps[k].lambda_min - lbar);
      den += dt * dt;
    }
    const double slope = num / den;
    d.lambda_min_divergent = slope > 1e-9 && traj.steps.back().lambda_min > traj.steps[start].lambda_min;
  }

  const double t = static_cast<double>(traj.final_state.count);
  const double n = static_cast<double>(traj.dimension);
  d.noiseless = traj.sigma2 == 0.0;
  d.bound_ratio = d.final_mse * t / (n * n * (d.noiseless ? 1.0 : traj.sigma2));
  return d;
}

}  // namespace bundlelearn
