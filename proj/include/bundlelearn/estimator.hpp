#pragma once

// Least-squares preference learning from bundled consumption.
//
// The learner's whole memory is a PrecisionState: the information matrix
// Z = X'X, its inverse W (once Z is invertible), and the current estimate of
// the marginal utilities. States are values; every operation returns a new one.

#include "bundlelearn/core.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <vector>

namespace bundlelearn {

template <typename Scalar>
struct BasicHistory {
  std::vector<VectorX<Scalar>> rows;
  std::vector<Scalar> utilities;
  Scalar baseline{0};  // known intercept alpha

  BasicHistory() = default;
  explicit BasicHistory(Scalar alpha) : baseline(alpha) {}

  void append(const VectorX<Scalar>& x, Scalar u) {
    if (!rows.empty() && x.size() != rows.front().size())
      throw Error(ErrorCode::DimensionMismatch, "history row has dimension " + std::to_string(x.size()) +
                                                    ", expected " + std::to_string(rows.front().size()));
    if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "bundle has non-finite entries");
    rows.push_back(x);
    utilities.push_back(u);
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(rows.size()); }
  Eigen::Index dimension() const { return rows.empty() ? 0 : rows.front().size(); }

  MatrixX<Scalar> design() const {
    MatrixX<Scalar> X(size(), dimension());
    for (Eigen::Index t = 0; t < size(); ++t) X.row(t) = rows[static_cast<std::size_t>(t)].transpose();
    return X;
  }

  VectorX<Scalar> utility_vector() const {
    return Eigen::Map<const VectorX<Scalar>>(utilities.data(), size());
  }
};

template <typename Scalar>
struct BasicPrecisionState {
  MatrixX<Scalar> info;      // Z_t
  MatrixX<Scalar> cov;       // W_t = Z_t^{-1}, meaningful only when full_rank
  VectorX<Scalar> estimate;  // beta-hat_t
  std::int64_t count{0};
  bool full_rank{false};
  Scalar ridge{0};     // prior scale rho; zero for an exact least-squares state
  Scalar baseline{0};  // intercept used to form surprises (alpha, or alpha-hat when misspecified)
  std::int64_t since_reinvert{0};

  Eigen::Index dimension() const { return estimate.size(); }
};

template <typename Scalar>
struct BasicUpdateResult {
  Scalar surprise{0};
  VectorX<Scalar> gain;
  Scalar predicted_variance{0};
  BasicPrecisionState<Scalar> new_state;
};

template <typename Scalar>
struct Prediction {
  Scalar mean;
  Scalar variance;
};

template <typename Scalar>
struct EstimationError {
  VectorX<Scalar> delta;
  Scalar mse;
};

using History = BasicHistory<double>;
using PrecisionState = BasicPrecisionState<double>;
using UpdateResult = BasicUpdateResult<double>;

namespace detail {

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()) / typename Derived::Scalar(2);
}

template <typename Scalar>
MatrixX<Scalar> invert_spd(const MatrixX<Scalar>& info) {
  Eigen::LDLT<MatrixX<Scalar>> ldlt(info);
  const auto n = info.rows();
  return symmetrized(ldlt.solve(MatrixX<Scalar>::Identity(n, n)));
}

}  // namespace detail

/// Number of eigenvalues of a PSD matrix above kRankTolerance * lambda_max.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& info) {
  using Scalar = typename Derived::Scalar;
  if (info.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(info.eval(), Eigen::EigenvaluesOnly);
  const auto& lambda = eig.eigenvalues();
  const Scalar top = lambda.maxCoeff();
  if (!(top > Scalar{0})) return 0;
  return (lambda.array() > Scalar(kRankTolerance) * top).count();
}

template <typename Derived>
bool is_full_rank(const Eigen::MatrixBase<Derived>& info) {
  return numerical_rank(info) == info.rows();
}

/// Least-squares estimate from the whole history (Z must be numerically invertible).
template <typename Scalar>
BasicPrecisionState<Scalar> batch_ols(const BasicHistory<Scalar>& history) {
  if (history.size() == 0) throw Error(ErrorCode::InvalidArgument, "batch_ols: empty history");
  const MatrixX<Scalar> X = history.design();
  const VectorX<Scalar> y = history.utility_vector().array() - history.baseline;
  const Eigen::Index n = X.cols();

  BasicPrecisionState<Scalar> state;
  state.info = X.transpose() * X;
  const Eigen::Index rank = numerical_rank(state.info);
  if (rank < n) throw RankDeficientError(rank, n);

  Eigen::LDLT<MatrixX<Scalar>> ldlt(state.info);
  state.cov = detail::symmetrized(ldlt.solve(MatrixX<Scalar>::Identity(n, n)));
  state.estimate = ldlt.solve(X.transpose() * y);
  state.count = history.size();
  state.full_rank = true;
  state.baseline = history.baseline;
  return state;
}

/// Mixed (ridge) starting state: Z_0 = I/rho, W_0 = rho I, beta-hat_0 = beta0.
template <typename Derived>
BasicPrecisionState<typename Derived::Scalar> init_ridge(Eigen::Index n, typename Derived::Scalar rho,
                                                         const Eigen::MatrixBase<Derived>& beta0,
                                                         typename Derived::Scalar baseline = 0) {
  using Scalar = typename Derived::Scalar;
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "init_ridge: n must be positive");
  if (!(rho > Scalar{0})) throw Error(ErrorCode::InvalidArgument, "init_ridge: rho must be positive");
  if (beta0.size() != n) throw Error(ErrorCode::DimensionMismatch, "init_ridge: beta0 has wrong dimension");
  BasicPrecisionState<Scalar> state;
  state.info = MatrixX<Scalar>::Identity(n, n) / rho;
  state.cov = MatrixX<Scalar>::Identity(n, n) * rho;
  state.estimate = beta0;
  state.full_rank = true;
  state.ridge = rho;
  state.baseline = baseline;
  return state;
}

/// Starting state from an explicit prior precision and mean.
template <typename Scalar>
BasicPrecisionState<Scalar> init_prior(const MatrixX<Scalar>& info, const VectorX<Scalar>& beta0,
                                       Scalar baseline = 0) {
  if (info.rows() != info.cols() || info.rows() != beta0.size())
    throw Error(ErrorCode::DimensionMismatch, "init_prior: info and beta0 disagree");
  if (!is_full_rank(info)) throw Error(ErrorCode::NotPositiveDefinite, "init_prior: prior precision is singular");
  BasicPrecisionState<Scalar> state;
  state.info = detail::symmetrized(info);
  state.cov = detail::invert_spd(state.info);
  state.estimate = beta0;
  state.full_rank = true;
  state.baseline = baseline;
  return state;
}

/// Prediction weights W x / (1 + x'W x).
template <typename DerivedW, typename DerivedX>
VectorX<typename DerivedX::Scalar> gain(const Eigen::MatrixBase<DerivedW>& cov, const Eigen::MatrixBase<DerivedX>& x) {
  const VectorX<typename DerivedX::Scalar> wx = cov * x;
  return wx / (typename DerivedX::Scalar(1) + x.dot(wx));
}

/// Absorbs one observation (x, u) with a rank-one downdate of W.
template <typename Scalar, typename Derived>
BasicUpdateResult<Scalar> recursive_update(const BasicPrecisionState<Scalar>& state, const Eigen::MatrixBase<Derived>& x,
                                           Scalar u, Scalar sigma2 = 1) {
  if (!state.full_rank) throw Error(ErrorCode::StateNotFullRank, "recursive_update: covariance not available");
  if (x.size() != state.dimension()) throw Error(ErrorCode::DimensionMismatch, "recursive_update: bundle dimension");
  if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "recursive_update: bundle has non-finite entries");

  const VectorX<Scalar> wx = state.cov * x;
  const Scalar xwx = x.dot(wx);
  const Scalar denom = Scalar{1} + xwx;

  BasicUpdateResult<Scalar> out;
  out.surprise = u - (state.baseline + x.dot(state.estimate));
  out.gain = wx / denom;
  out.predicted_variance = sigma2 * xwx;

  BasicPrecisionState<Scalar>& next = out.new_state;
  next = state;
  next.info.noalias() += x * x.transpose();
  next.estimate += out.gain * out.surprise;
  next.count = state.count + 1;
  next.since_reinvert = state.since_reinvert + 1;
  if (next.since_reinvert >= kReinvertEvery) {
    next.cov = detail::invert_spd(next.info);
    next.since_reinvert = 0;
  } else {
    next.cov.noalias() -= (wx * wx.transpose()) / denom;
    next.cov = detail::symmetrized(next.cov);
  }
  return out;
}

template <typename Scalar, typename Derived>
Prediction<Scalar> predict_utility(const BasicPrecisionState<Scalar>& state, const Eigen::MatrixBase<Derived>& x,
                                   Scalar sigma2) {
  if (!state.full_rank) throw Error(ErrorCode::StateNotFullRank, "predict_utility: covariance not available");
  if (x.size() != state.dimension()) throw Error(ErrorCode::DimensionMismatch, "predict_utility: bundle dimension");
  const Scalar quad = x.dot(state.cov * x);
  return {state.baseline + x.dot(state.estimate), sigma2 * std::max(quad, Scalar{0})};
}

template <typename Scalar, typename Derived>
EstimationError<Scalar> estimation_error(const BasicPrecisionState<Scalar>& state,
                                         const Eigen::MatrixBase<Derived>& beta_true) {
  if (beta_true.size() != state.dimension())
    throw Error(ErrorCode::DimensionMismatch, "estimation_error: beta has dimension " +
                                                  std::to_string(beta_true.size()) + ", state has " +
                                                  std::to_string(state.dimension()));
  VectorX<Scalar> delta = state.estimate - beta_true;
  const Scalar mse = delta.squaredNorm();
  return {std::move(delta), mse};
}

/// Noiseless one-step drift E[beta-hat_{t+1}] - beta-hat_t = -gain * (x' delta).
template <typename Scalar, typename DerivedX, typename DerivedB>
VectorX<Scalar> expected_update(const BasicPrecisionState<Scalar>& state, const Eigen::MatrixBase<DerivedX>& x,
                                const Eigen::MatrixBase<DerivedB>& beta_true) {
  if (!state.full_rank) throw Error(ErrorCode::StateNotFullRank, "expected_update: covariance not available");
  if (x.size() != state.dimension() || beta_true.size() != state.dimension())
    throw Error(ErrorCode::DimensionMismatch, "expected_update: dimension");
  const VectorX<Scalar> delta = state.estimate - beta_true;
  return -gain(state.cov, x) * x.dot(delta);
}

/// sigma^2 n^2 / t: the smallest achievable expected squared error with unit-norm bundles.
inline double mse_lower_bound(std::int64_t t, std::int64_t n, double sigma2) {
  if (n < 1 || t < n) throw Error(ErrorCode::InvalidArgument, "mse_lower_bound: requires t >= n >= 1");
  return sigma2 * static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(t);
}

/// Slopes and intercept when the consumer estimates alpha jointly, by
/// partialling out the constant (demeaned regressors and utilities).
template <typename Scalar>
struct InterceptFit {
  VectorX<Scalar> slopes;
  Scalar intercept;
  MatrixX<Scalar> demeaned_info;  // X' M X
};

template <typename Scalar>
InterceptFit<Scalar> batch_ols_estimated_intercept(const BasicHistory<Scalar>& history) {
  if (history.size() < 2) throw Error(ErrorCode::InvalidArgument, "estimated intercept needs at least two rows");
  const MatrixX<Scalar> X = history.design();
  const VectorX<Scalar> u = history.utility_vector();
  const VectorX<Scalar> xbar = X.colwise().mean().transpose();
  const Scalar ubar = u.mean();
  const MatrixX<Scalar> Xc = X.rowwise() - xbar.transpose();
  const VectorX<Scalar> uc = u.array() - ubar;

  InterceptFit<Scalar> fit;
  fit.demeaned_info = Xc.transpose() * Xc;
  const Eigen::Index rank = numerical_rank(fit.demeaned_info);
  if (rank < X.cols()) throw RankDeficientError(rank, X.cols());
  fit.slopes = fit.demeaned_info.ldlt().solve(Xc.transpose() * uc);
  fit.intercept = ubar - xbar.dot(fit.slopes);
  return fit;
}

}  // namespace bundlelearn
