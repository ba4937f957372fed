#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bundlelearn {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// A bundle is a plain vector over the good set; kept as an alias so Eigen
// expressions compose without conversions.
using Bundle = Vector;

enum class Norm { L1, L2, LInf };

enum class ErrorCode {
  RankDeficient,
  StateNotFullRank,
  DimensionMismatch,
  NotPositiveDefinite,
  NotSymmetric,
  ZeroBias,
  AnchorParallel,
  NotOrthogonal,
  SignViolation,
  DegenerateInteraction,
  SingularAugmentedZ,
  StrategyInfeasible,
  NeverFullRank,
  ParseError,
  DuplicateItemInRecord,
  SinkWriteFailure,
  ConfigError,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by batch estimation when X'X fails the scale-relative rank test.
class RankDeficientError : public Error {
 public:
  RankDeficientError(Eigen::Index rank, Eigen::Index n)
      : Error(ErrorCode::RankDeficient, "design rank " + std::to_string(rank) + " < " + std::to_string(n)),
        rank_(rank),
        n_(n) {}
  Eigen::Index rank() const noexcept { return rank_; }
  Eigen::Index dimension() const noexcept { return n_; }

 private:
  Eigen::Index rank_;
  Eigen::Index n_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column, const std::string& reason)
      : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + reason),
        line_(line),
        column_(column),
        reason_(reason) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

// Smallest eigenvalue of Z must exceed this fraction of the largest.
inline constexpr double kRankTolerance = 1e-10;
// Eigenvalues closer than this fraction of lambda_max form one cluster.
inline constexpr double kClusterTolerance = 1e-9;
// Default ridge scale for pre-identification learning.
inline constexpr double kDefaultRidge = 1e8;
// Cov is rebuilt from info after this many rank-one downdates.
inline constexpr std::int64_t kReinvertEvery = 256;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// Rescales `x` to unit norm of the requested kind. Zero input is returned unchanged.
template <typename Derived>
VectorX<typename Derived::Scalar> normalized(const Eigen::MatrixBase<Derived>& x, Norm norm) {
  using Scalar = typename Derived::Scalar;
  Scalar scale{0};
  switch (norm) {
    case Norm::L1: scale = x.template lpNorm<1>(); break;
    case Norm::L2: scale = x.norm(); break;
    case Norm::LInf: scale = x.template lpNorm<Eigen::Infinity>(); break;
  }
  if (scale == Scalar{0}) return x;
  return x / scale;
}

/// Flips `v` so that its largest-magnitude entry is positive. Entries within
/// `rel_tie` of the maximum magnitude count as tied; the lowest index decides.
template <typename Derived>
void normalize_sign(Eigen::MatrixBase<Derived>& v, typename Derived::Scalar rel_tie = 1e-9) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return;
  const Scalar peak = v.cwiseAbs().maxCoeff();
  if (peak == Scalar{0}) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (Scalar{1} - rel_tie)) {
      if (v(i) < Scalar{0}) v = -v;
      return;
    }
  }
}

}  // namespace bundlelearn
