#include "bundlelearn/design.hpp"

#include <cmath>

namespace bundlelearn {

namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

// Index of the largest |v_k| not equal to `skip`; ties go to the lower index.
Eigen::Index argmax_abs(const Vector& v, Eigen::Index skip) {
  Eigen::Index best = -1;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k == skip) continue;
    if (best < 0 || std::abs(v(k)) > std::abs(v(best))) best = k;
  }
  return best;
}

}  // namespace

Bundle sum_normalized(const Bundle& x) {
  const double s = x.sum();
  if (s == 0.0) throw Error(ErrorCode::InvalidArgument, "bundle entries sum to zero");
  return x / s;
}

Bundle orthogonal_bundle(const Vector& delta, const std::optional<Bundle>& anchor, Norm norm) {
  require_finite(delta, "delta");
  const double dd = delta.squaredNorm();
  if (dd == 0.0) throw Error(ErrorCode::ZeroBias, "delta is zero; every bundle is orthogonal");

  Bundle x;
  if (anchor) {
    if (anchor->size() != delta.size()) throw Error(ErrorCode::DimensionMismatch, "anchor dimension");
    require_finite(*anchor, "anchor");
    x = *anchor - (anchor->dot(delta) / dd) * delta;
    if (!(x.norm() > 1e-10 * anchor->norm())) throw Error(ErrorCode::AnchorParallel, "anchor is parallel to delta");
  } else {
    if (delta.size() < 2)
      throw Error(ErrorCode::InvalidArgument, "no nonzero bundle is orthogonal to delta in one dimension");
    Eigen::Index a = argmax_abs(delta, -1);
    Eigen::Index b = argmax_abs(delta, a);
    if (b < a) std::swap(a, b);
    x = Bundle::Zero(delta.size());
    x(a) = delta(b);
    x(b) = -delta(a);
    normalize_sign(x);
  }
  return normalized(x, norm);
}

double two_good_orthogonal(double delta_i, double delta_j) {
  if (!(delta_i > 0.0) || !(delta_j < 0.0))
    throw Error(ErrorCode::SignViolation, "two-good orthogonal bundle needs delta_i > 0 > delta_j");
  return -delta_i / delta_j;
}

JointIncreaseRegion joint_increase_region(const Matrix& cov, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = cov.rows();
  if (cov.cols() != n) throw Error(ErrorCode::DimensionMismatch, "cov is not square");
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw Error(ErrorCode::InvalidArgument, "need distinct goods i, j");
  const double wij = cov(i, j);
  if (wij >= 0.0) return {0.0, std::numeric_limits<double>::infinity(), true};
  const double lower = -wij / cov(j, j);
  const double upper = cov(i, i) / -wij;
  return {lower, upper, lower < upper};
}

Eigen::Index companion_good(const Matrix& cov, const Vector& delta, Eigen::Index target, CompanionObjective objective) {
  const Eigen::Index n = cov.rows();
  if (cov.cols() != n || delta.size() != n) throw Error(ErrorCode::DimensionMismatch, "companion_good dimensions");
  if (target < 0 || target >= n) throw Error(ErrorCode::InvalidArgument, "target good out of range");
  Eigen::Index best = 0;
  double best_score = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double score = cov(j, target) / (1.0 + cov(j, j)) * delta(j);
    const bool better = objective == CompanionObjective::Raise ? score < best_score : score > best_score;
    if (j == 0 || better) {
      best = j;
      best_score = score;
    }
  }
  return best;
}

Bundle shifted_orthogonal(const Vector& delta, double intercept_gap, const Bundle& z) {
  require_finite(delta, "delta");
  require_finite(z, "z");
  if (z.size() != delta.size()) throw Error(ErrorCode::DimensionMismatch, "z dimension");
  const double dd = delta.squaredNorm();
  if (dd == 0.0) {
    if (intercept_gap != 0.0)
      throw Error(ErrorCode::ZeroBias, "delta is zero but the intercept gap is not; surprise is constant");
    return z;
  }
  if (std::abs(z.dot(delta)) > 1e-10) throw Error(ErrorCode::NotOrthogonal, "z is not orthogonal to delta");
  return -(intercept_gap / dd) * delta + z;
}

}  // namespace bundlelearn
