#pragma once

// Bundle constructions that steer learning given the estimation error
// delta = beta-hat - beta.

#include "bundlelearn/core.hpp"

#include <limits>
#include <optional>

namespace bundlelearn {

/// Unit-norm bundle with x'delta = 0.
///
/// Without an anchor the two largest-magnitude entries a < b of delta are
/// swapped and one is negated (x_a = delta_b, x_b = -delta_a), every other entry
/// is zero, and the sign rule is applied. With an anchor the result is the
/// anchor's projection onto the orthogonal complement of delta, with no sign flip.
Bundle orthogonal_bundle(const Vector& delta, const std::optional<Bundle>& anchor = std::nullopt,
                         Norm norm = Norm::L2);

/// Rescales x so its entries sum to one.
Bundle sum_normalized(const Bundle& x);

/// x_j / x_i that makes a two-good bundle orthogonal to (delta_i, delta_j).
double two_good_orthogonal(double delta_i, double delta_j);

struct JointIncreaseRegion {
  double lower;  // of x_j / x_i
  double upper;  // +inf when w_ij >= 0
  bool nonempty;
};

JointIncreaseRegion joint_increase_region(const Matrix& cov, Eigen::Index i, Eigen::Index j);

enum class CompanionObjective { Raise, Lower };

/// argmin (Raise) or argmax (Lower) over j of w_{j,target} / (1 + w_jj) * delta_j.
/// Ties go to the lowest index.
Eigen::Index companion_good(const Matrix& cov, const Vector& delta, Eigen::Index target, CompanionObjective objective);

/// No-learning bundle when the consumer uses alpha-hat = alpha + intercept_gap:
/// x = -(gap / |delta|^2) delta + z, with z orthogonal to delta.
Bundle shifted_orthogonal(const Vector& delta, double intercept_gap, const Bundle& z);

}  // namespace bundlelearn
