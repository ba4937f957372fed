#pragma once

// Pairwise-interaction designs and collinearity reduction.
//
// Augmented coordinates: the m primitive goods first, then one coordinate per
// pair (i, j) with i < j in lexicographic order.

#include "bundlelearn/core.hpp"

#include <utility>
#include <vector>

namespace bundlelearn {

struct AugmentedIndex {
  Eigen::Index m{0};
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  Eigen::Index total{0};

  explicit AugmentedIndex(Eigen::Index primitives);
  Eigen::Index pair_position(Eigen::Index i, Eigen::Index j) const;
};

Vector augment_bundle(const Vector& x_primitive);

/// Root in (0, 1) of h(x) = d_i x + d_j (1 - x) + d_ij x (1 - x).
double orthogonal_quadratic(double delta_i, double delta_j, double delta_ij);

struct PairHistorySpec {
  Eigen::VectorXi singles;      // s_i
  Eigen::MatrixXi pair_counts;  // c_ij, symmetric, zero diagonal
};

/// Augmented information matrix of a singleton-and-pair dummy history.
Matrix singleton_pair_info(const PairHistorySpec& spec);

/// Dummy design rows for the same history, singletons first then pairs.
Matrix singleton_pair_design(const PairHistorySpec& spec);

struct SparsityCheck {
  bool holds;
  double max_violation;  // largest |W_{(ij),h}| with h outside {i, j}
};

SparsityCheck verify_w_sparsity(const PairHistorySpec& spec, double tol = 1e-9);

/// Same check on an arbitrary augmented information matrix.
SparsityCheck verify_w_sparsity(const Matrix& augmented_info, Eigen::Index m, double tol = 1e-9);

struct CollinearityReduction {
  std::vector<Eigen::Index> kept;                    // original columns kept as-is
  std::vector<std::vector<Eigen::Index>> composites;  // merged classes, equal weights
  std::vector<Eigen::Index> dropped;                 // removed as linear combinations or zero
  Matrix projection;                                 // n x r, reduced = X * projection
  // For each reduced column, the original columns it averages.
  std::vector<std::vector<Eigen::Index>> members;
};

struct ReducedDesign {
  Matrix design;
  CollinearityReduction reduction;
};

ReducedDesign reduce_collinearity(const Matrix& X);

}  // namespace bundlelearn
