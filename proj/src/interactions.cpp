#include "bundlelearn/interactions.hpp"

#include "bundlelearn/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace bundlelearn {

AugmentedIndex::AugmentedIndex(Eigen::Index primitives) : m(primitives) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "augmented index needs m >= 1");
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  total = m + static_cast<Eigen::Index>(pairs.size());
}

Eigen::Index AugmentedIndex::pair_position(Eigen::Index i, Eigen::Index j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= m || i == j) throw Error(ErrorCode::InvalidArgument, "invalid pair");
  // Pairs starting at row r contribute (m - 1 - r) entries each.
  return m + i * (2 * m - i - 1) / 2 + (j - i - 1);
}

Vector augment_bundle(const Vector& x) {
  if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "bundle has non-finite entries");
  const AugmentedIndex idx(x.size());
  Vector out(idx.total);
  out.head(idx.m) = x;
  Eigen::Index k = idx.m;
  for (const auto& [i, j] : idx.pairs) out(k++) = x(i) * x(j);
  return out;
}

double orthogonal_quadratic(double di, double dj, double dij) {
  if (!(di > 0.0) || !(dj < 0.0)) throw Error(ErrorCode::SignViolation, "need delta_i > 0 > delta_j");
  if (dij == 0.0) throw Error(ErrorCode::DegenerateInteraction, "delta_ij is zero; use the two-good ratio");
  if (!std::isfinite(di) || !std::isfinite(dj) || !std::isfinite(dij))
    throw Error(ErrorCode::InvalidArgument, "non-finite input");

  const auto h = [&](double x) { return di * x + dj * (1.0 - x) + dij * x * (1.0 - x); };
  const auto dh = [&](double x) { return di - dj + dij * (1.0 - 2.0 * x); };

  // -dij x^2 + (di + dij - dj) x + dj = 0, solved without cancellation.
  const double a = -dij;
  const double b = di + dij - dj;
  const double c = dj;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));

  double root = -1.0;
  for (double r : {q / a, q != 0.0 ? c / q : -1.0})
    if (r > 0.0 && r < 1.0 && (root < 0.0 || std::abs(h(r)) < std::abs(h(root)))) root = r;

  if (root < 0.0) {
    // h(0) < 0 < h(1) always brackets the root.
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < 0.0 ? lo : hi) = mid;
      if (mid == lo && mid == hi) break;
    }
    root = 0.5 * (lo + hi);
  }

  const double slope = dh(root);
  if (slope != 0.0) {
    const double polished = root - h(root) / slope;
    if (polished > 0.0 && polished < 1.0 && std::abs(h(polished)) < std::abs(h(root))) root = polished;
  }
  return root;
}

namespace {

void validate(const PairHistorySpec& spec) {
  const Eigen::Index m = spec.singles.size();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "pair history needs m >= 1");
  if (spec.pair_counts.rows() != m || spec.pair_counts.cols() != m)
    throw Error(ErrorCode::DimensionMismatch, "pair_counts must be m x m");
  if ((spec.singles.array() < 0).any() || (spec.pair_counts.array() < 0).any())
    throw Error(ErrorCode::InvalidArgument, "counts must be nonnegative");
  if (spec.pair_counts != spec.pair_counts.transpose()) throw Error(ErrorCode::NotSymmetric, "pair_counts");
  if ((spec.pair_counts.diagonal().array() != 0).any())
    throw Error(ErrorCode::InvalidArgument, "pair_counts diagonal must be zero");
}

}  // namespace

Matrix singleton_pair_info(const PairHistorySpec& spec) {
  validate(spec);
  const AugmentedIndex idx(spec.singles.size());
  Matrix Z = Matrix::Zero(idx.total, idx.total);
  for (Eigen::Index i = 0; i < idx.m; ++i) Z(i, i) = spec.singles(i);
  for (const auto& [i, j] : idx.pairs) {
    const double c = spec.pair_counts(i, j);
    const Eigen::Index p = idx.pair_position(i, j);
    Z(i, i) += c;
    Z(j, j) += c;
    Z(i, j) = Z(j, i) = c;
    Z(p, p) = c;
    Z(p, i) = Z(i, p) = c;
    Z(p, j) = Z(j, p) = c;
  }
  return Z;
}

Matrix singleton_pair_design(const PairHistorySpec& spec) {
  validate(spec);
  const Eigen::Index m = spec.singles.size();
  std::vector<Vector> rows;
  for (Eigen::Index i = 0; i < m; ++i)
    for (int k = 0; k < spec.singles(i); ++k) rows.push_back(augment_bundle(Vector::Unit(m, i)));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      for (int k = 0; k < spec.pair_counts(i, j); ++k)
        rows.push_back(augment_bundle(Vector::Unit(m, i) + Vector::Unit(m, j)));
  const AugmentedIndex idx(m);
  Matrix X(static_cast<Eigen::Index>(rows.size()), idx.total);
  for (std::size_t r = 0; r < rows.size(); ++r) X.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return X;
}

SparsityCheck verify_w_sparsity(const Matrix& Z, Eigen::Index m, double tol) {
  const AugmentedIndex idx(m);
  if (Z.rows() != idx.total || Z.cols() != idx.total)
    throw Error(ErrorCode::DimensionMismatch, "augmented info has wrong size");
  if (!is_full_rank(Z)) throw Error(ErrorCode::SingularAugmentedZ, "augmented information matrix is singular");
  const Matrix W = Z.ldlt().solve(Matrix::Identity(idx.total, idx.total));
  double worst = 0.0;
  for (const auto& [i, j] : idx.pairs) {
    const Eigen::Index p = idx.pair_position(i, j);
    for (Eigen::Index h = 0; h < m; ++h)
      if (h != i && h != j) worst = std::max(worst, std::abs(W(p, h)));
  }
  return {worst < tol, worst};
}

SparsityCheck verify_w_sparsity(const PairHistorySpec& spec, double tol) {
  return verify_w_sparsity(singleton_pair_info(spec), spec.singles.size(), tol);
}

ReducedDesign reduce_collinearity(const Matrix& X) {
  if (X.rows() == 0 || X.cols() == 0) throw Error(ErrorCode::InvalidArgument, "reduce_collinearity: empty design");
  const Eigen::Index n = X.cols();
  const double col_scale = X.colwise().norm().maxCoeff();

  // Pass 1: classes of positively proportional columns. Zero columns are dropped.
  std::vector<std::vector<Eigen::Index>> classes;
  std::vector<Eigen::Index> dropped;
  std::vector<Vector> directions;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double len = X.col(k).norm();
    if (!(len > 1e-10 * col_scale)) {
      dropped.push_back(k);
      continue;
    }
    const Vector dir = X.col(k) / len;
    bool merged = false;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if ((dir - directions[c]).lpNorm<Eigen::Infinity>() <= 1e-10) {
        classes[c].push_back(k);
        merged = true;
        break;
      }
    }
    if (!merged) {
      classes.push_back({k});
      directions.push_back(dir);
    }
  }

  Matrix P_all = Matrix::Zero(n, static_cast<Eigen::Index>(classes.size()));
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (Eigen::Index k : classes[c])
      P_all(k, static_cast<Eigen::Index>(c)) = 1.0 / static_cast<double>(classes[c].size());
  const Matrix candidates = X * P_all;

  // Pass 2: greedy, index-ordered removal of columns spanned by earlier ones. The
  // test matches batch_ols's, so the reduced Gram matrix always passes it.
  const Matrix gram_all = candidates.transpose() * candidates;
  const double scale = classes.empty() ? 0.0 : Eigen::SelfAdjointEigenSolver<Matrix>(gram_all, Eigen::EigenvaluesOnly)
                                                   .eigenvalues()
                                                   .maxCoeff();
  std::vector<Eigen::Index> accepted;
  for (Eigen::Index c = 0; c < candidates.cols(); ++c) {
    std::vector<Eigen::Index> trial = accepted;
    trial.push_back(c);
    Matrix G(static_cast<Eigen::Index>(trial.size()), static_cast<Eigen::Index>(trial.size()));
    for (std::size_t a = 0; a < trial.size(); ++a)
      for (std::size_t b = 0; b < trial.size(); ++b)
        G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = gram_all(trial[a], trial[b]);
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(G, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lmin > kRankTolerance * scale)
      accepted.push_back(c);
    else
      for (Eigen::Index k : classes[static_cast<std::size_t>(c)]) dropped.push_back(k);
  }
  std::sort(dropped.begin(), dropped.end());

  ReducedDesign out;
  auto& red = out.reduction;
  red.dropped = dropped;
  red.projection.resize(n, static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t r = 0; r < accepted.size(); ++r) {
    const auto& members = classes[static_cast<std::size_t>(accepted[r])];
    red.projection.col(static_cast<Eigen::Index>(r)) = P_all.col(accepted[r]);
    red.members.push_back(members);
    if (members.size() == 1)
      red.kept.push_back(members.front());
    else
      red.composites.push_back(members);
  }
  out.design = X * red.projection;
  return out;
}

}  // namespace bundlelearn
