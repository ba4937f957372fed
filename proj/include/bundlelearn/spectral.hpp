#pragma once

// Eigen-analysis of the information matrix Z.
//
// Eigenvectors are made deterministic in two steps. Eigenvalues within
// kClusterTolerance * lambda_1 of each other form a cluster whose basis is
// rebuilt by projecting e_1, e_2, ... into the eigenspace and orthonormalizing
// in index order. Every vector is then sign-normalized (largest entry positive).

#include "bundlelearn/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace bundlelearn {

template <typename Scalar>
struct BasicSpectralSummary {
  VectorX<Scalar> eigenvalues;   // descending
  MatrixX<Scalar> eigenvectors;  // column i pairs with eigenvalues(i)
  Scalar kappa{1};
  VectorX<Scalar> vN;
  VectorX<Scalar> vC;
  // [first, last) column ranges of eigenvalue clusters, in descending order.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;

  Eigen::Index dimension() const { return eigenvalues.size(); }
  Scalar lambda_max() const { return eigenvalues(0); }
  Scalar lambda_min() const { return eigenvalues(eigenvalues.size() - 1); }
};

using SpectralSummary = BasicSpectralSummary<double>;

enum class ShiftDirection { PopularityBiased, CorrelationBreaking };

template <typename Scalar>
struct KappaPrediction {
  Scalar kappa_next;
  Scalar new_min;
  Scalar new_max;
};

struct CorrelationPartition {
  std::vector<Eigen::Index> side_positive;
  std::vector<Eigen::Index> side_negative;
  std::vector<Eigen::Index> zero_entries;
};

struct CentralityEntry {
  Eigen::Index good;
  double vn;
  double vc;
};

namespace detail {

template <typename Scalar>
void check_symmetric(const MatrixX<Scalar>& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NotSymmetric, "matrix is not square");
  if (m.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty matrix");
  if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  const Scalar scale = std::max(Scalar{1}, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-9) * scale)
    throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric within 1e-9");
}

// Orthonormal basis of span(Q) built from projected unit vectors, lowest index first.
template <typename Scalar>
MatrixX<Scalar> canonical_basis(const MatrixX<Scalar>& Q) {
  const Eigen::Index n = Q.rows();
  const Eigen::Index k = Q.cols();
  MatrixX<Scalar> basis(n, k);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < n && found < k; ++i) {
    VectorX<Scalar> v = Q * Q.row(i).transpose();  // projection of e_i
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < found; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const Scalar len = v.norm();
    if (len > Scalar(1e-6)) basis.col(found++) = v / len;
  }
  return basis;  // found == k because Q has rank k and e_1..e_n spans R^n
}

}  // namespace detail

/// With require_definite = false a PSD matrix is accepted and kappa may be
/// infinite; strategies use this to keep steering a nearly singular Z.
template <typename Derived>
BasicSpectralSummary<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& info_in,
                                                         bool require_definite = true) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> info = info_in;
  detail::check_symmetric(info);
  const Eigen::Index n = info.rows();

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig((info + info.transpose()) / Scalar(2));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "eigensolver did not converge");

  BasicSpectralSummary<Scalar> s;
  s.eigenvalues = eig.eigenvalues().reverse();
  s.eigenvectors = eig.eigenvectors().rowwise().reverse();

  const Scalar top = s.eigenvalues(0);
  const Scalar bottom = s.eigenvalues(n - 1);
  if (!(top > Scalar{0}) || (require_definite && !(bottom > Scalar(kRankTolerance) * top)))
    throw Error(ErrorCode::NotPositiveDefinite, "smallest eigenvalue is not positive");

  const Scalar gap = Scalar(kClusterTolerance) * top;
  Eigen::Index first = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || s.eigenvalues(i - 1) - s.eigenvalues(i) >= gap) {
      const Eigen::Index len = i - first;
      if (len > 1) {
        const MatrixX<Scalar> Q = s.eigenvectors.middleCols(first, len);
        s.eigenvectors.middleCols(first, len) = detail::canonical_basis(Q);
      }
      s.clusters.emplace_back(first, i);
      first = i;
    }
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    auto col = s.eigenvectors.col(c);
    normalize_sign(col);
  }

  s.kappa = bottom > Scalar{0} ? top / bottom : std::numeric_limits<Scalar>::infinity();
  s.vN = s.eigenvectors.col(0);
  s.vC = s.eigenvectors.col(s.clusters.back().first);
  return s;
}

template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& info) {
  return decompose(info).kappa;
}

/// Extreme eigenvalues after absorbing vN or vC once. Absorbing an eigenvector
/// raises its eigenvalue by exactly 1 and leaves the rest of the spectrum alone.
template <typename Scalar>
KappaPrediction<Scalar> predict_kappa_after(const BasicSpectralSummary<Scalar>& s, ShiftDirection which) {
  const Eigen::Index n = s.dimension();
  const Scalar lmax = s.lambda_max();
  const Scalar lmin = s.lambda_min();
  KappaPrediction<Scalar> p{};
  if (n == 1) {
    p.new_max = p.new_min = lmax + Scalar{1};
  } else if (which == ShiftDirection::PopularityBiased) {
    p.new_max = lmax + Scalar{1};
    p.new_min = lmin;
  } else {
    // vC sits at the first column of the bottom cluster, so the next-smallest
    // eigenvalue is the one just above it in the sorted list.
    const Scalar next = s.eigenvalues(n - 2);
    p.new_min = std::min(lmin + Scalar{1}, next);
    p.new_max = std::max(lmax, lmin + Scalar{1});
  }
  p.kappa_next = p.new_max / p.new_min;
  return p;
}

template <typename Scalar>
CorrelationPartition partition_by_correlation(const BasicSpectralSummary<Scalar>& s, Scalar tol = Scalar(1e-9)) {
  CorrelationPartition part;
  for (Eigen::Index i = 0; i < s.vC.size(); ++i) {
    const Scalar v = s.vC(i);
    if (std::abs(v) < tol)
      part.zero_entries.push_back(i);
    else if (v > Scalar{0})
      part.side_positive.push_back(i);
    else
      part.side_negative.push_back(i);
  }
  return part;
}

/// Goods ranked by eigenvector centrality. Entries equal to within 1e-12 tie and
/// keep index order.
template <typename Scalar>
std::vector<CentralityEntry> centrality_report(const BasicSpectralSummary<Scalar>& s) {
  std::vector<CentralityEntry> out;
  out.reserve(static_cast<std::size_t>(s.dimension()));
  for (Eigen::Index i = 0; i < s.dimension(); ++i)
    out.push_back({i, static_cast<double>(s.vN(i)) + 0.0, static_cast<double>(s.vC(i)) + 0.0});  // no -0
  std::stable_sort(out.begin(), out.end(), [](const CentralityEntry& a, const CentralityEntry& b) {
    return std::llround(a.vn * 1e12) > std::llround(b.vn * 1e12);
  });
  return out;
}

template <typename Derived>
std::vector<CentralityEntry> centrality_report(const Eigen::MatrixBase<Derived>& info) {
  return centrality_report(decompose(info));
}

}  // namespace bundlelearn
