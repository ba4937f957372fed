#include "bundlelearn/estimator.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bundlelearn;

namespace {

// Each good alone once, then the three adjacent pairs of a four-good line.
History line_history(const Vector& beta, double alpha = 0.0) {
  History h(alpha);
  for (int i = 0; i < 4; ++i) h.append(Vector::Unit(4, i), alpha + beta(i));
  for (int i = 0; i < 3; ++i) {
    Vector x = Vector::Zero(4);
    x(i) = x(i + 1) = 1.0;
    h.append(x, alpha + x.dot(beta));
  }
  return h;
}

Matrix line_cov() {
  Matrix w(4, 4);
  w << 13, -5, 2, -1, -5, 10, -4, 2, 2, -4, 10, -5, -1, 2, -5, 13;
  return w / 21.0;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

PrecisionState state_from_design(const Matrix& X, const Vector& u) {
  History h;
  for (Eigen::Index r = 0; r < X.rows(); ++r) h.append(X.row(r).transpose(), u(r));
  return batch_ols(h);
}

}  // namespace

TEST_CASE("batch_ols on an orthonormal design returns the utilities") {
  History h;
  h.append(Vector::Unit(2, 0), 3.0);
  h.append(Vector::Unit(2, 1), 5.0);
  const auto s = batch_ols(h);
  CHECK(s.estimate(0) == doctest::Approx(3.0));
  CHECK(s.estimate(1) == doctest::Approx(5.0));
  CHECK(max_abs(s.cov - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(s.full_rank);
  CHECK(s.count == 2);
}

TEST_CASE("line history reproduces the published Z and W") {
  const auto s = batch_ols(line_history(Vector::Ones(4)));
  Matrix z(4, 4);
  z << 2, 1, 0, 0, 1, 3, 1, 0, 0, 1, 3, 1, 0, 0, 1, 2;
  CHECK(max_abs(s.info - z) == 0.0);
  CHECK(max_abs(s.cov - line_cov()) < 1e-12);
  CHECK(max_abs(s.estimate - Vector::Ones(4)) < 1e-12);
}

TEST_CASE("batch_ols subtracts the known intercept") {
  const Vector beta{{0.5, -1.0, 2.0, 0.25}};
  const auto s = batch_ols(line_history(beta, 7.0));
  CHECK(max_abs(s.estimate - beta) < 1e-12);
  CHECK(s.baseline == 7.0);
}

TEST_CASE("batch_ols rejects empty and collinear histories") {
  CHECK_THROWS_AS(batch_ols(History{}), Error);
  History h;
  for (int r = 0; r < 5; ++r) h.append(Vector{{double(r + 1), double(r + 1), double(r * r)}}, double(r));
  try {
    batch_ols(h);
    FAIL("expected RankDeficient");
  } catch (const RankDeficientError& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
    CHECK(e.rank() == 2);
  }
}

TEST_CASE("history validates dimensions and finiteness") {
  History h;
  h.append(Vector::Ones(3), 1.0);
  CHECK_THROWS_AS(h.append(Vector::Ones(2), 1.0), Error);
  Vector bad = Vector::Ones(3);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(h.append(bad, 1.0), Error);
}

TEST_CASE("batch_ols agrees with the Gauss-Jordan oracle") {
  std::mt19937_64 g(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index n = 1 + rep % 6;
    const Matrix X = oracle::random_design(g, n + 5, n);
    const Vector u = oracle::gaussian_vector(g, X.rows(), 3.0);
    const auto s = state_from_design(X, u);
    CHECK(max_abs(s.estimate - oracle::ols(X, u)) < 1e-9);
    CHECK(max_abs(s.cov - oracle::inverse(oracle::gram(X))) < 1e-9);
  }
}

TEST_CASE("gain for good 1 on the line state matches the published weights") {
  const auto s = batch_ols(line_history(Vector::Ones(4)));
  const Vector w = gain(s.cov, Vector::Unit(4, 0));
  const Vector exact = Vector{{13.0, -5.0, 2.0, -1.0}} / 34.0;
  CHECK(max_abs(w - exact) < 1e-12);
  const Vector published{{0.382, -0.147, 0.059, -0.029}};
  for (int i = 0; i < 4; ++i) CHECK(std::round(w(i) * 1000.0) / 1000.0 == doctest::Approx(published(i)).epsilon(1e-12));

  // A unit surprise moves each estimate by exactly its gain.
  const auto r = recursive_update(s, Vector::Unit(4, 0), 2.0);
  CHECK(r.surprise == doctest::Approx(1.0));
  CHECK(max_abs(r.new_state.estimate - (Vector::Ones(4) + exact)) < 1e-12);
}

TEST_CASE("zero surprise leaves the estimate fixed but grows info") {
  std::mt19937_64 g(3);
  const Matrix X = oracle::random_design(g, 8, 4);
  const auto s = state_from_design(X, oracle::gaussian_vector(g, 8));
  const Vector x = oracle::gaussian_vector(g, 4);
  const auto r = recursive_update(s, x, s.baseline + x.dot(s.estimate));
  CHECK(r.surprise == 0.0);
  CHECK(max_abs(r.new_state.estimate - s.estimate) == 0.0);
  CHECK(max_abs(r.new_state.info - (s.info + x * x.transpose())) < 1e-12);
  CHECK(r.new_state.count == s.count + 1);
}

TEST_CASE("recursive step on a random 5-good history equals batch on the extension") {
  std::mt19937_64 g(5);
  const Matrix X = oracle::random_design(g, 9, 5);
  const Vector u = oracle::gaussian_vector(g, 9);
  const auto s = state_from_design(X.topRows(8), u.head(8));
  const auto r = recursive_update(s, Vector(X.row(8).transpose()), u(8));
  CHECK(max_abs(r.new_state.estimate - oracle::ols(X, u)) < 1e-10);
  CHECK(max_abs(r.gain - s.cov * X.row(8).transpose() / (1.0 + X.row(8).dot(s.cov * X.row(8).transpose()))) < 1e-10);
}

TEST_CASE("property: folding recursive updates equals batch OLS (n <= 8, t <= 50)") {
  std::mt19937_64 g(2024);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(g() % 8);
    const Eigen::Index t = n + static_cast<Eigen::Index>(g() % static_cast<std::uint64_t>(51 - n));
    const Matrix X = oracle::random_design(g, t, n);
    const Vector u = oracle::gaussian_vector(g, t, 2.0);
    auto s = state_from_design(X.topRows(n), u.head(n));
    for (Eigen::Index r = n; r < t; ++r) s = recursive_update(s, Vector(X.row(r).transpose()), u(r)).new_state;
    worst = std::max(worst, max_abs(s.estimate - oracle::ols(X, u)));
    CHECK(s.count == t);
    CHECK((s.info * s.cov - Matrix::Identity(n, n)).norm() < 1e-9);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("periodic re-inversion keeps W consistent over long horizons") {
  std::mt19937_64 g(8);
  const Eigen::Index n = 3;
  auto s = init_ridge(n, 1e8, Vector::Zero(n));
  for (int t = 0; t < 600; ++t) {
    const Vector x = oracle::gaussian_vector(g, n);
    s = recursive_update(s, x, x.sum()).new_state;
    CHECK(s.since_reinvert < kReinvertEvery);
  }
  CHECK((s.info * s.cov - Matrix::Identity(n, n)).norm() < 1e-9);
  CHECK(max_abs(s.estimate - Vector::Ones(n)) < 1e-6);
}

TEST_CASE("recursive_update preconditions") {
  PrecisionState s;
  s.info = Matrix::Zero(2, 2);
  s.cov = Matrix::Zero(2, 2);
  s.estimate = Vector::Zero(2);
  CHECK_THROWS_AS(recursive_update(s, Vector::Ones(2), 1.0), Error);
  const auto r = init_ridge(2, 10.0, Vector::Zero(2));
  CHECK_THROWS_AS(recursive_update(r, Vector::Ones(3), 1.0), Error);
  try {
    recursive_update(s, Vector::Ones(2), 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StateNotFullRank);
  }
}

TEST_CASE("predict_utility") {
  auto s = batch_ols(line_history(Vector::Ones(4)));
  auto p = predict_utility(s, Vector::Zero(4), 1.0);
  CHECK(p.mean == 0.0);
  CHECK(p.variance == 0.0);
  p = predict_utility(s, Vector::Unit(4, 0), 1.0);
  CHECK(p.mean == doctest::Approx(1.0));
  CHECK(p.variance == doctest::Approx(13.0 / 21.0).epsilon(1e-12));

  const auto id = init_prior(Matrix(Matrix::Identity(2, 2)), Vector(Vector::Zero(2)), 4.0);
  p = predict_utility(id, Vector::Ones(2), 1.0);
  CHECK(p.mean == 4.0);
  CHECK(p.variance == doctest::Approx(2.0));
}

TEST_CASE("predicted variance equals sigma2 x'Wx") {
  const auto s = batch_ols(line_history(Vector::Ones(4)));
  const Vector x{{1.0, 0.5, 0.0, -1.0}};
  const auto r = recursive_update(s, x, 0.0, 2.5);
  CHECK(r.predicted_variance == doctest::Approx(2.5 * x.dot(line_cov() * x)).epsilon(1e-12));
}

TEST_CASE("estimation_error") {
  PrecisionState s = init_ridge(2, 1e8, Vector{{0.9, 1.2}});
  auto e = estimation_error(s, Vector{{1.0, 1.0}});
  CHECK(e.delta(0) == doctest::Approx(-0.1));
  CHECK(e.delta(1) == doctest::Approx(0.2));
  CHECK(e.mse == doctest::Approx(0.05).epsilon(1e-12));

  s = init_ridge(4, 1.0, Vector::Ones(4));
  CHECK(estimation_error(s, Vector::Ones(4)).mse == 0.0);
  s.estimate = Vector::Ones(4) + Vector::Constant(4, 0.3);
  CHECK(estimation_error(s, Vector::Ones(4)).mse == doctest::Approx(0.36).epsilon(1e-12));
  CHECK_THROWS_AS(estimation_error(s, Vector::Ones(3)), Error);
}

TEST_CASE("mse_lower_bound") {
  CHECK(mse_lower_bound(4, 2, 1.0) == 1.0);
  CHECK(mse_lower_bound(7, 1, 2.0) == doctest::Approx(2.0 / 7.0));
  CHECK_THROWS_AS(mse_lower_bound(1, 2, 1.0), Error);
  CHECK_THROWS_AS(mse_lower_bound(3, 0, 1.0), Error);

  // Equal-frequency singletons: Z = 2I, so sigma2 tr W = 1 = bound.
  History h;
  for (int rep = 0; rep < 2; ++rep)
    for (int i = 0; i < 2; ++i) h.append(Vector::Unit(2, i), 0.0);
  CHECK(batch_ols(h).cov.trace() == doctest::Approx(mse_lower_bound(4, 2, 1.0)));
}

TEST_CASE("init_ridge") {
  const auto s = init_ridge(2, 1e6, Vector::Zero(2));
  CHECK(max_abs(s.cov - 1e6 * Matrix::Identity(2, 2)) == 0.0);
  CHECK(max_abs(s.info - 1e-6 * Matrix::Identity(2, 2)) == 0.0);
  CHECK(s.count == 0);
  CHECK(s.full_rank);
  CHECK_THROWS_AS(init_ridge(2, 0.0, Vector::Zero(2)), Error);
  CHECK_THROWS_AS(init_ridge(2, 1.0, Vector::Zero(3)), Error);
  const auto f = init_ridge(2, 1e8, Vector{{0.9, 1.2}});
  CHECK(f.estimate(0) == 0.9);
  CHECK(f.estimate(1) == 1.2);
}

TEST_CASE("ridge start converges to OLS at rho = 1e8") {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 2 + rep % 4;
    const Matrix X = oracle::random_design(g, 3 * n, n);
    const Vector u = oracle::gaussian_vector(g, X.rows());
    auto s = init_ridge(n, 1e8, oracle::gaussian_vector(g, n));
    for (Eigen::Index r = 0; r < X.rows(); ++r) s = recursive_update(s, Vector(X.row(r).transpose()), u(r)).new_state;
    CHECK(max_abs(s.estimate - oracle::ols(X, u)) < 1e-4);
  }
}

TEST_CASE("init_prior rejects a singular precision") {
  Matrix z = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(init_prior(z, Vector(Vector::Zero(2))), Error);
  const auto s = init_prior(Matrix(2.0 * Matrix::Identity(2, 2)), Vector(Vector::Ones(2)));
  CHECK(max_abs(s.cov - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("property: info eigenvalues never decrease") {
  std::mt19937_64 g(99);
  auto s = init_ridge(4, 1e3, Vector::Zero(4));
  auto prev = oracle::jacobi(s.info).values;
  for (int t = 0; t < 40; ++t) {
    s = recursive_update(s, oracle::gaussian_vector(g, 4), 0.0).new_state;
    const auto cur = oracle::jacobi(s.info).values;
    for (std::size_t k = 0; k < cur.size(); ++k) CHECK(cur[k] >= prev[k] - 1e-9 * (1.0 + cur.back()));
    prev = cur;
  }
}

TEST_CASE("expected_update is the noiseless step") {
  std::mt19937_64 g(4);
  const Matrix X = oracle::random_design(g, 6, 3);
  const auto s = state_from_design(X, oracle::gaussian_vector(g, 6));
  const Vector beta = oracle::gaussian_vector(g, 3);
  const Vector x = oracle::gaussian_vector(g, 3);
  const auto r = recursive_update(s, x, x.dot(beta));
  CHECK(max_abs(r.new_state.estimate - s.estimate - expected_update(s, x, beta)) < 1e-12);
}

TEST_CASE("Monte-Carlo: unbiasedness and the sigma2 W variance law") {
  std::mt19937_64 g(123);
  const Matrix X = oracle::random_design(g, 6, 3);
  const Vector beta{{1.0, -0.5, 2.0}};
  const double sigma2 = 0.49;
  const Matrix W = oracle::inverse(oracle::gram(X));
  std::normal_distribution<double> eps(0.0, std::sqrt(sigma2));
  const int draws = 10000;
  Vector mean = Vector::Zero(3);
  Matrix second = Matrix::Zero(3, 3);
  for (int d = 0; d < draws; ++d) {
    Vector u = X * beta;
    for (Eigen::Index r = 0; r < u.size(); ++r) u(r) += eps(g);
    const Vector b = state_from_design(X, u).estimate;
    mean += b;
    second += (b - beta) * (b - beta).transpose();
  }
  mean /= draws;
  second /= draws;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean(i) - beta(i)) < 4.0 * std::sqrt(sigma2 * W(i, i) / draws));
  CHECK((second - sigma2 * W).norm() / (sigma2 * W).norm() < 0.10);
}

TEST_CASE("estimated intercept matches OLS on the augmented design") {
  std::mt19937_64 g(61);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 1 + rep % 4;
    const Matrix X = oracle::random_design(g, n + 6, n);
    const Vector u = oracle::gaussian_vector(g, X.rows()).array() + 3.0;
    History h;
    for (Eigen::Index r = 0; r < X.rows(); ++r) h.append(X.row(r).transpose(), u(r));
    const auto fit = batch_ols_estimated_intercept(h);
    const auto [a, b] = oracle::ols_with_intercept(X, u);
    CHECK(fit.intercept == doctest::Approx(a).epsilon(1e-9));
    CHECK(max_abs(fit.slopes - b) < 1e-9);
  }
  History one;
  one.append(Vector::Ones(2), 1.0);
  CHECK_THROWS_AS(batch_ols_estimated_intercept(one), Error);
}

TEST_CASE("templated core works in long double and float") {
  BasicHistory<long double> h;
  using LV = VectorX<long double>;
  h.append(LV::Unit(2, 0), 3.0L);
  h.append(LV::Unit(2, 1), 5.0L);
  h.append(LV::Ones(2), 8.0L);
  const auto s = batch_ols(h);
  CHECK(static_cast<double>(s.estimate(0)) == doctest::Approx(3.0));
  auto f = init_ridge(2, 1e4f, VectorX<float>(VectorX<float>::Zero(2)));
  f = recursive_update(f, VectorX<float>(VectorX<float>::Unit(2, 0)), 2.0f).new_state;
  CHECK(f.estimate(0) == doctest::Approx(2.0).epsilon(1e-3));
}
