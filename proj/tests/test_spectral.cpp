#include "bundlelearn/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace bundlelearn;

namespace {

Matrix line_z() {
  Matrix z(4, 4);
  z << 2, 1, 0, 0, 1, 3, 1, 0, 0, 1, 3, 1, 0, 0, 1, 2;
  return z;
}

const double kSqrt2 = std::sqrt(2.0);

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// Distance between unit vectors modulo sign.
double direction_gap(const Vector& a, const Vector& b) {
  return std::min((a.normalized() - b.normalized()).norm(), (a.normalized() + b.normalized()).norm());
}

Matrix random_spd(std::mt19937_64& g, Eigen::Index n) {
  Vector ev(n);
  for (Eigen::Index k = 0; k < n; ++k) ev(k) = oracle::uniform(g, 0.5, 20.0);
  return oracle::spd_with_spectrum(g, ev);
}

}  // namespace

TEST_CASE("line network spectrum matches the published values") {
  const auto s = decompose(line_z());
  CHECK(std::abs(s.lambda_max() - (3.0 + kSqrt2)) < 1e-10);
  CHECK(std::abs(s.lambda_min() - 1.0) < 1e-10);
  CHECK(direction_gap(s.vN, Vector{{1.0, 1.0 + kSqrt2, 1.0 + kSqrt2, 1.0}}) < 1e-8);
  CHECK(direction_gap(s.vC, Vector{{-1.0, 1.0, -1.0, 1.0}}) < 1e-8);
  // Sign rule: all |entries| of vC tie, so index 0 decides.
  CHECK(s.vC(0) > 0.0);
  CHECK(s.vN.minCoeff() > 0.0);
  CHECK(condition_number(line_z()) == doctest::Approx(3.0 + kSqrt2).epsilon(1e-12));
}

TEST_CASE("eigenpairs agree with the Jacobi oracle") {
  const auto s = decompose(line_z());
  const auto j = oracle::jacobi(line_z());
  for (int k = 0; k < 4; ++k) {
    CHECK(s.eigenvalues(3 - k) == doctest::Approx(j.values[static_cast<std::size_t>(k)]).epsilon(1e-12));
    CHECK(direction_gap(s.eigenvectors.col(3 - k), j.vectors.col(k)) < 1e-8);
  }
}

TEST_CASE("identity and diagonal matrices") {
  const auto s = decompose(Matrix(Matrix::Identity(3, 3)));
  CHECK(s.kappa == 1.0);
  CHECK(max_abs(s.eigenvectors - Matrix::Identity(3, 3)) < 1e-12);
  CHECK(s.clusters.size() == 1);
  CHECK(max_abs(s.vN - Vector::Unit(3, 0)) < 1e-12);
  CHECK(max_abs(s.vC - Vector::Unit(3, 0)) < 1e-12);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 4.0, 1.0;
  CHECK(condition_number(d) == 4.0);
}

TEST_CASE("decompose rejects bad input") {
  Matrix asym = line_z();
  asym(0, 1) += 1e-6;
  CHECK_THROWS_AS(decompose(asym), Error);
  try {
    decompose(asym);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSymmetric);
  }
  try {
    decompose(Matrix(Matrix::Ones(2, 2)));
    FAIL("singular accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(decompose(neg), Error);
  // PSD is accepted in relaxed mode, with infinite kappa.
  const auto relaxed = decompose(Matrix(Matrix::Ones(2, 2)), false);
  CHECK(std::isinf(relaxed.kappa));
}

TEST_CASE("property: random SPD reconstruction, orthonormality, eigen equation, determinism") {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index n = 1 + rep % 6;
    const Matrix z = random_spd(g, n);
    const auto s = decompose(z);
    const Matrix recon = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    CHECK((recon - z).norm() < 1e-8);
    CHECK(max_abs(s.eigenvectors.transpose() * s.eigenvectors - Matrix::Identity(n, n)) < 1e-10);
    for (Eigen::Index k = 0; k < n; ++k)
      CHECK((z * s.eigenvectors.col(k) - s.eigenvalues(k) * s.eigenvectors.col(k)).norm() < 1e-8);
    CHECK(s.kappa >= 1.0);
    CHECK(std::abs(s.vN.norm() - 1.0) < 1e-12);
    CHECK(std::abs(s.vC.norm() - 1.0) < 1e-12);
    for (Eigen::Index k = 1; k < n; ++k) CHECK(s.eigenvalues(k - 1) >= s.eigenvalues(k));
    const auto again = decompose(z);
    CHECK(std::memcmp(again.eigenvectors.data(), s.eigenvectors.data(), sizeof(double) * n * n) == 0);
    CHECK(std::memcmp(again.eigenvalues.data(), s.eigenvalues.data(), sizeof(double) * n) == 0);
  }
}

TEST_CASE("sign rule: largest magnitude entry positive, ties to lowest index") {
  std::mt19937_64 g(70);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = decompose(random_spd(g, 5));
    for (Eigen::Index c = 0; c < 5; ++c) {
      const Vector v = s.eigenvectors.col(c);
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      CHECK(v(arg) > 0.0);
    }
  }
}

TEST_CASE("predict_kappa_after") {
  const auto s = decompose(line_z());
  auto p = predict_kappa_after(s, ShiftDirection::PopularityBiased);
  CHECK(p.kappa_next == doctest::Approx(4.0 + kSqrt2).epsilon(1e-12));
  CHECK(p.new_max == doctest::Approx(4.0 + kSqrt2).epsilon(1e-12));
  CHECK(p.new_min == doctest::Approx(1.0).epsilon(1e-12));

  p = predict_kappa_after(s, ShiftDirection::CorrelationBreaking);
  CHECK(p.new_min == doctest::Approx(3.0 - kSqrt2).epsilon(1e-12));
  CHECK(p.kappa_next == doctest::Approx((3.0 + kSqrt2) / (3.0 - kSqrt2)).epsilon(1e-12));
  CHECK(p.kappa_next == doctest::Approx(2.784).epsilon(1e-3));

  // Brute force: eigenvalues of Z + vC vC'.
  const auto after = oracle::jacobi(Matrix(line_z() + s.vC * s.vC.transpose()));
  CHECK(after.values.front() == doctest::Approx(p.new_min).epsilon(1e-10));
  CHECK(after.values.back() / after.values.front() == doctest::Approx(p.kappa_next).epsilon(1e-10));
}

TEST_CASE("predict_kappa_after on the identity follows the eigen-shift rule") {
  const auto s = decompose(Matrix(Matrix::Identity(3, 3)));
  const auto p = predict_kappa_after(s, ShiftDirection::CorrelationBreaking);
  const auto brute = oracle::jacobi(Matrix(Matrix::Identity(3, 3) + s.vC * s.vC.transpose()));
  CHECK(p.new_min == 1.0);
  CHECK(p.new_max == 2.0);
  CHECK(p.kappa_next == doctest::Approx(brute.values.back() / brute.values.front()));
  const auto one = predict_kappa_after(decompose(Matrix(Matrix::Constant(1, 1, 3.0))), ShiftDirection::CorrelationBreaking);
  CHECK(one.kappa_next == 1.0);
  CHECK(one.new_min == 4.0);
}

TEST_CASE("property: eigen-shift exactness for vN and vC") {
  std::mt19937_64 g(12);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index n = 2 + rep % 5;
    const Matrix z = random_spd(g, n);
    const auto s = decompose(z);
    const auto up = oracle::jacobi(Matrix(z + s.vN * s.vN.transpose()));
    const auto down = oracle::jacobi(Matrix(z + s.vC * s.vC.transpose()));
    std::vector<double> expect_up, expect_down;
    for (Eigen::Index k = 0; k < n; ++k) {
      expect_up.push_back(s.eigenvalues(k) + (k == 0 ? 1.0 : 0.0));
      expect_down.push_back(s.eigenvalues(k) + (k == n - 1 ? 1.0 : 0.0));
    }
    std::sort(expect_up.begin(), expect_up.end());
    std::sort(expect_down.begin(), expect_down.end());
    for (std::size_t k = 0; k < expect_up.size(); ++k) {
      CHECK(std::abs(up.values[k] - expect_up[k]) < 1e-8);
      CHECK(std::abs(down.values[k] - expect_down[k]) < 1e-8);
    }
  }
}

TEST_CASE("property: repeated vN absorption strictly raises kappa") {
  std::mt19937_64 g(13);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix z = random_spd(g, 4);
    double kappa = decompose(z).kappa;
    for (int t = 0; t < 20; ++t) {
      const auto s = decompose(z);
      z += s.vN * s.vN.transpose();
      const double next = decompose(z).kappa;
      CHECK(next > kappa);
      kappa = next;
    }
  }
}

TEST_CASE("vC absorption can raise kappa on a nearly isotropic Z") {
  Matrix z = Matrix::Zero(2, 2);
  z.diagonal() << 1.2, 1.0;
  const auto s = decompose(z);
  const auto p = predict_kappa_after(s, ShiftDirection::CorrelationBreaking);
  CHECK(p.kappa_next > s.kappa);
  CHECK(p.kappa_next == doctest::Approx(2.0 / 1.2));
}

TEST_CASE("partition_by_correlation") {
  auto part = partition_by_correlation(decompose(line_z()));
  CHECK(part.side_positive == std::vector<Eigen::Index>{0, 2});
  CHECK(part.side_negative == std::vector<Eigen::Index>{1, 3});
  CHECK(part.zero_entries.empty());

  part = partition_by_correlation(decompose(Matrix(Matrix::Identity(3, 3))));
  CHECK(part.side_positive == std::vector<Eigen::Index>{0});
  CHECK(part.zero_entries == std::vector<Eigen::Index>{1, 2});

  // Star: center 0 co-consumed once with each leaf, every good once alone.
  Matrix star = Matrix::Zero(4, 4);
  star.diagonal() << 4, 2, 2, 2;
  for (int k = 1; k < 4; ++k) star(0, k) = star(k, 0) = 1;
  const auto js = oracle::jacobi(star);
  CHECK(js.values.front() == doctest::Approx(1.0));
  part = partition_by_correlation(decompose(star));
  CHECK(part.side_positive == std::vector<Eigen::Index>{0});
  CHECK(part.side_negative == std::vector<Eigen::Index>{1, 2, 3});
}

TEST_CASE("property: partition covers every good and follows vC signs") {
  std::mt19937_64 g(31);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = decompose(random_spd(g, 5));
    const auto p = partition_by_correlation(s);
    CHECK(p.side_positive.size() + p.side_negative.size() + p.zero_entries.size() == 5);
    for (auto k : p.side_positive) CHECK(s.vC(k) > 1e-9);
    for (auto k : p.side_negative) CHECK(s.vC(k) < -1e-9);
  }
}

TEST_CASE("centrality_report") {
  auto r = centrality_report(line_z());
  CHECK(r[0].good == 1);
  CHECK(r[1].good == 2);
  CHECK(r[0].vn == doctest::Approx(r[1].vn));
  CHECK(r[0].vn / r[2].vn == doctest::Approx(1.0 + kSqrt2).epsilon(1e-10));

  r = centrality_report(Matrix(Matrix::Identity(3, 3)));
  for (std::size_t k = 0; k < 3; ++k) CHECK(r[k].good == static_cast<Eigen::Index>(k));
}

TEST_CASE("six-good fixture ranking equals the Jacobi oracle ranking") {
  std::ifstream in(std::string(FIXTURE_DIR) + "/six_goods.csv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  std::map<std::string, int> col;
  std::vector<std::vector<std::string>> recs;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string order, items;
    std::getline(ss, order, ',');
    std::getline(ss, items, ',');
    std::stringstream is(items);
    std::string item;
    recs.emplace_back();
    while (std::getline(is, item, ';')) {
      col.emplace(item, static_cast<int>(col.size()));
      recs.back().push_back(item);
    }
  }
  Matrix X = Matrix::Zero(static_cast<Eigen::Index>(recs.size()), static_cast<Eigen::Index>(col.size()));
  for (std::size_t r = 0; r < recs.size(); ++r)
    for (const auto& it : recs[r]) X(static_cast<Eigen::Index>(r), col[it]) = 1.0;
  const Matrix z = oracle::gram(X);
  const auto j = oracle::jacobi(z);
  Vector lead = j.vectors.col(static_cast<Eigen::Index>(col.size()) - 1);
  if (lead.sum() < 0) lead = -lead;
  std::vector<Eigen::Index> expect(col.size());
  for (std::size_t k = 0; k < expect.size(); ++k) expect[k] = static_cast<Eigen::Index>(k);
  std::stable_sort(expect.begin(), expect.end(), [&](auto a, auto b) { return lead(a) > lead(b); });
  const auto r = centrality_report(z);
  for (std::size_t k = 0; k < expect.size(); ++k) {
    CHECK(r[k].good == expect[k]);
    CHECK(r[k].vn == doctest::Approx(lead(expect[k])).epsilon(1e-9));
  }
}

TEST_CASE("templated decompose in long double") {
  MatrixX<long double> z = line_z().cast<long double>();
  const auto s = decompose(z);
  CHECK(static_cast<double>(s.lambda_max()) == doctest::Approx(3.0 + kSqrt2).epsilon(1e-14));
}
