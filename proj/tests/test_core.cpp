#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "seed/core.hpp"
#include "seed/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace seed;

namespace {

DataMatrix random_rank_r(Index m, Index n, Index r, std::uint64_t s) {
  Rng rng(s);
  return DataMatrix(rng.normal_matrix(m, r) * rng.normal_matrix(r, n));
}

}  // namespace

TEST_CASE("projection reproduces a rank-1 matrix from one column") {
  Rng rng(7);
  const Vector u = rng.normal_vector(12);
  Matrix X(12, 9);
  for (Index j = 0; j < 9; ++j) X.col(j) = (1.0 + 0.3 * static_cast<double>(j)) * u;
  const DataMatrix data(X);

  const Matrix P = least_squares_project(data, ColumnIndexSet({0}));
  CHECK((P - X).norm() <= 1e-10 * X.norm());
}

TEST_CASE("projection onto a full orthonormal basis is the identity") {
  Rng rng(11);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(10, 10));
  const Matrix Q = qr.householderQ() * Matrix::Identity(10, 10);
  const DataMatrix data(Q);

  std::vector<Index> all(10);
  std::iota(all.begin(), all.end(), Index{0});
  const Matrix P = least_squares_project(data, ColumnIndexSet(all));
  CHECK((P - Q).norm() <= 1e-10);
}

TEST_CASE("projection matches the SVD pseudoinverse oracle on rank-5 data") {
  const DataMatrix X = random_rank_r(10, 30, 5, 3);
  // Five independent columns: generic columns of a rank-5 matrix.
  const ColumnIndexSet S({0, 5, 11, 17, 23});
  const Matrix P = least_squares_project(X, S);

  CHECK((X.mat() - P).norm() / X.mat().norm() < 1e-10);

  const Matrix expected = oracle::svd_project(S.gather(X.mat()), X.mat());
  CHECK((P - expected).norm() <= 1e-9 * X.mat().norm());
}

TEST_CASE("projection is idempotent and least-squares optimal") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(100 + s);
    const DataMatrix X(rng.normal_matrix(15, 25));
    const ColumnIndexSet S(rng.sample_without_replacement(25, 6));

    const Matrix P = least_squares_project(X, S);
    const Matrix PP = least_squares_project(DataMatrix(P), S);
    CHECK((PP - P).norm() <= 1e-10 * X.mat().norm());

    const double best = (X.mat() - P).norm();
    const Matrix basis = S.gather(X.mat());
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix B = rng.normal_matrix(6, 25);
      CHECK((X.mat() - basis * B).norm() >= best - 1e-10);
    }
  }
}

TEST_CASE("projection rejects an all-zero basis") {
  Matrix X = Matrix::Zero(4, 3);
  X.col(2) = Vector::Ones(4);
  CHECK_THROWS_AS(least_squares_project(DataMatrix(X), ColumnIndexSet({0, 1})), NumericalError);
}

TEST_CASE("leading singular triplet of a diagonal matrix") {
  Matrix A = Matrix::Zero(3, 3);
  A(0, 0) = 3.0;
  A(1, 1) = 2.0;
  A(2, 2) = 1.0;
  const SvdTriplets t = leading_singular_vectors(A, 1);
  CHECK(t.values(0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::abs(t.left(0, 0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(t.right(0, 0)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rank-1 outer product has sigma = |u||v|") {
  Rng rng(5);
  const Vector u = rng.normal_vector(8);
  const Vector v = rng.normal_vector(6);
  const Matrix A = u * v.transpose();
  const SvdTriplets t = leading_singular_vectors(A, 1);
  CHECK(t.values(0) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-10));
}

TEST_CASE("power iteration matches the full-SVD oracle") {
  Rng rng(13);
  const Matrix A = rng.normal_matrix(20, 15);
  const SvdTriplets t = leading_singular_vectors(A, 3);
  const Vector s = oracle::singular_values(A);
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(t.values(i) - s(i)) <= 1e-8 * s(0));
  }
}

TEST_CASE("power iteration matches the oracle up to 50x50") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    Rng rng(40 + s);
    const Index m = 30 + static_cast<Index>(5 * s);
    const Index n = 50 - static_cast<Index>(3 * s);
    const Matrix A = rng.normal_matrix(m, n);
    const Index count = 4;
    const SvdTriplets t = leading_singular_vectors(A, count);
    const Vector sv = oracle::singular_values(A);
    for (Index i = 0; i < count; ++i) {
      CHECK(std::abs(t.values(i) - sv(i)) <= 1e-8 * sv(0));
    }
    // Triplet consistency: ||A v - sigma u|| small.
    for (Index i = 0; i < count; ++i) {
      CHECK((A * t.right.col(i) - t.values(i) * t.left.col(i)).norm() <= 1e-6 * sv(0));
    }
  }
}

TEST_CASE("non-convergence carries the best iterate") {
  Rng rng(17);
  const Matrix A = rng.normal_matrix(12, 12);
  try {
    leading_singular_vectors(A, 2, 1e-16, 1);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.partial.values.size() == 2);
    CHECK(e.partial.values(0) > 0.0);
    CHECK(e.converged_count < 2);
  }
}

TEST_CASE("kmeans recovers two separated clouds") {
  Rng rng(23);
  Matrix pts(2, 40);
  for (Index j = 0; j < 20; ++j) pts.col(j) = Vector::Zero(2) + 0.1 * rng.normal_vector(2);
  for (Index j = 20; j < 40; ++j) {
    pts.col(j) = Vector::Constant(2, 10.0) + 0.1 * rng.normal_vector(2);
  }
  const KMeansResult r = kmeans(pts, KMeansConfig{2, 1, 10, 300});
  for (Index j = 1; j < 20; ++j) CHECK(r.labels[static_cast<std::size_t>(j)] == r.labels[0]);
  for (Index j = 21; j < 40; ++j) CHECK(r.labels[static_cast<std::size_t>(j)] == r.labels[20]);
  CHECK(r.labels[0] != r.labels[20]);
}

TEST_CASE("kmeans with k = n drives the objective to zero") {
  Rng rng(29);
  const Matrix pts = rng.normal_matrix(3, 6);
  const KMeansResult r = kmeans(pts, KMeansConfig{6, 2, 10, 300});
  CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<int> seen(6, 0);
  for (int l : r.labels) ++seen[static_cast<std::size_t>(l)];
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("1-D kmeans matches the exhaustive 2-partition oracle") {
  Matrix pts(1, 4);
  pts << 0.0, 0.1, 10.0, 10.1;
  const KMeansResult r = kmeans(pts, KMeansConfig{2, 3, 10, 300});
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[2] == r.labels[3]);
  CHECK(r.labels[0] != r.labels[2]);

  // Exhaustive check over every 2-labeling that our objective is minimal.
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < 15; ++mask) {  // skip the two single-cluster labelings
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (int i = 0; i < 4; ++i) {
      const int c = (mask >> i) & 1;
      sum[c] += pts(0, i);
      ++cnt[c];
    }
    if (cnt[0] == 0 || cnt[1] == 0) continue;
    double obj = 0.0;
    for (int i = 0; i < 4; ++i) {
      const int c = (mask >> i) & 1;
      const double d = pts(0, i) - sum[c] / cnt[c];
      obj += d * d;
    }
    best = std::min(best, obj);
  }
  CHECK(r.objective == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("kmeans repairs empty clusters by re-seeding at the farthest point") {
  // Three coincident points and one far away, k = 3: every seeding leaves at
  // least one empty cluster to repair.
  Matrix pts(1, 4);
  pts << 0.0, 0.0, 0.0, 100.0;
  const KMeansResult r = kmeans(pts, KMeansConfig{3, 5, 10, 300});
  CHECK(r.labels.size() == 4);
  for (int l : r.labels) {
    CHECK(l >= 0);
    CHECK(l < 3);
  }
  // The lone far point must sit alone in its own cluster.
  CHECK(r.labels[3] != r.labels[0]);
  CHECK(std::isfinite(r.objective));
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
  Rng rng(31);
  const Matrix pts = rng.normal_matrix(4, 50);
  const KMeansResult a = kmeans(pts, KMeansConfig{5, 9, 10, 300});
  const KMeansResult b = kmeans(pts, KMeansConfig{5, 9, 10, 300});
  CHECK(a.labels == b.labels);
  CHECK(a.objective == b.objective);
}
