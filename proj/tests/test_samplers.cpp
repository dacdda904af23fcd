#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "seed/rng.hpp"
#include "seed/samplers.hpp"
#include "seed/synth.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

using namespace seed;

namespace {

Matrix orthonormal_columns(Index m, Index n, std::uint64_t s) {
  Rng rng(s);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(m, n));
  return qr.householderQ() * Matrix::Identity(m, n);
}

}  // namespace

TEST_CASE("random_select with L = n returns every index") {
  Rng rng(1);
  const DataMatrix X(rng.normal_matrix(4, 12));
  const ColumnIndexSet s = random_select(X, 12, 5);
  CHECK(s.size() == 12);
  for (Index i = 0; i < 12; ++i) CHECK(s.contains(i));
}

TEST_CASE("random_select is deterministic per seed") {
  Rng rng(2);
  const DataMatrix X(rng.normal_matrix(4, 30));
  CHECK(random_select(X, 10, 77).order() == random_select(X, 10, 77).order());
  CHECK(random_select(X, 10, 77).order() != random_select(X, 10, 78).order());
}

TEST_CASE("random_select frequencies are uniform within 3 sigma") {
  Rng rng(3);
  const DataMatrix X(rng.normal_matrix(2, 10));
  std::vector<int> counts(10, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    ++counts[static_cast<std::size_t>(random_select(X, 1, 9000 + static_cast<std::uint64_t>(t))[0])];
  }
  const double expected = draws / 10.0;
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (int c : counts) {
    CHECK(std::abs(c - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("ses on a rank-1 matrix returns exactly one column") {
  Rng rng(4);
  const Vector u = rng.normal_vector(8);
  Matrix raw(8, 20);
  for (Index j = 0; j < 20; ++j) raw.col(j) = (1.0 + static_cast<double>(j)) * u;
  const ColumnIndexSet s = ses_select(DataMatrix(raw), 10, 3);
  CHECK(s.size() == 1);
}

TEST_CASE("ses first draw is uniform for equal-norm orthogonal columns") {
  const DataMatrix X(orthonormal_columns(10, 10, 5));
  std::vector<int> counts(10, 0);
  const int draws = 8000;
  for (int t = 0; t < draws; ++t) {
    ++counts[static_cast<std::size_t>(ses_select(X, 1, 100 + static_cast<std::uint64_t>(t))[0])];
  }
  const double expected = draws / 10.0;
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (int c : counts) CHECK(std::abs(c - expected) <= 3.5 * sigma);
}

TEST_CASE("ses second draw must pick the orthogonal singleton") {
  Rng rng(6);
  Vector u = rng.normal_vector(10);
  u.normalize();
  Vector v = rng.normal_vector(10);
  v -= u.dot(v) * u;
  v.normalize();
  Matrix raw(10, 100);
  for (Index j = 0; j < 99; ++j) raw.col(j) = u;
  raw.col(99) = v;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ColumnIndexSet sel = ses_select(DataMatrix(raw), 2, s);
    REQUIRE(sel.size() == 2);
    // Whichever was drawn first, the other cluster's survivor is next: after
    // a u-copy, every u residual is zero, so v is certain (and vice versa).
    CHECK(((sel[0] == 99) != (sel[1] == 99)));
  }
}

TEST_CASE("ses incremental residuals agree with full reprojection") {
  Rng rng(7);
  const DataMatrix X(rng.normal_matrix(12, 40));
  const ColumnIndexSet sel = ses_select(X, 8, 11);
  REQUIRE(sel.size() == 8);
  // Re-derive the residual-norm vector after all 8 selections both ways.
  const Matrix P = oracle::svd_project(sel.gather(X.mat()), X.mat());
  const Matrix R = X.mat() - P;
  // The incremental path is internal; its observable effect is the selection
  // itself. Check the invariant it guarantees: selected columns have zero
  // residual against the selection, and the set is linearly independent.
  for (Index p = 0; p < sel.size(); ++p) {
    CHECK(R.col(sel[p]).norm() <= 1e-8 * X.mat().norm());
  }
  CHECK(oracle::numerical_rank(sel.gather(X.mat())) == 8);
}

TEST_CASE("ses reaches exact recovery within rank steps and stays independent") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Index r = 4 + static_cast<Index>(s % 3);
    const DataMatrix X = gen_low_rank(15, 60, r, 0.0, 500 + s);
    const ColumnIndexSet sel = ses_select(X, 12, s);
    CHECK(sel.size() == r);
    CHECK(oracle::numerical_rank(sel.gather(X.mat())) == r);
    const Matrix P = oracle::svd_project(sel.gather(X.mat()), X.mat());
    CHECK((X.mat() - P).norm() <= 1e-8 * X.mat().norm());
  }
}

TEST_CASE("greedy ses picks the largest residual deterministically") {
  Rng rng(8);
  const DataMatrix X(rng.normal_matrix(6, 25));
  const ColumnIndexSet a = ses_select(X, 5, 1, /*greedy=*/true);
  const ColumnIndexSet b = ses_select(X, 5, 2, /*greedy=*/true);
  CHECK(a.order() == b.order());  // greedy ignores the seed
  // First greedy pick is the largest-norm column.
  Index best = 0;
  for (Index j = 1; j < 25; ++j) {
    if (X.col(j).norm() > X.col(best).norm()) best = j;
  }
  CHECK(a[0] == best);
}

TEST_CASE("leverage scores are flat for orthonormal columns") {
  const DataMatrix X(orthonormal_columns(12, 8, 9));
  const Vector scores = leverage_scores(X, 8);
  for (Index i = 0; i < 8; ++i) {
    CHECK(scores(i) == doctest::Approx(1.0 / 8.0).epsilon(1e-8));
  }
}

TEST_CASE("a column orthogonal to the rest keeps a positive leverage score") {
  Rng rng(10);
  Matrix raw = Matrix::Zero(10, 6);
  const Matrix basis = orthonormal_columns(10, 3, 11);
  for (Index j = 0; j < 5; ++j) raw.col(j) = basis.leftCols(2) * rng.normal_vector(2);
  raw.col(5) = basis.col(2);
  const Index rank = oracle::numerical_rank(raw);
  const Vector scores = leverage_scores(DataMatrix(raw), rank);
  CHECK(scores(5) > 0.1);
}

TEST_CASE("leverage scores match the full-SVD oracle") {
  const DataMatrix X = gen_low_rank(10, 20, 5, 0.0, 12);
  const Vector scores = leverage_scores(X, 5);

  const auto svd = oracle::full_svd(X.mat());
  for (Index i = 0; i < 20; ++i) {
    const double expected = svd.matrixV().row(i).head(5).squaredNorm() / 5.0;
    CHECK(scores(i) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("all samplers return distinct indices deterministically") {
  const DataMatrix X = gen_low_rank(15, 40, 8, 0.1, 13);
  for (SamplerMethod method : {SamplerMethod::oasis, SamplerMethod::random, SamplerMethod::ses,
                               SamplerMethod::leverage}) {
    SamplerSpec spec;
    spec.method = method;
    spec.count = 6;
    spec.seed = 21;
    const SelectionRun a = select_columns(X, spec);
    const SelectionRun b = select_columns(X, spec);
    CHECK(a.selected.order() == b.selected.order());
    CHECK(a.selected.size() == 6);  // distinctness is enforced by ColumnIndexSet
  }
}

TEST_CASE("leverage default rank resolves to the numerical rank") {
  const DataMatrix X = gen_low_rank(12, 30, 4, 0.0, 14);
  SamplerSpec spec;
  spec.method = SamplerMethod::leverage;
  spec.count = 4;
  spec.seed = 3;
  const SelectionRun run = select_columns(X, spec);  // no explicit rank
  CHECK(run.selected.size() == 4);
}
