#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "seed/rng.hpp"
#include "seed/sparse_coding.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>

using namespace seed;

namespace {

Dictionary random_dictionary(Index m, Index L, std::uint64_t s) {
  Rng rng(s);
  Matrix atoms = rng.normal_matrix(m, L);
  Vector norms(L);
  std::vector<Index> sources(static_cast<std::size_t>(L));
  for (Index j = 0; j < L; ++j) {
    norms(j) = atoms.col(j).norm();
    atoms.col(j) /= norms(j);
    sources[static_cast<std::size_t>(j)] = j;
  }
  return Dictionary::from_atoms(std::move(atoms), std::move(sources), std::move(norms));
}

// Exhaustive least squares over every k-subset of atoms.
struct SubsetFit {
  std::vector<Index> support;
  Vector coeffs;
  double residual = 0.0;
};

SubsetFit best_k_subset(const Vector& x, const Matrix& atoms, int k) {
  const Index L = atoms.cols();
  std::vector<Index> subset(static_cast<std::size_t>(k));
  SubsetFit best;
  best.residual = std::numeric_limits<double>::infinity();

  std::function<void(Index, int)> recurse = [&](Index start, int depth) {
    if (depth == k) {
      Matrix B(atoms.rows(), k);
      for (int t = 0; t < k; ++t) B.col(t) = atoms.col(subset[static_cast<std::size_t>(t)]);
      const Vector c = B.colPivHouseholderQr().solve(x);
      const double r = (x - B * c).norm();
      if (r < best.residual) {
        best.residual = r;
        best.support = subset;
        best.coeffs = c;
      }
      return;
    }
    for (Index j = start; j < L; ++j) {
      subset[static_cast<std::size_t>(depth)] = j;
      recurse(j + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

}  // namespace

TEST_CASE("an atom recovers itself in one step") {
  const Dictionary D = random_dictionary(10, 15, 1);
  StoppingRule stop;
  stop.residual_tol = 1e-12;
  const SparseVector v = omp(D.atoms().col(7), D, stop);
  REQUIRE(v.support.size() == 1);
  CHECK(v.support[0] == 7);
  CHECK(v.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(v.residual_norm <= 1e-10);
}

TEST_CASE("a signal orthogonal to the dictionary yields an empty code") {
  Rng rng(2);
  Matrix atoms = Matrix::Zero(10, 4);
  const Matrix basis = [&] {
    Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(10, 5));
    return Matrix(qr.householderQ() * Matrix::Identity(10, 5));
  }();
  for (Index j = 0; j < 4; ++j) atoms.col(j) = basis.col(j);
  Vector norms = Vector::Ones(4);
  const Dictionary D = Dictionary::from_atoms(atoms, {0, 1, 2, 3}, norms);
  const Vector x = 2.5 * basis.col(4);

  SUBCASE("correlation floor stops with the full residual") {
    StoppingRule stop;
    stop.max_atoms = 3;
    const SparseVector v = omp(x, D, stop);
    CHECK(v.support.empty());
    CHECK(v.residual_norm == doctest::Approx(x.norm()).epsilon(1e-12));
  }
  SUBCASE("eps above the signal norm returns immediately") {
    StoppingRule stop;
    stop.residual_tol = x.norm() + 1.0;
    const SparseVector v = omp(x, D, stop);
    CHECK(v.support.empty());
  }
}

TEST_CASE("three-atom combination matches the brute-force subset oracle") {
  const Dictionary D = random_dictionary(10, 20, 3);
  const Vector x =
      2.0 * D.atoms().col(3) - 1.0 * D.atoms().col(7) + 0.5 * D.atoms().col(12);
  StoppingRule stop;
  stop.max_atoms = 3;
  const SparseVector v = omp(x, D, stop);

  REQUIRE(v.support.size() == 3);
  const std::set<Index> got(v.support.begin(), v.support.end());
  CHECK(got == std::set<Index>{3, 7, 12});
  CHECK(v.residual_norm <= 1e-10);

  const SubsetFit oracle_fit = best_k_subset(x, D.atoms(), 3);
  const std::set<Index> oracle_support(oracle_fit.support.begin(), oracle_fit.support.end());
  CHECK(oracle_support == got);
  for (std::size_t t = 0; t < 3; ++t) {
    // Align coefficients by atom index.
    const auto pos = std::find(oracle_fit.support.begin(), oracle_fit.support.end(), v.support[t]);
    REQUIRE(pos != oracle_fit.support.end());
    const Index at = pos - oracle_fit.support.begin();
    CHECK(v.coeffs[t] == doctest::Approx(oracle_fit.coeffs(at)).epsilon(1e-8));
  }
}

TEST_CASE("zero input yields an empty support with zero residual") {
  const Dictionary D = random_dictionary(6, 9, 4);
  StoppingRule stop;
  stop.max_atoms = 2;
  const SparseVector v = omp(Vector::Zero(6), D, stop);
  CHECK(v.support.empty());
  CHECK(v.residual_norm == 0.0);
}

TEST_CASE("residuals decrease monotonically and end orthogonal to the support") {
  Rng rng(5);
  const Dictionary D = random_dictionary(15, 30, 6);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = rng.normal_vector(15);
    // Track the residual by running with increasing k.
    double prev = x.norm();
    for (int k = 1; k <= 6; ++k) {
      StoppingRule stop;
      stop.max_atoms = k;
      const SparseVector v = omp(x, D, stop);
      CHECK(v.residual_norm <= prev + 1e-12);
      prev = v.residual_norm;
    }
    StoppingRule stop;
    stop.max_atoms = 6;
    const SparseVector v = omp(x, D, stop);
    Vector r = x;
    for (std::size_t t = 0; t < v.support.size(); ++t) {
      r -= v.coeffs[t] * D.atoms().col(v.support[t]);
    }
    for (Index j : v.support) {
      CHECK(std::abs(D.atoms().col(j).dot(r)) <= 1e-8 * x.norm());
    }
  }
}

TEST_CASE("batch of one equals the reference") {
  const Dictionary D = random_dictionary(12, 18, 7);
  Rng rng(8);
  const Vector x = rng.normal_vector(12);
  StoppingRule stop;
  stop.max_atoms = 4;
  const SparseVector ref = omp(x, D, stop);
  Matrix one(12, 1);
  one.col(0) = x;
  const SparseCode batch = batch_omp(DataMatrix(one), D, stop);
  REQUIRE(batch.cols.size() == 1);
  CHECK(batch.cols[0].support == ref.support);
  for (std::size_t t = 0; t < ref.coeffs.size(); ++t) {
    CHECK(batch.cols[0].coeffs[t] == doctest::Approx(ref.coeffs[t]).epsilon(1e-8));
  }
  CHECK(std::abs(batch.cols[0].residual_norm - ref.residual_norm) <= 1e-8);
}

TEST_CASE("batch and reference agree over 100 random signals") {
  const Dictionary D = random_dictionary(15, 40, 9);
  Rng rng(10);
  const Matrix signals = rng.normal_matrix(15, 100);
  StoppingRule stop;
  stop.max_atoms = 5;
  const SparseCode batch = batch_omp(DataMatrix(signals), D, stop);
  for (Index j = 0; j < 100; ++j) {
    const SparseVector ref = omp(signals.col(j), D, stop);
    const SparseVector& b = batch.cols[static_cast<std::size_t>(j)];
    REQUIRE(b.support == ref.support);
    for (std::size_t t = 0; t < ref.coeffs.size(); ++t) {
      CHECK(b.coeffs[t] == doctest::Approx(ref.coeffs[t]).epsilon(1e-8));
    }
    CHECK(std::abs(b.residual_norm - ref.residual_norm) <= 1e-8 * (1.0 + ref.residual_norm));
  }
}

TEST_CASE("error stopping bounds every returned residual") {
  const Dictionary D = random_dictionary(20, 30, 11);
  Rng rng(12);
  Matrix signals = rng.normal_matrix(20, 40);
  for (Index j = 0; j < signals.cols(); ++j) signals.col(j).normalize();
  StoppingRule stop;
  stop.residual_tol = 0.2;
  const SparseCode batch = batch_omp(DataMatrix(signals), D, stop);
  for (const SparseVector& c : batch.cols) {
    const bool budget_exhausted = static_cast<Index>(c.support.size()) == D.atom_count();
    CHECK((c.residual_norm <= 0.2 + 1e-10 || budget_exhausted));
  }
}

TEST_CASE("zero-diag: a duplicate atom covers its twin exactly") {
  Rng rng(13);
  Vector u = rng.normal_vector(9);
  Matrix cols(9, 3);
  cols.col(0) = 2.0 * u;
  cols.col(1) = 3.0 * u;  // same direction, different norm
  cols.col(2) = rng.normal_vector(9);
  const DataMatrix X(cols);
  const Dictionary D(X, ColumnIndexSet({0, 1, 2}));
  StoppingRule stop;
  stop.residual_tol = 1e-10;
  const SparseCode code = omp_zero_diag(X, D, stop);

  REQUIRE(code.cols[0].support.size() == 1);
  CHECK(code.cols[0].support[0] == 1);  // signal 0 must use atom 1
  CHECK(code.cols[0].coeffs[0] == doctest::Approx(2.0 * u.norm()).epsilon(1e-10));
  // The squared-norm recursion resolves exact fits only to ~sqrt(eps)*||x||.
  CHECK(code.cols[0].residual_norm <= 1e-6);
}

TEST_CASE("zero-diag: an isolated atom keeps its full residual") {
  Rng rng(14);
  const Matrix basis = [&] {
    Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(12, 4));
    return Matrix(qr.householderQ() * Matrix::Identity(12, 4));
  }();
  Matrix cols(12, 4);
  cols.col(0) = 1.7 * basis.col(0);  // orthogonal to everything else
  cols.col(1) = basis.col(1);
  cols.col(2) = basis.col(2);
  cols.col(3) = basis.col(3);
  const DataMatrix X(cols);
  const Dictionary D(X, ColumnIndexSet({0, 1, 2, 3}));
  StoppingRule stop;
  stop.residual_tol = 0.5;  // below ||x_0|| = 1.7
  const SparseCode code = omp_zero_diag(X, D, stop);
  CHECK(code.cols[0].support.empty());
  CHECK(code.cols[0].residual_norm == doctest::Approx(1.7).epsilon(1e-10));
}

TEST_CASE("zero-diag on a shared 2-dim subspace uses only the other atoms") {
  Rng rng(15);
  const Matrix basis = [&] {
    Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(10, 2));
    return Matrix(qr.householderQ() * Matrix::Identity(10, 2));
  }();
  Matrix cols(10, 5);
  for (Index j = 0; j < 5; ++j) cols.col(j) = basis * rng.normal_vector(2);
  const DataMatrix X(cols);
  const Dictionary D(X, ColumnIndexSet({0, 1, 2, 3, 4}));
  StoppingRule stop;
  stop.residual_tol = 1e-9;
  const SparseCode code = omp_zero_diag(X, D, stop);
  for (Index j = 0; j < 5; ++j) {
    const SparseVector& c = code.cols[static_cast<std::size_t>(j)];
    CHECK(c.residual_norm <= 1e-8);
    for (Index a : c.support) CHECK(a != j);
    CHECK(c.support.size() <= 2);
  }
}

TEST_CASE("exact feature selection on two independent 3-dim subspaces") {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(3000 + trial);
    const Matrix frame = [&] {
      Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(100, 6));
      return Matrix(qr.householderQ() * Matrix::Identity(100, 6));
    }();
    const auto basis_a = frame.leftCols(3);
    const auto basis_b = frame.rightCols(3);

    // Four atoms from each subspace.
    Matrix atoms(100, 8);
    std::vector<Index> sources(8);
    Vector norms = Vector::Ones(8);
    for (Index j = 0; j < 4; ++j) {
      atoms.col(j) = basis_a * rng.normal_vector(3).normalized();
      atoms.col(j).normalize();
      atoms.col(4 + j) = basis_b * rng.normal_vector(3).normalized();
      atoms.col(4 + j).normalize();
      sources[static_cast<std::size_t>(j)] = j;
      sources[static_cast<std::size_t>(4 + j)] = 4 + j;
    }
    const Dictionary D = Dictionary::from_atoms(atoms, sources, norms);

    StoppingRule stop;
    stop.residual_tol = 1e-6;
    const Vector xa = basis_a * rng.normal_vector(3);
    const SparseVector va = omp(xa, D, stop);
    CHECK(va.residual_norm <= 1e-6 * (1.0 + xa.norm()));
    for (Index j : va.support) CHECK(j < 4);

    const Vector xb = basis_b * rng.normal_vector(3);
    const SparseVector vb = omp(xb, D, stop);
    for (Index j : vb.support) CHECK(j >= 4);
  }
}

TEST_CASE("stopping rule validation") {
  CHECK_THROWS_AS(StoppingRule{}.validate(), InvalidArgument);
  StoppingRule bad_k;
  bad_k.max_atoms = 0;
  CHECK_THROWS_AS(bad_k.validate(), InvalidArgument);
  StoppingRule bad_eps;
  bad_eps.residual_tol = -0.5;
  CHECK_THROWS_AS(bad_eps.validate(), InvalidArgument);
}

TEST_CASE("dictionary construction rejects zero columns and bad atoms") {
  Matrix cols = Matrix::Zero(5, 2);
  cols.col(0) = Vector::Ones(5);
  CHECK_THROWS_AS(Dictionary(DataMatrix(cols), ColumnIndexSet({0, 1})), NumericalError);

  Matrix atoms = Matrix::Ones(5, 1);  // norm sqrt(5), not unit
  CHECK_THROWS_AS(Dictionary::from_atoms(atoms, {0}, Vector::Ones(1)), InvalidArgument);
}
