#pragma once

#include "seed/types.hpp"

#include <cstdint>
#include <vector>

namespace seed {

/// Orthogonal projection of every column of X onto span(X_S), computed from
/// the regularized normal equations (X_S^T X_S + lambda I) with
/// lambda = 1e-12 * trace(X_S^T X_S) / |S|. Throws NumericalError when X_S is
/// entirely zero.
Matrix least_squares_project(const DataMatrix& X, const ColumnIndexSet& S);

/// Least-squares fit of `targets` against the columns of `basis` via the same
/// regularized normal equations; returns the coefficient matrix B with
/// basis * B ~= targets.
Matrix least_squares_coefficients(const Matrix& basis, const Matrix& targets);

struct SvdTriplets {
  Vector values;  // descending singular values
  Matrix left;    // m x count
  Matrix right;   // n x count
};

/// Thrown when power iteration fails to converge; carries the best iterate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, SvdTriplets best, Index converged)
      : NumericalError(what), partial(std::move(best)), converged_count(converged) {}

  SvdTriplets partial;
  Index converged_count = 0;
};

/// Top `count` singular triplets of A by power iteration on A^T A with
/// explicit Gram-Schmidt deflation against converged right vectors. A triplet
/// is accepted once ||A^T u - sigma v|| <= tol * sigma_max.
SvdTriplets leading_singular_vectors(const Matrix& A, Index count, double tol = 1e-10,
                                     int max_iter = 10000);

struct KMeansConfig {
  int k = 2;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iter = 300;
};

struct KMeansResult {
  std::vector<int> labels;  // one per column of the input
  Matrix centroids;         // dim x k
  double objective = 0.0;   // sum of squared distances to assigned centroid
};

/// Lloyd's algorithm with k-means++ seeding, best of cfg.restarts runs.
/// Points are the columns of `points`. Empty clusters are repaired by
/// re-seeding the centroid at the point farthest from its assigned centroid.
KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg);

}  // namespace seed
