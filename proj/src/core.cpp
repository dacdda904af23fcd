#include "seed/core.hpp"

#include "seed/parallel.hpp"
#include "seed/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace seed {

namespace {

// Ridge floor keeping the normal equations solvable when X_S drifts toward
// numerical rank deficiency. oASIS selections are independent by construction,
// so this only has to guard against floating-point singularity.
constexpr double kNormalEquationRidge = 1e-12;

}  // namespace

Matrix least_squares_coefficients(const Matrix& basis, const Matrix& targets) {
  if (basis.rows() != targets.rows()) {
    throw InvalidArgument("least_squares_coefficients: row count mismatch");
  }
  if (basis.cols() == 0) throw InvalidArgument("least_squares_coefficients: empty basis");

  Matrix gram = basis.transpose() * basis;
  const double trace = gram.trace();
  if (trace <= 0.0) {
    throw NumericalError("least_squares_coefficients: basis columns are all zero");
  }
  const double ridge = kNormalEquationRidge * trace / static_cast<double>(basis.cols());
  gram.diagonal().array() += ridge;

  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("least_squares_coefficients: Cholesky factorization failed");
  }
  Matrix coeffs = llt.solve(basis.transpose() * targets);
  // One refinement pass removes the bias the ridge introduces.
  coeffs += llt.solve(basis.transpose() * (targets - basis * coeffs));
  return coeffs;
}

Matrix least_squares_project(const DataMatrix& X, const ColumnIndexSet& S) {
  if (S.empty()) throw InvalidArgument("least_squares_project: empty index set");
  const Matrix basis = S.gather(X.mat());
  return basis * least_squares_coefficients(basis, X.mat());
}

namespace {

/// Eigendecomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and the rotation matrix in-place.
void jacobi_eigen_descending(Matrix& S, Vector& eigenvalues, Matrix& rotation) {
  const Index k = S.rows();
  rotation = Matrix::Identity(k, k);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < k; ++p)
      for (Index q = p + 1; q < k; ++q) off += S(p, q) * S(p, q);
    if (off <= 1e-30 * std::max(1.0, S.diagonal().cwiseAbs().maxCoeff())) break;
    for (Index p = 0; p < k; ++p) {
      for (Index q = p + 1; q < k; ++q) {
        if (S(p, q) == 0.0) continue;
        const double theta = (S(q, q) - S(p, p)) / (2.0 * S(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::JacobiRotation<double> rot(c, s);
        S.applyOnTheLeft(p, q, rot.transpose());
        S.applyOnTheRight(p, q, rot);
        rotation.applyOnTheRight(p, q, rot);
      }
    }
  }
  eigenvalues = S.diagonal();
  // Sort descending, permuting the rotation columns along.
  std::vector<Index> order(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return eigenvalues(a) > eigenvalues(b); });
  Vector sorted_vals(k);
  Matrix sorted_rot(k, k);
  for (Index i = 0; i < k; ++i) {
    sorted_vals(i) = eigenvalues(order[static_cast<std::size_t>(i)]);
    sorted_rot.col(i) = rotation.col(order[static_cast<std::size_t>(i)]);
  }
  eigenvalues = std::move(sorted_vals);
  rotation = std::move(sorted_rot);
}

}  // namespace

SvdTriplets leading_singular_vectors(const Matrix& A, Index count, double tol, int max_iter) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (count < 1 || count > std::min(m, n)) {
    throw InvalidArgument("leading_singular_vectors: count must be in [1, min(m, n)]");
  }

  Matrix right = Matrix::Zero(n, count);
  double sigma_max = 0.0;

  // Stage 1: per-triplet power iteration on A^T A, each deflated against the
  // vectors already computed. Near-degenerate neighbours may stall while the
  // iterate still mixes inside the right span; stage 2 untangles them.
  for (Index j = 0; j < count; ++j) {
    Rng rng(0x5eedu + static_cast<std::uint64_t>(j));
    Vector v = rng.normal_vector(n);
    for (Index p = 0; p < j; ++p) v -= right.col(p).dot(v) * right.col(p);
    double vn = v.norm();
    if (vn == 0.0) {
      v = Vector::Unit(n, j % n);
      vn = 1.0;
    }
    v /= vn;

    for (int iter = 0; iter < max_iter; ++iter) {
      Vector w = A * v;
      const double sigma = w.norm();
      const double scale = std::max(sigma_max, sigma);
      if (sigma <= std::numeric_limits<double>::min() * 16 ||
          (scale > 0.0 && sigma <= 1e-15 * scale)) {
        break;  // deflated remainder is numerically zero
      }
      Vector z = A.transpose() * (w / sigma);
      for (Index p = 0; p < j; ++p) z -= right.col(p).dot(z) * right.col(p);

      const double residual = (z - sigma * v).norm();
      const double zn = z.norm();
      if (zn == 0.0) break;
      if (residual <= tol * std::max(scale, std::numeric_limits<double>::min())) {
        v = z / zn;
        break;
      }
      v = z / zn;
    }

    right.col(j) = v;
    sigma_max = std::max(sigma_max, (A * v).norm());
  }

  // Stage 2: Rayleigh-Ritz polish over the computed block. The block spans
  // the leading right subspace even where individual vectors stalled, so
  // diagonalizing the small projected Gram matrix separates the triplets.
  for (Index j = 0; j < count; ++j) {
    for (Index p = 0; p < j; ++p) right.col(j) -= right.col(p).dot(right.col(j)) * right.col(p);
    const double nj = right.col(j).norm();
    right.col(j) = nj > 0.0 ? Vector(right.col(j) / nj) : Vector(Vector::Unit(n, j % n));
  }
  const Matrix B = A * right;               // m x count
  Matrix small = B.transpose() * B;         // count x count, symmetric PSD
  Vector eigenvalues;
  Matrix rotation;
  jacobi_eigen_descending(small, eigenvalues, rotation);

  SvdTriplets result;
  result.values = Vector::Zero(count);
  result.right = right * rotation;
  result.left = Matrix::Zero(m, count);
  const Matrix BR = B * rotation;
  // Eigenvalues of B^T B below the rounding noise of the largest carry no
  // usable left vector; report those triplets as exactly zero.
  const double lambda_floor =
      32.0 * std::numeric_limits<double>::epsilon() * std::max(eigenvalues(0), 0.0);
  for (Index j = 0; j < count; ++j) {
    if (eigenvalues(j) <= lambda_floor) continue;
    const double sigma = std::sqrt(eigenvalues(j));
    result.values(j) = sigma;
    result.left.col(j) = BR.col(j) / sigma;
  }
  sigma_max = result.values(0);

  // Residual verification; a failure carries the best iterate.
  Index converged = 0;
  const double bound = tol * std::max(sigma_max, std::numeric_limits<double>::min());
  for (Index j = 0; j < count; ++j) {
    const double sigma = result.values(j);
    if (sigma == 0.0) {
      ++converged;
      continue;
    }
    const double residual = (A.transpose() * result.left.col(j) - sigma * result.right.col(j)).norm();
    if (residual <= bound) {
      ++converged;
    } else {
      throw ConvergenceError(
          "leading_singular_vectors: triplet " + std::to_string(j) +
              " did not reach the residual tolerance within " + std::to_string(max_iter) +
              " iterations",
          result, converged);
    }
  }
  return result;
}

namespace {

double squared_distance(const Matrix& points, Index p, const Matrix& centroids, int c) {
  return (points.col(p) - centroids.col(c)).squaredNorm();
}

struct LloydRun {
  std::vector<int> labels;
  Matrix centroids;
  double objective = 0.0;
};

LloydRun lloyd_once(const Matrix& points, int k, int max_iter, Rng& rng) {
  const Index n = points.cols();
  const Index dim = points.rows();

  // k-means++ seeding.
  Matrix centroids(dim, k);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  {
    const Index first = rng.uniform_index(n);
    centroids.col(0) = points.col(first);
    used[static_cast<std::size_t>(first)] = 1;
    Vector min_d2 = (points.colwise() - points.col(first)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c) {
      double total = min_d2.sum();
      Index pick;
      if (total > 0.0) {
        pick = rng.pick_weighted(min_d2);
      } else {
        // All remaining points coincide with a centroid; pick any unused one.
        pick = 0;
        while (pick < n && used[static_cast<std::size_t>(pick)]) ++pick;
        if (pick == n) pick = rng.uniform_index(n);
      }
      centroids.col(c) = points.col(pick);
      used[static_cast<std::size_t>(pick)] = 1;
      for (Index p = 0; p < n; ++p) {
        min_d2(p) = std::min(min_d2(p), squared_distance(points, p, centroids, c));
      }
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  double objective = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment.
    std::atomic<bool> any_changed{false};
    parallel_for(n, [&](Index b, Index e) {
      bool local_changed = false;
      for (Index p = b; p < e; ++p) {
        int best = 0;
        double best_d = squared_distance(points, p, centroids, 0);
        for (int c = 1; c < k; ++c) {
          const double d = squared_distance(points, p, centroids, c);
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        if (labels[static_cast<std::size_t>(p)] != best) {
          labels[static_cast<std::size_t>(p)] = best;
          local_changed = true;
        }
      }
      if (local_changed) any_changed.store(true, std::memory_order_relaxed);
    });
    bool changed = any_changed.load();

    // Update.
    centroids.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Index p = 0; p < n; ++p) {
      const int c = labels[static_cast<std::size_t>(p)];
      centroids.col(c) += points.col(p);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }

    // Repair empty clusters: re-seed at the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index farthest = 0;
      double far_d = -1.0;
      for (Index p = 0; p < n; ++p) {
        const double d = squared_distance(points, p, centroids, labels[static_cast<std::size_t>(p)]);
        if (d > far_d) {
          far_d = d;
          farthest = p;
        }
      }
      centroids.col(c) = points.col(farthest);
      labels[static_cast<std::size_t>(farthest)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    double obj = 0.0;
    for (Index p = 0; p < n; ++p) {
      obj += squared_distance(points, p, centroids, labels[static_cast<std::size_t>(p)]);
    }
    objective = obj;
    if (!changed) break;
  }

  return LloydRun{std::move(labels), std::move(centroids), objective};
}

}  // namespace

KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg) {
  const Index n = points.cols();
  if (cfg.k < 1) throw InvalidArgument("kmeans: k must be positive");
  if (static_cast<Index>(cfg.k) > n) throw InvalidArgument("kmeans: k exceeds the number of points");
  if (cfg.restarts < 1) throw InvalidArgument("kmeans: restarts must be positive");

  Rng rng(cfg.seed);
  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    LloydRun run = lloyd_once(points, cfg.k, cfg.max_iter, rng);
    if (run.objective < best.objective) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centroids);
      best.objective = run.objective;
    }
  }
  return best;
}

}  // namespace seed
