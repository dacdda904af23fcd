#include "seed/sparse_coding.hpp"

#include "seed/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seed {

namespace {

// Iteration stops unconditionally once the best correlation falls to this
// fraction of ||x||; without it an unreachable eps would loop forever.
constexpr double kCorrelationFloorScale = 1e-12;
// Pivot floor (relative to the atom's squared norm) under which a candidate
// atom is numerically dependent on the current support.
constexpr double kDependentAtomPivot = 1e-12;

/// Lower-triangular factor of the selected sub-Gram, grown one atom per
/// iteration. Solves reuse the factor by forward/back substitution.
class ProgressiveCholesky {
 public:
  explicit ProgressiveCholesky(Index capacity) : factor_(Matrix::Zero(capacity, capacity)) {}

  /// gram_col holds the inner products between the candidate atom and the
  /// current support; diag is the candidate's squared norm. Returns false when
  /// the pivot is not safely positive.
  bool try_extend(const Vector& gram_col, double diag) {
    Vector w(size_);
    for (Index r = 0; r < size_; ++r) {
      double s = gram_col(r);
      for (Index c = 0; c < r; ++c) s -= factor_(r, c) * w(c);
      w(r) = s / factor_(r, r);
    }
    const double pivot2 = diag - w.squaredNorm();
    if (!(pivot2 > kDependentAtomPivot * diag)) return false;
    factor_.row(size_).head(size_) = w.transpose();
    factor_(size_, size_) = std::sqrt(pivot2);
    ++size_;
    return true;
  }

  /// Solves (L L^T) v = rhs over the current support.
  Vector solve(const Vector& rhs) const {
    Vector y(size_);
    for (Index r = 0; r < size_; ++r) {
      double s = rhs(r);
      for (Index c = 0; c < r; ++c) s -= factor_(r, c) * y(c);
      y(r) = s / factor_(r, r);
    }
    Vector v(size_);
    for (Index r = size_ - 1; r >= 0; --r) {
      double s = y(r);
      for (Index c = r + 1; c < size_; ++c) s -= factor_(c, r) * v(c);
      v(r) = s / factor_(r, r);
    }
    return v;
  }

  Index size() const { return size_; }

 private:
  Matrix factor_;
  Index size_ = 0;
};

struct StopBounds {
  Index max_atoms;
  double eps;  // negative when no Error bound
};

StopBounds resolve_stop(const StoppingRule& stop, Index atom_count) {
  stop.validate();
  StopBounds b;
  b.max_atoms = atom_count;
  if (stop.max_atoms.has_value()) b.max_atoms = std::min<Index>(atom_count, *stop.max_atoms);
  b.eps = stop.residual_tol.has_value() ? *stop.residual_tol : -1.0;
  return b;
}

}  // namespace

void StoppingRule::validate() const {
  if (!max_atoms.has_value() && !residual_tol.has_value()) {
    throw InvalidArgument("stopping rule: at least one of k_max and eps is required");
  }
  if (max_atoms.has_value() && *max_atoms < 1) {
    throw InvalidArgument("stopping rule: k_max must be positive");
  }
  if (residual_tol.has_value() && !(*residual_tol >= 0.0)) {
    throw InvalidArgument("stopping rule: eps must be non-negative");
  }
}

Dictionary::Dictionary(const DataMatrix& X, const ColumnIndexSet& sources) {
  if (sources.empty()) throw InvalidArgument("Dictionary: empty column selection");
  sources.check_bounds(X.cols());
  atoms_ = sources.gather(X.mat());
  norms_ = atoms_.colwise().norm().transpose();
  for (Index j = 0; j < atoms_.cols(); ++j) {
    if (norms_(j) == 0.0) {
      throw NumericalError("Dictionary: selected column " +
                           std::to_string(sources[j]) + " is zero and cannot be normalized");
    }
    atoms_.col(j) /= norms_(j);
  }
  sources_ = sources.order();
}

Dictionary Dictionary::from_atoms(Matrix atoms, std::vector<Index> source_indices,
                                  Vector source_norms) {
  if (atoms.cols() != static_cast<Index>(source_indices.size()) ||
      atoms.cols() != source_norms.size()) {
    throw InvalidArgument("Dictionary: atom/source/norm count mismatch");
  }
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double nj = atoms.col(j).norm();
    if (std::abs(nj - 1.0) > 1e-10) {
      throw InvalidArgument("Dictionary: atom " + std::to_string(j) + " is not unit norm");
    }
  }
  Dictionary d;
  d.atoms_ = std::move(atoms);
  d.sources_ = std::move(source_indices);
  d.norms_ = std::move(source_norms);
  return d;
}

Matrix SparseCode::dense() const {
  Matrix out = Matrix::Zero(rows, col_count());
  for (Index j = 0; j < col_count(); ++j) {
    const SparseVector& c = cols[static_cast<std::size_t>(j)];
    for (std::size_t t = 0; t < c.support.size(); ++t) {
      out(c.support[t], j) = c.coeffs[t];
    }
  }
  return out;
}

Matrix SparseCode::abs_dense() const { return dense().cwiseAbs(); }

SparseVector omp(const Vector& x, const Dictionary& D, const StoppingRule& stop) {
  if (x.size() != D.dim()) throw InvalidArgument("omp: signal dimension mismatch");
  const StopBounds bounds = resolve_stop(stop, D.atom_count());
  const Matrix& atoms = D.atoms();
  const Index n_atoms = D.atom_count();

  SparseVector out;
  const double norm_x = x.norm();
  if (norm_x == 0.0) {
    out.residual_norm = 0.0;
    return out;
  }
  out.residual_norm = norm_x;
  if (bounds.eps >= 0.0 && norm_x <= bounds.eps) return out;

  const double corr_floor = kCorrelationFloorScale * norm_x;
  Vector r = x;
  ProgressiveCholesky chol(bounds.max_atoms);
  std::vector<char> unusable(static_cast<std::size_t>(n_atoms), 0);
  Vector p = Vector::Zero(bounds.max_atoms);  // D_Lambda^T x
  Vector coeffs;

  while (static_cast<Index>(out.support.size()) < bounds.max_atoms) {
    Index pick = -1;
    double best = corr_floor;
    for (Index j = 0; j < n_atoms; ++j) {
      if (unusable[static_cast<std::size_t>(j)]) continue;
      const double a = std::abs(atoms.col(j).dot(r));
      if (a > best) {
        best = a;
        pick = j;
      }
    }
    if (pick < 0) break;  // correlation floor: nothing usable left

    const Index k = static_cast<Index>(out.support.size());
    Vector gram_col(k);
    for (Index t = 0; t < k; ++t) gram_col(t) = atoms.col(out.support[static_cast<std::size_t>(t)]).dot(atoms.col(pick));
    if (!chol.try_extend(gram_col, 1.0)) {
      unusable[static_cast<std::size_t>(pick)] = 1;  // numerically dependent atom
      continue;
    }
    out.support.push_back(pick);
    unusable[static_cast<std::size_t>(pick)] = 1;
    p(k) = atoms.col(pick).dot(x);

    coeffs = chol.solve(p.head(k + 1));
    r = x;
    for (Index t = 0; t <= k; ++t) r -= coeffs(t) * atoms.col(out.support[static_cast<std::size_t>(t)]);
    out.residual_norm = r.norm();
    if (bounds.eps >= 0.0 && out.residual_norm <= bounds.eps) break;
  }

  if (coeffs.size() > 0) out.coeffs.assign(coeffs.data(), coeffs.data() + coeffs.size());
  return out;
}

namespace {

/// Batch-OMP inner loop for one signal: correlations come from the
/// precomputed Gram matrix, residual norms from the squared-norm recursion;
/// no residual vector is ever formed.
SparseVector code_one_signal_batch(const Vector& x, const Matrix& atoms, const Matrix& gram,
                                   const StopBounds& bounds, Index excluded_atom) {
  const Index n_atoms = atoms.cols();
  SparseVector out;
  const double norm2_x = x.squaredNorm();
  const double norm_x = std::sqrt(norm2_x);
  if (norm_x == 0.0) {
    out.residual_norm = 0.0;
    return out;
  }
  out.residual_norm = norm_x;
  if (bounds.eps >= 0.0 && norm_x <= bounds.eps) return out;

  const double corr_floor = kCorrelationFloorScale * norm_x;
  const Vector p0 = atoms.transpose() * x;
  Vector corr = p0;
  ProgressiveCholesky chol(bounds.max_atoms);
  std::vector<char> unusable(static_cast<std::size_t>(n_atoms), 0);
  if (excluded_atom >= 0) unusable[static_cast<std::size_t>(excluded_atom)] = 1;

  Vector p = Vector::Zero(bounds.max_atoms);
  Vector coeffs;
  double err2 = norm2_x;
  double delta_prev = 0.0;

  while (static_cast<Index>(out.support.size()) < bounds.max_atoms) {
    Index pick = -1;
    double best = corr_floor;
    for (Index j = 0; j < n_atoms; ++j) {
      if (unusable[static_cast<std::size_t>(j)]) continue;
      const double a = std::abs(corr(j));
      if (a > best) {
        best = a;
        pick = j;
      }
    }
    if (pick < 0) break;

    const Index k = static_cast<Index>(out.support.size());
    Vector gram_col(k);
    for (Index t = 0; t < k; ++t) gram_col(t) = gram(out.support[static_cast<std::size_t>(t)], pick);
    if (!chol.try_extend(gram_col, gram(pick, pick))) {
      unusable[static_cast<std::size_t>(pick)] = 1;
      continue;
    }
    out.support.push_back(pick);
    unusable[static_cast<std::size_t>(pick)] = 1;
    p(k) = p0(pick);

    coeffs = chol.solve(p.head(k + 1));

    // corr = p0 - G_{:,Lambda} v  (the correlations of the implicit residual)
    corr = p0;
    for (Index t = 0; t <= k; ++t) corr -= coeffs(t) * gram.col(out.support[static_cast<std::size_t>(t)]);

    const double delta_new = coeffs.dot(p.head(k + 1));
    err2 += delta_prev - delta_new;
    delta_prev = delta_new;
    out.residual_norm = std::sqrt(std::max(err2, 0.0));
    if (bounds.eps >= 0.0 && out.residual_norm <= bounds.eps) break;
  }

  if (coeffs.size() > 0) out.coeffs.assign(coeffs.data(), coeffs.data() + coeffs.size());
  return out;
}

SparseCode batch_code(const Matrix& signals, const Dictionary& D, const StoppingRule& stop,
                      bool exclude_matching_atom) {
  if (signals.rows() != D.dim()) throw InvalidArgument("batch_omp: row count mismatch");
  const StopBounds bounds = resolve_stop(stop, D.atom_count());
  const Matrix gram = D.atoms().transpose() * D.atoms();

  SparseCode code;
  code.rows = D.atom_count();
  code.cols.resize(static_cast<std::size_t>(signals.cols()));
  parallel_for(signals.cols(), [&](Index b, Index e) {
    for (Index j = b; j < e; ++j) {
      const Index excluded = exclude_matching_atom ? j : Index{-1};
      code.cols[static_cast<std::size_t>(j)] =
          code_one_signal_batch(signals.col(j), D.atoms(), gram, bounds, excluded);
    }
  });
  return code;
}

}  // namespace

SparseCode batch_omp(const DataMatrix& X, const Dictionary& D, const StoppingRule& stop) {
  return batch_code(X.mat(), D, stop, /*exclude_matching_atom=*/false);
}

SparseCode omp_zero_diag(const DataMatrix& X_S, const Dictionary& D, const StoppingRule& stop) {
  if (X_S.cols() != D.atom_count()) {
    throw InvalidArgument("omp_zero_diag: column i of X_S must correspond to atom i");
  }
  return batch_code(X_S.mat(), D, stop, /*exclude_matching_atom=*/true);
}

}  // namespace seed
