#pragma once

#include "seed/types.hpp"

#include <optional>
#include <vector>

namespace seed {

/// Dictionary of unit-norm atoms plus the map back to the original columns
/// they were drawn from. Construction from a column subset is the single
/// normalization site; the raw column norms are kept as alpha.
class Dictionary {
 public:
  /// Normalizes the selected columns of X. Throws NumericalError when a
  /// selected column is zero and cannot be normalized.
  Dictionary(const DataMatrix& X, const ColumnIndexSet& sources);

  /// Adopts pre-normalized atoms; every column norm must be within 1e-10 of 1.
  static Dictionary from_atoms(Matrix atoms, std::vector<Index> source_indices,
                               Vector source_norms);

  const Matrix& atoms() const { return atoms_; }
  Index dim() const { return atoms_.rows(); }
  Index atom_count() const { return atoms_.cols(); }
  const std::vector<Index>& source_indices() const { return sources_; }
  /// alpha: l2 norm of the original column behind each atom.
  const Vector& source_norms() const { return norms_; }

 private:
  Dictionary() = default;

  Matrix atoms_;
  std::vector<Index> sources_;
  Vector norms_;
};

/// Stopping rule for greedy sparse recovery; at least one bound must be set.
/// When both are set, whichever fires first stops the iteration.
struct StoppingRule {
  std::optional<int> max_atoms{};       // Sparse: |support| <= k_max
  std::optional<double> residual_tol{}; // Error: ||r||_2 <= eps

  void validate() const;
};

struct SparseVector {
  std::vector<Index> support;  // atom indices, selection order
  std::vector<double> coeffs;  // aligned with support
  double residual_norm = 0.0;
};

/// Column-sparse L x N coefficient matrix.
struct SparseCode {
  Index rows = 0;  // L
  std::vector<SparseVector> cols;

  Index col_count() const { return static_cast<Index>(cols.size()); }
  Matrix dense() const;
  Matrix abs_dense() const;
};

/// Reference orthogonal matching pursuit. Selects argmax_j |<d_j, r>| (ties
/// to the smallest atom index), re-solves least squares on the support via a
/// progressively extended Cholesky factor, and updates the residual
/// explicitly. Always stops once the best correlation drops to
/// 1e-12 * ||x||, even if neither user rule has fired.
SparseVector omp(const Vector& x, const Dictionary& D, const StoppingRule& stop);

/// Batch OMP: same output contract as omp() applied per column, but works
/// entirely on the precomputed Gram matrix D^T D and D^T X, tracking residual
/// norms by the squared-norm recursion without forming residual vectors.
SparseCode batch_omp(const DataMatrix& X, const Dictionary& D, const StoppingRule& stop);

/// Per-column OMP over the selected columns themselves, with atom i excluded
/// from candidacy for signal i so every column is represented over the other
/// selected columns.
SparseCode omp_zero_diag(const DataMatrix& X_S, const Dictionary& D, const StoppingRule& stop);

}  // namespace seed
