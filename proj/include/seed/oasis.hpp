#pragma once

#include "seed/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace seed {

struct OasisConfig {
  Index max_columns = 0;     // L, maximum number of columns to select
  Index initial_columns = 1; // random columns drawn before greedy selection
  /// Absolute stop threshold on max |Delta|. When unset, a relative default
  /// of 1e-10 * max_i d_i is resolved at init so the rule is scale invariant.
  std::optional<double> delta_stop{};
  std::uint64_t seed = 0;
  /// Refresh Winv and R exactly from X_S every this many selections to cap
  /// floating-point drift on long runs. 0 disables the refresh.
  Index recompute_every = 0;

  void validate(Index n_columns) const;
};

/// Incremental selection state. S holds the selected columns in selection
/// order; the Gram matrix itself is never materialized — only the sampled
/// columns C = X^T X_S, the inverse core Winv = (X_S^T X_S)^{-1}, the
/// regressors R = Winv C^T and the diagonal d are kept.
struct OasisState {
  ColumnIndexSet selected;
  Matrix winv;          // |S| x |S|
  Matrix sampled_gram;  // C, n x |S|
  Matrix regressors;    // R, |S| x n
  Vector gram_diag;     // d, d_i = x_i^T x_i
  Vector delta;         // current discrepancies Delta_i, refreshed after every step
  std::vector<double> schur_trace;  // Delta of the selected column, per greedy step
  double stop_threshold = 0.0;      // resolved absolute delta
  Index recompute_every = 0;        // exact-refresh cadence copied from the config
  std::uint64_t seed = 0;

  Index count() const { return selected.size(); }
};

struct OasisStep {
  /// Index appended to S, or empty when the step returned Stopped.
  std::optional<Index> selected{};
  /// max |Delta_i| over unselected columns at decision time.
  double max_abs_delta = 0.0;

  bool stopped() const { return !selected.has_value(); }
};

struct OasisSelection {
  ColumnIndexSet selected;
  std::vector<double> delta_trace;  // max |Delta| at each greedy selection
  bool stopped_early = false;
  double final_max_delta = 0.0;     // max |Delta| over unselected at termination
};

/// Draws cfg.initial_columns random columns, forms C, Winv, R and the
/// discrepancy vector. Linearly dependent draws are re-drawn up to 10 times
/// before an initialization failure is signalled.
OasisState oasis_init(const DataMatrix& X, const OasisConfig& cfg);

/// One greedy step: picks argmax |Delta_i| over unselected columns (ties to
/// the smallest index), grows C by the sampled Gram column and applies the
/// rank-1 block-inverse updates to Winv and R. Returns Stopped without
/// mutating the state when max |Delta_i| <= the stop threshold.
OasisStep oasis_step(OasisState& state, const DataMatrix& X);

/// init followed by steps until max_columns are selected or Stopped.
OasisSelection oasis_select(const DataMatrix& X, const OasisConfig& cfg);

}  // namespace seed
