#include "seed/oasis.hpp"

#include "seed/parallel.hpp"
#include "seed/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace seed {

namespace {

constexpr int kInitRedraws = 10;
// Relative floor under which a pivot of the initial core factorization is
// treated as a linearly dependent draw.
constexpr double kDependentPivot = 1e-12;

void refresh_delta(OasisState& s) {
  const Index n = s.gram_diag.size();
  parallel_for(n, [&](Index b, Index e) {
    for (Index i = b; i < e; ++i) {
      s.delta(i) = s.gram_diag(i) - s.sampled_gram.row(i).dot(s.regressors.col(i));
    }
  });
}

// Exact W^{-1} from the selected columns; returns false on a dependent set.
bool invert_core(const Matrix& W, double pivot_floor, Matrix& winv) {
  Eigen::LLT<Matrix> llt(W);
  if (llt.info() != Eigen::Success) return false;
  const Vector pivots = llt.matrixLLT().diagonal();
  for (Index j = 0; j < pivots.size(); ++j) {
    if (pivots(j) * pivots(j) <= pivot_floor) return false;
  }
  winv = llt.solve(Matrix::Identity(W.rows(), W.cols()));
  return true;
}

}  // namespace

void OasisConfig::validate(Index n_columns) const {
  if (max_columns < 1) throw InvalidArgument("oasis: max_columns must be at least 1");
  if (max_columns > n_columns) {
    throw InvalidArgument("oasis: max_columns exceeds the number of columns");
  }
  if (initial_columns < 1 || initial_columns > max_columns) {
    throw InvalidArgument("oasis: initial_columns must lie in [1, max_columns]");
  }
  if (delta_stop.has_value() && !(*delta_stop >= 0.0)) {
    throw InvalidArgument("oasis: delta_stop must be non-negative");
  }
  if (recompute_every < 0) throw InvalidArgument("oasis: recompute_every must be non-negative");
}

OasisState oasis_init(const DataMatrix& X, const OasisConfig& cfg) {
  cfg.validate(X.cols());
  const Index n = X.cols();
  const Index k0 = cfg.initial_columns;

  Vector d = X.mat().colwise().squaredNorm().transpose();
  const double d_max = d.maxCoeff();
  const double stop_threshold = cfg.delta_stop.value_or(1e-10 * d_max);
  const double pivot_floor = kDependentPivot * std::max(d_max, std::numeric_limits<double>::min());

  Rng rng(cfg.seed);
  for (int attempt = 0; attempt < kInitRedraws; ++attempt) {
    const std::vector<Index> draw = rng.sample_without_replacement(n, k0);

    Matrix xs(X.rows(), k0);
    for (Index p = 0; p < k0; ++p) xs.col(p) = X.col(draw[static_cast<std::size_t>(p)]);
    Matrix C = X.mat().transpose() * xs;  // n x k0

    Matrix W(k0, k0);
    for (Index p = 0; p < k0; ++p) W.row(p) = C.row(draw[static_cast<std::size_t>(p)]);

    Matrix winv;
    if (!invert_core(W, pivot_floor, winv)) continue;

    OasisState state;
    state.selected = ColumnIndexSet(draw);
    state.winv = std::move(winv);
    state.sampled_gram = std::move(C);
    state.regressors = state.winv * state.sampled_gram.transpose();
    state.gram_diag = std::move(d);
    state.delta = Vector::Zero(n);
    state.stop_threshold = stop_threshold;
    state.recompute_every = cfg.recompute_every;
    state.seed = cfg.seed;
    refresh_delta(state);
    return state;
  }

  throw NumericalError("oasis_init: failed to draw linearly independent starting columns after " +
                       std::to_string(kInitRedraws) + " attempts");
}

OasisStep oasis_step(OasisState& s, const DataMatrix& X) {
  const Index n = X.cols();
  const Index k = s.count();

  // argmax |Delta| over unselected columns; ties go to the smallest index.
  Index best = -1;
  double best_abs = -1.0;
  for (Index i = 0; i < n; ++i) {
    if (s.selected.contains(i)) continue;
    const double a = std::abs(s.delta(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best < 0) return OasisStep{{}, 0.0};
  if (best_abs <= s.stop_threshold) return OasisStep{{}, best_abs};

  const double schur = s.delta(best);
  const double sinv = 1.0 / schur;
  const Vector q = s.regressors.col(best);            // W^{-1} b_i
  const Vector c = X.mat().transpose() * X.col(best); // new sampled Gram column
  const Vector v = s.sampled_gram * q - c;            // C_k q - c

  s.winv.conservativeResize(k + 1, k + 1);
  s.winv.topLeftCorner(k, k) += sinv * q * q.transpose();
  s.winv.block(0, k, k, 1) = -sinv * q;
  s.winv.block(k, 0, 1, k) = -sinv * q.transpose();
  s.winv(k, k) = sinv;

  s.regressors.conservativeResize(k + 1, n);
  s.regressors.topRows(k) += sinv * q * v.transpose();
  s.regressors.row(k) = -sinv * v.transpose();

  s.sampled_gram.conservativeResize(n, k + 1);
  s.sampled_gram.col(k) = c;

  s.selected.append(best);
  s.schur_trace.push_back(schur);

  if (s.recompute_every > 0 && s.count() % s.recompute_every == 0) {
    const Matrix xs = s.selected.gather(X.mat());
    const Matrix W = xs.transpose() * xs;
    Matrix winv;
    const double pivot_floor =
        kDependentPivot * std::max(s.gram_diag.maxCoeff(), std::numeric_limits<double>::min());
    if (invert_core(W, pivot_floor, winv)) {
      s.winv = std::move(winv);
      s.regressors = s.winv * s.sampled_gram.transpose();
    }
    // A failed refresh keeps the incrementally maintained state.
  }

  refresh_delta(s);
  return OasisStep{best, best_abs};
}

OasisSelection oasis_select(const DataMatrix& X, const OasisConfig& cfg) {
  OasisState state = oasis_init(X, cfg);

  OasisSelection out;
  out.stopped_early = false;
  while (state.count() < cfg.max_columns) {
    const OasisStep step = oasis_step(state, X);
    if (step.stopped()) {
      out.stopped_early = true;
      out.final_max_delta = step.max_abs_delta;
      break;
    }
    out.delta_trace.push_back(step.max_abs_delta);
  }
  if (!out.stopped_early) {
    double final_max = 0.0;
    for (Index i = 0; i < X.cols(); ++i) {
      if (!state.selected.contains(i)) final_max = std::max(final_max, std::abs(state.delta(i)));
    }
    out.final_max_delta = final_max;
  }
  out.selected = std::move(state.selected);
  return out;
}

}  // namespace seed
