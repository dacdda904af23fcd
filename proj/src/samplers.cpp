#include "seed/samplers.hpp"

#include "seed/core.hpp"
#include "seed/parallel.hpp"
#include "seed/rng.hpp"

#include <algorithm>
#include <cmath>

namespace seed {

std::string to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::oasis: return "oasis";
    case SamplerMethod::random: return "random";
    case SamplerMethod::ses: return "ses";
    case SamplerMethod::leverage: return "leverage";
  }
  return "unknown";
}

SamplerMethod sampler_method_from_string(const std::string& name) {
  if (name == "oasis") return SamplerMethod::oasis;
  if (name == "random") return SamplerMethod::random;
  if (name == "ses") return SamplerMethod::ses;
  if (name == "leverage") return SamplerMethod::leverage;
  throw InvalidArgument("unknown sampler method '" + name + "'");
}

void SamplerSpec::validate(Index rows, Index cols) const {
  if (count < 1) throw InvalidArgument("sampler: L must be at least 1");
  if (count > cols) throw InvalidArgument("sampler: L exceeds the number of columns");
  if (leverage_rank.has_value() &&
      (*leverage_rank < 1 || *leverage_rank > std::min(rows, cols))) {
    throw InvalidArgument("sampler: leverage_rank must lie in [1, min(m, n)]");
  }
}

ColumnIndexSet random_select(const DataMatrix& X, Index L, std::uint64_t seed) {
  if (L < 1 || L > X.cols()) throw InvalidArgument("random_select: L out of range");
  Rng rng(seed);
  return ColumnIndexSet(rng.sample_without_replacement(X.cols(), L));
}

ColumnIndexSet ses_select(const DataMatrix& X, Index L, std::uint64_t seed, bool greedy) {
  const Index n = X.cols();
  if (L < 1 || L > n) throw InvalidArgument("ses_select: L out of range");

  // Residual columns, orthogonalized incrementally against the growing basis
  // of the selection: one Gram-Schmidt step per draw over all columns.
  Matrix residuals = X.mat();
  const double exclude_floor = 1e-12 * X.mat().norm();

  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  ColumnIndexSet selected;
  Rng rng(seed);

  for (Index t = 0; t < L; ++t) {
    Vector weights = Vector::Zero(n);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double r = residuals.col(i).norm();
      if (r < exclude_floor) continue;
      weights(i) = r;
      total += r;
    }
    if (total <= 0.0) break;  // every column is spanned: exact recovery reached

    Index pick;
    if (greedy) {
      pick = 0;
      double best = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (weights(i) > best) {
          best = weights(i);
          pick = i;
        }
      }
    } else {
      pick = rng.pick_weighted(weights);
    }

    selected.append(pick);
    taken[static_cast<std::size_t>(pick)] = 1;

    // The picked residual is the new basis direction; remove it everywhere.
    Vector q = residuals.col(pick);
    const double qn = q.norm();
    if (qn > 0.0) {
      q /= qn;
      parallel_for(n, [&](Index b, Index e) {
        for (Index i = b; i < e; ++i) {
          residuals.col(i) -= q.dot(residuals.col(i)) * q;
        }
      });
    }
    residuals.col(pick).setZero();
  }
  return selected;
}

Vector leverage_scores(const DataMatrix& X, Index rank) {
  if (rank < 1 || rank > std::min(X.rows(), X.cols())) {
    throw InvalidArgument("leverage_scores: rank out of range");
  }
  const SvdTriplets svd = leading_singular_vectors(X.mat(), rank);
  Vector scores(X.cols());
  for (Index i = 0; i < X.cols(); ++i) {
    scores(i) = svd.right.row(i).squaredNorm() / static_cast<double>(rank);
  }
  return scores;
}

namespace {

// Numerical rank at relative tolerance `tol`, found by growing the computed
// leading spectrum until a singular value falls under tol * sigma_1.
Index numerical_rank_by_power(const DataMatrix& X, double tol) {
  const Index cap = std::min(X.rows(), X.cols());
  Index count = std::min<Index>(cap, 8);
  for (;;) {
    const SvdTriplets svd = leading_singular_vectors(X.mat(), count);
    const double sigma1 = svd.values(0);
    if (sigma1 <= 0.0) return 0;
    for (Index j = 0; j < count; ++j) {
      if (svd.values(j) <= tol * sigma1) return j;
    }
    if (count == cap) return cap;
    count = std::min(cap, count * 2);
  }
}

}  // namespace

ColumnIndexSet leverage_select(const DataMatrix& X, Index L, Index leverage_rank,
                               std::uint64_t seed) {
  const Index n = X.cols();
  if (L < 1 || L > n) throw InvalidArgument("leverage_select: L out of range");

  Vector weights = leverage_scores(X, leverage_rank);
  Rng rng(seed);
  ColumnIndexSet selected;
  for (Index t = 0; t < L; ++t) {
    Index pick;
    if (weights.sum() > 0.0) {
      pick = rng.pick_weighted(weights);
    } else {
      // Remaining scores vanished; fall back to uniform over unselected so
      // the contract of L distinct indices still holds.
      std::vector<Index> remaining;
      remaining.reserve(static_cast<std::size_t>(n - t));
      for (Index i = 0; i < n; ++i) {
        if (!selected.contains(i)) remaining.push_back(i);
      }
      pick = remaining[static_cast<std::size_t>(rng.uniform_index(static_cast<Index>(remaining.size())))];
    }
    selected.append(pick);
    weights(pick) = 0.0;
  }
  return selected;
}

SelectionRun select_columns(const DataMatrix& X, const SamplerSpec& spec,
                            const std::optional<OasisConfig>& oasis_cfg) {
  spec.validate(X.rows(), X.cols());
  SelectionRun run;
  switch (spec.method) {
    case SamplerMethod::oasis: {
      OasisConfig cfg = oasis_cfg.value_or(OasisConfig{});
      if (cfg.max_columns == 0) cfg.max_columns = spec.count;
      if (cfg.max_columns != spec.count) {
        throw InvalidArgument("select_columns: oasis max_columns disagrees with sampler L");
      }
      if (!oasis_cfg.has_value()) cfg.seed = spec.seed;
      OasisSelection sel = oasis_select(X, cfg);
      run.selected = std::move(sel.selected);
      run.delta_trace = std::move(sel.delta_trace);
      run.stopped_early = sel.stopped_early;
      return run;
    }
    case SamplerMethod::random:
      run.selected = random_select(X, spec.count, spec.seed);
      return run;
    case SamplerMethod::ses: {
      run.selected = ses_select(X, spec.count, spec.seed, spec.ses_greedy);
      run.stopped_early = run.selected.size() < spec.count;
      return run;
    }
    case SamplerMethod::leverage: {
      Index rank;
      if (spec.leverage_rank.has_value()) {
        rank = *spec.leverage_rank;
      } else {
        if (std::min(X.rows(), X.cols()) > 2000) {
          throw InvalidArgument(
              "select_columns: leverage_rank is required for matrices with min(m, n) > 2000");
        }
        rank = numerical_rank_by_power(X, 1e-8);
        if (rank < 1) throw NumericalError("select_columns: matrix is numerically zero");
      }
      run.selected = leverage_select(X, spec.count, rank, spec.seed);
      return run;
    }
  }
  throw InvalidArgument("select_columns: unknown method");
}

}  // namespace seed
