#pragma once

#include "seed/oasis.hpp"
#include "seed/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seed {

enum class SamplerMethod { oasis, random, ses, leverage };

std::string to_string(SamplerMethod m);
SamplerMethod sampler_method_from_string(const std::string& name);

struct SamplerSpec {
  SamplerMethod method = SamplerMethod::oasis;
  Index count = 0;  // L
  std::uint64_t seed = 0;
  /// Target rank for leverage scores; defaults to the numerical rank of X at
  /// tolerance 1e-8 when min(m, n) <= 2000.
  std::optional<Index> leverage_rank{};
  /// Pick the max-residual column instead of sampling (benchmarking aid).
  bool ses_greedy = false;

  void validate(Index rows, Index cols) const;
};

/// L distinct indices drawn uniformly without replacement.
ColumnIndexSet random_select(const DataMatrix& X, Index L, std::uint64_t seed);

/// Sequential error selection: each draw picks column i with probability
/// proportional to ||x_i - P_S(x_i)||_2. Residual norms are maintained by
/// incremental Gram-Schmidt against the growing orthonormal basis of X_S.
/// Columns whose residual falls below 1e-12 * ||X||_F are excluded; if every
/// column is excluded before L draws the shorter set is returned.
ColumnIndexSet ses_select(const DataMatrix& X, Index L, std::uint64_t seed, bool greedy = false);

/// Leverage scores from the top `rank` right singular vectors:
/// score_i = ||row i of V_r||^2 / rank.
Vector leverage_scores(const DataMatrix& X, Index rank);

/// L draws without replacement with probability proportional to the leverage
/// scores.
ColumnIndexSet leverage_select(const DataMatrix& X, Index L, Index leverage_rank,
                               std::uint64_t seed);

struct SelectionRun {
  ColumnIndexSet selected;
  std::vector<double> delta_trace;  // oASIS only, empty otherwise
  bool stopped_early = false;
};

/// Dispatch on spec.method. `oasis_cfg`, when given, overrides the derived
/// oASIS configuration (its max_columns must agree with spec.count).
SelectionRun select_columns(const DataMatrix& X, const SamplerSpec& spec,
                            const std::optional<OasisConfig>& oasis_cfg = {});

}  // namespace seed
