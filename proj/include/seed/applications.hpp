#pragma once

#include "seed/pipeline.hpp"
#include "seed/samplers.hpp"
#include "seed/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seed {

/// Relative approximation error ||X - X_S X_S^+ X||_F^2 / ||X||_F^2 in [0, 1].
double approx_error(const DataMatrix& X, const ColumnIndexSet& S);

struct ApproxCurve {
  std::string method;
  std::vector<Index> sizes;          // the L grid
  std::vector<double> mean_errors;   // averaged over seeds
  std::vector<double> stderr_errors; // standard error over seeds (0 for one seed)
  std::vector<double> mean_seconds;  // selection wall time per L
  std::vector<double> delta_trace;   // oASIS only: trace from the first seed's largest run
};

/// Approximation-error curves over an L grid, one sampler run per
/// (method, L, seed) cell, errors averaged over seeds. L = 0 scores 1 by
/// convention.
std::vector<ApproxCurve> error_curve(const DataMatrix& X, std::vector<SamplerSpec> methods,
                                     const std::vector<Index>& L_grid,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::optional<OasisConfig>& oasis_cfg = {});

/// X_hat = reconstruct(seed_decompose(X, cfg)); every column lies in the span
/// of at most k_max selected columns.
DataMatrix denoise(const DataMatrix& X, const SeedConfig& cfg);

enum class ThresholdMode { fixed, kmeans };

struct OutlierReport {
  std::vector<int> sparsity;     // nonzeros per column of V
  std::vector<bool> is_outlier;  // one per column
  double threshold = 0.0;        // columns with sparsity > threshold are outliers
  ThresholdMode mode = ThresholdMode::kmeans;
  /// Set when the two k-means sparsity clusters have means within 1 of each
  /// other; no outliers are declared in that case.
  bool low_confidence = false;
};

/// Flags columns whose sparse representation is dense. Requires Error
/// stopping and the zero_diag variant; k_max defaults to the atom count so
/// sparsity is demand-driven. Without an explicit threshold, a 1-D 2-means
/// split of the sparsity levels picks one.
OutlierReport detect_outliers(const DataMatrix& X, SeedConfig cfg,
                              std::optional<int> threshold = {});

}  // namespace seed
